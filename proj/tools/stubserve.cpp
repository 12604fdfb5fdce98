// Offline stand-ins for the external services the pipeline talks to:
// an embeddings endpoint, a chat endpoint, an open-access resolver, and
// a publisher full-text API. Responses are deterministic, so recorded
// transcripts and caches replay bit-identically.

#include <cstdio>
#include <string>

// project headers first: Eigen must precede httplib (glibc's resolv.h,
// pulled in by httplib, defines _res, which Eigen uses as a name)
#include "litscape/embedding.hpp"
#include "litscape/llmextract.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

using json = nlohmann::json;

namespace {

// DOI conventions understood by the fixture endpoints:
//   *oa*   -> open access with a downloadable text
//   prefix 10.1016 and *xml* -> publisher returns an XML body
//   anything else -> paywalled / not entitled
bool doi_is_oa(const std::string& doi) { return doi.find("oa") != std::string::npos; }
bool doi_has_xml(const std::string& doi) { return doi.find("xml") != std::string::npos; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"litscape-stubserve: deterministic stub services for tests and replay"};
    int port = 8976;
    std::string host = "127.0.0.1";
    app.add_option("--port", port, "listen port");
    app.add_option("--host", host, "bind address");
    CLI11_PARSE(app, argc, argv);

    httplib::Server server;
    auto chat = litscape::llmextract::make_scripted_provider();

    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        auto body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("input")) {
            res.status = 400;
            return;
        }
        json reply;
        reply["model"] = body.value("model", "stub");
        auto& data = reply["data"] = json::array();
        for (const auto& text : body["input"]) {
            auto v = litscape::embedding::fallback_embed(text.get<std::string>(), 384, 1);
            std::vector<float> row(384);
            for (int i = 0; i < 384; ++i) row[static_cast<std::size_t>(i)] = static_cast<float>(v[i]);
            data.push_back({{"embedding", row}});
        }
        res.set_content(reply.dump(), "application/json");
    });

    server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                            httplib::Response& res) {
        auto body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("messages")) {
            res.status = 400;
            return;
        }
        litscape::llmextract::ChatRequest request;
        request.model = body.value("model", "stub");
        for (const auto& m : body["messages"])
            request.messages.push_back({m.value("role", "user"), m.value("content", "")});
        json reply;
        reply["choices"] = json::array(
            {{{"message", {{"role", "assistant"}, {"content", chat->complete(request)}}}}});
        res.set_content(reply.dump(), "application/json");
    });

    server.Get(R"(/oa/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
        std::string doi = req.matches[1];
        json reply;
        reply["doi"] = doi;
        reply["is_oa"] = doi_is_oa(doi);
        if (doi_is_oa(doi)) {
            reply["best_oa_location"] = {
                {"url_for_pdf", "http://" + host + ":" + std::to_string(port) +
                                    "/content/" + doi}};
        } else {
            reply["best_oa_location"] = nullptr;
        }
        res.set_content(reply.dump(), "application/json");
    });

    server.Get(R"(/content/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
        std::string doi = req.matches[1];
        res.set_content("Full text of " + doi +
                            ". This open-access study applies machine learning to life "
                            "cycle assessment and reports quantified impacts.",
                        "text/plain");
    });

    server.Get(R"(/publisher/(.+))", [&](const httplib::Request& req,
                                         httplib::Response& res) {
        if (!req.has_header("X-ELS-APIKey")) {
            res.status = 401;
            return;
        }
        std::string doi = req.matches[1];
        if (!doi_has_xml(doi)) {
            res.status = 403;
            return;
        }
        res.set_content(
            "<full-text-retrieval-response><originalText><body>Publisher full text of " +
                doi +
                ". The paper couples neural networks with inventory data to predict "
                "life cycle impacts.</body></originalText></full-text-retrieval-response>",
            "application/xml");
    });

    std::fprintf(stderr,
                 "[stubserve] listening on %s:%d (DOIs containing 'oa' resolve open "
                 "access; 10.1016 DOIs containing 'xml' return publisher XML)\n",
                 host.c_str(), port);
    server.listen(host, port);
    return 0;
}
