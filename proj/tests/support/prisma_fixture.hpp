// Review-scale harvest fixture: 538 screened records, 513 with DOIs,
// 72 resolvable open access, 238 routed to the publisher of which 137
// return XML. Responses are pre-seeded into a harvest cache so replays
// never touch the network.
#pragma once

#include <string>
#include <vector>

#include "litscape/corpus.hpp"
#include "litscape/harvest.hpp"

namespace fixtures {

struct PrismaFixture {
    std::vector<litscape::corpus::DocumentRecord> records;
    int expected_oa = 72;
    int expected_publisher = 137;
    int expected_total = 209;
};

inline PrismaFixture make_prisma_fixture(const std::string& cache_dir) {
    using namespace litscape;
    PrismaFixture fx;
    harvest::ResponseCache cache(cache_dir);

    auto add_record = [&](int i, const std::string& doi) {
        corpus::DocumentRecord rec;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "doc-%04d", i);
        rec.id = buf;
        rec.title = "Record " + std::to_string(i);
        rec.abstract_text = "Abstract " + std::to_string(i);
        rec.year = 2015 + (i % 10);
        rec.stage = corpus::Stage::screened_in;
        if (!doi.empty()) rec.doi = doi;
        fx.records.push_back(std::move(rec));
    };

    auto seed_oa = [&](const std::string& doi, bool is_oa) {
        std::string body = is_oa
                               ? R"({"is_oa": true, "best_oa_location": {"url_for_pdf": )"
                                     "\"http://oa.fixture/content/" + doi + "\"}}"
                               : R"({"is_oa": false, "best_oa_location": null})";
        cache.put("oa", doi, {200, body});
        if (is_oa) {
            cache.put("oa_content", doi,
                      {200, "Open access full text for " + doi +
                                ". Machine learning supports the assessment."});
        }
    };
    auto seed_pub = [&](const std::string& doi, bool entitled) {
        if (entitled) {
            cache.put("pub", doi,
                      {200, "<article><body>Publisher full text for " + doi +
                                ". Neural networks estimate inventory data.</body></article>"});
        } else {
            cache.put("pub", doi, {403, ""});
        }
    };

    int idx = 0;
    // 25 records without a DOI
    for (int i = 0; i < 25; ++i) add_record(idx++, "");
    // 72 open-access DOIs (mixed prefixes)
    for (int i = 0; i < 72; ++i) {
        std::string doi = "10.5555/oa." + std::to_string(i);
        add_record(idx++, doi);
        seed_oa(doi, true);
    }
    // 238 Elsevier-prefixed DOIs: 137 entitled, 101 not
    for (int i = 0; i < 238; ++i) {
        std::string doi = "10.1016/j.fix." + std::to_string(i);
        add_record(idx++, doi);
        seed_oa(doi, false);
        seed_pub(doi, i < 137);
    }
    // 203 remaining closed-access, non-publisher DOIs
    for (int i = 0; i < 203; ++i) {
        std::string doi = "10.7777/closed." + std::to_string(i);
        add_record(idx++, doi);
        seed_oa(doi, false);
    }
    return fx;
}

inline litscape::harvest::HarvestConfig replay_config(const std::string& cache_dir) {
    litscape::harvest::HarvestConfig cfg;
    cfg.open_access.base_url = "http://oa.fixture/resolve";
    cfg.open_access.rate_limit = 1e6;
    cfg.open_access.max_retries = 1;
    cfg.open_access.backoff_seconds = 0.0;
    cfg.publisher.base_url = "http://pub.fixture/article";
    cfg.publisher.rate_limit = 1e6;
    cfg.publisher.max_retries = 1;
    cfg.publisher.backoff_seconds = 0.0;
    cfg.cache_dir = cache_dir;
    return cfg;
}

}  // namespace fixtures
