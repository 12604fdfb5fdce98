#include "litscape/harvest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "litscape/util/csv.hpp"
#include "litscape/util/sha256.hpp"
#include "litscape/util/strings.hpp"
#include "litscape/util/xml.hpp"

namespace litscape::harvest {

namespace fs = std::filesystem;
using json = nlohmann::json;

void ProviderConfig::validate() const {
    if (rate_limit <= 0) throw HarvestError("provider config: rate_limit must be > 0");
    if (timeout_seconds <= 0) throw HarvestError("provider config: timeout must be > 0");
    if (base_url.find("://") == std::string::npos)
        throw HarvestError("provider config: base_url must be a URL: " + base_url);
}

std::string_view provider_name(Provider p) {
    return p == Provider::open_access ? "open_access" : "publisher";
}

std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::ok: return "ok";
        case Outcome::paywalled: return "paywalled";
        case Outcome::not_found: return "not_found";
        case Outcome::http_error: return "http_error";
        case Outcome::no_doi: return "no_doi";
    }
    return "http_error";
}

// ---------------------------------------------------------------------------
// Rate limiter

struct RateLimiter::Impl {
    std::mutex mutex;
    std::chrono::steady_clock::time_point next_allowed = std::chrono::steady_clock::now();
    std::chrono::nanoseconds interval{0};
};

RateLimiter::RateLimiter(double rate_per_second) : impl_(std::make_shared<Impl>()) {
    if (rate_per_second <= 0) throw HarvestError("rate limiter: rate must be > 0");
    impl_->interval =
        std::chrono::nanoseconds(static_cast<std::int64_t>(1e9 / rate_per_second));
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard<std::mutex> lock(impl_->mutex);
        auto now = std::chrono::steady_clock::now();
        if (impl_->next_allowed < now) impl_->next_allowed = now;
        slot = impl_->next_allowed;
        impl_->next_allowed += impl_->interval;
    }
    std::this_thread::sleep_until(slot);
}

// ---------------------------------------------------------------------------
// Response cache

ResponseCache::ResponseCache(std::string dir) : dir_(std::move(dir)) {}

std::string ResponseCache::path_for(std::string_view kind, std::string_view doi) const {
    return (fs::path(dir_) / std::string(kind) /
            (sha256::hex_digest(doi) + ".json"))
        .string();
}

std::optional<CachedResponse> ResponseCache::get(std::string_view kind,
                                                 std::string_view doi) const {
    if (dir_.empty()) return std::nullopt;
    std::ifstream in(path_for(kind, doi), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        auto j = json::parse(ss.str());
        return CachedResponse{j.at("status").get<int>(), j.at("body").get<std::string>()};
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void ResponseCache::put(std::string_view kind, std::string_view doi,
                        const CachedResponse& response) {
    if (dir_.empty()) return;
    fs::path path = path_for(kind, doi);
    fs::create_directories(path.parent_path());
    nlohmann::ordered_json j;
    j["doi"] = std::string(doi);
    j["status"] = response.status;
    j["body"] = response.body;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw HarvestError("cannot write cache file " + path.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// HTTP with retry/backoff

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw HarvestError("not a URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string host = url.substr(0, path_start == std::string::npos ? url.size() : path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    return {host, path};
}

}  // namespace

CachedResponse fetch_with_policy(const std::string& url,
                                 const std::vector<std::pair<std::string, std::string>>& headers,
                                 const ProviderConfig& cfg, RateLimiter* limiter,
                                 ResponseCache* cache, std::string_view cache_kind,
                                 std::string_view cache_key) {
    if (cache) {
        if (auto hit = cache->get(cache_kind, cache_key)) return *hit;
    }
    auto [host, path] = split_url(url);
    double backoff = cfg.backoff_seconds;
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, cfg.max_retries); ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2;
        }
        if (limiter) limiter->acquire();
        httplib::Client client(host);
        client.set_connection_timeout(std::chrono::milliseconds(
            static_cast<int>(cfg.timeout_seconds * 1000)));
        client.set_read_timeout(std::chrono::milliseconds(
            static_cast<int>(cfg.timeout_seconds * 1000)));
        httplib::Headers hdrs;
        for (const auto& [k, v] : headers) hdrs.emplace(k, v);
        auto res = client.Get(path, hdrs);
        if (!res) {
            last_error = "connection failed to " + host;
            continue;  // transient
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;  // transient
        }
        CachedResponse response{res->status, res->body};
        if (cache) cache->put(cache_kind, cache_key, response);
        return response;
    }
    throw HarvestError("request failed after " + std::to_string(cfg.max_retries) +
                       " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Providers

ResolveResult resolve_open_access(const std::string& doc_id, const std::string& doi,
                                  const ProviderConfig& cfg, RateLimiter* limiter,
                                  ResponseCache* cache) {
    if (doi.empty()) throw HarvestError("resolve_open_access: empty DOI");
    cfg.validate();
    ResolveResult result;
    result.attempt.doc_id = doc_id;
    result.attempt.provider = Provider::open_access;

    CachedResponse response;
    try {
        response = fetch_with_policy(cfg.base_url + "/" + doi, {}, cfg, limiter, cache,
                                     "oa", doi);
    } catch (const HarvestError& e) {
        result.attempt.outcome = Outcome::http_error;
        result.attempt.note = e.what();
        return result;
    }
    if (response.status == 404) {
        result.attempt.outcome = Outcome::not_found;
        return result;
    }
    if (response.status != 200) {
        result.attempt.outcome = Outcome::http_error;
        result.attempt.note = "HTTP " + std::to_string(response.status);
        return result;
    }
    try {
        auto j = json::parse(response.body);
        bool is_oa = j.value("is_oa", false);
        std::string url;
        if (j.contains("best_oa_location") && j["best_oa_location"].is_object()) {
            const auto& loc = j["best_oa_location"];
            url = loc.value("url_for_pdf", loc.value("url", std::string()));
        }
        if (is_oa && !url.empty()) {
            result.url = url;
            result.attempt.outcome = Outcome::ok;
            result.attempt.payload_kind = PayloadKind::pdf_url;
            result.attempt.note = url;
        } else {
            result.attempt.outcome = Outcome::paywalled;
        }
    } catch (const json::exception& e) {
        result.attempt.outcome = Outcome::http_error;
        result.attempt.note = std::string("malformed resolver response: ") + e.what();
    }
    return result;
}

bool route_publisher(std::string_view doi, const std::vector<std::string>& prefixes) {
    if (doi.empty()) return false;
    for (const auto& prefix : prefixes) {
        if (doi.substr(0, prefix.size()) == prefix) return true;
    }
    return false;
}

FetchResult fetch_publisher_fulltext(const std::string& doc_id, const std::string& doi,
                                     const ProviderConfig& cfg, RateLimiter* limiter,
                                     ResponseCache* cache) {
    if (doi.empty()) throw HarvestError("fetch_publisher_fulltext: empty DOI");
    cfg.validate();
    // the token is needed only when a live request will actually go out;
    // recorded-cache replays run without credentials
    bool cached = cache && cache->get("pub", doi).has_value();
    if (!cached && !cfg.auth_token)
        throw HarvestError("fetch_publisher_fulltext: auth token not configured");
    FetchResult result;
    result.attempt.doc_id = doc_id;
    result.attempt.provider = Provider::publisher;

    CachedResponse response;
    try {
        std::vector<std::pair<std::string, std::string>> headers;
        if (cfg.auth_token) headers.emplace_back("X-ELS-APIKey", *cfg.auth_token);
        response = fetch_with_policy(cfg.base_url + "/" + doi, headers, cfg, limiter,
                                     cache, "pub", doi);
    } catch (const HarvestError& e) {
        result.attempt.outcome = Outcome::http_error;
        result.attempt.note = e.what();
        return result;
    }
    switch (response.status) {
        case 200:
            result.xml = response.body;
            result.attempt.outcome = Outcome::ok;
            result.attempt.payload_kind = PayloadKind::xml;
            break;
        case 401:
            result.attempt.outcome = Outcome::http_error;
            result.attempt.note = "auth failure (HTTP 401)";
            break;
        case 403:
            result.attempt.outcome = Outcome::paywalled;
            result.attempt.note = "not entitled (HTTP 403)";
            break;
        case 404:
            result.attempt.outcome = Outcome::not_found;
            break;
        default:
            result.attempt.outcome = Outcome::http_error;
            result.attempt.note = "HTTP " + std::to_string(response.status);
            break;
    }
    return result;
}

// ---------------------------------------------------------------------------
// harvest_all

namespace {

void attach_plain_fulltext(corpus::DocumentRecord& record, const std::string& body) {
    corpus::FullText ft;
    ft.source_format = corpus::SourceFormat::plain;
    ft.raw_chars = static_cast<std::int64_t>(body.size());
    ft.cleaned_text = corpus::clean_fulltext(body);
    record.fulltext = std::move(ft);
    record.stage = corpus::Stage::fulltext_ok;
}

}  // namespace

HarvestResult harvest_all(std::vector<corpus::DocumentRecord>& records,
                          const HarvestConfig& cfg) {
    cfg.open_access.validate();
    cfg.publisher.validate();

    RateLimiter oa_limiter(cfg.open_access.rate_limit);
    RateLimiter pub_limiter(cfg.publisher.rate_limit);
    ResponseCache cache(cfg.cache_dir);

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.stage == corpus::Stage::identified)
            throw HarvestError("harvest_all: corpus not screened (record '" + rec.id + "')");
        if (rec.stage == corpus::Stage::screened_out) continue;
        if (rec.stage == corpus::Stage::fulltext_ok && cfg.resume) continue;
        if (rec.stage == corpus::Stage::fulltext_ok) continue;  // never refetch
        if (rec.stage == corpus::Stage::fulltext_missing && cfg.resume) continue;
        todo.push_back(i);
    }

    std::vector<RetrievalAttempt> attempts;
    std::mutex ledger_mutex;
    std::atomic<std::size_t> cursor{0};

    auto worker = [&] {
        while (true) {
            std::size_t at = cursor.fetch_add(1);
            if (at >= todo.size()) break;
            auto& rec = records[todo[at]];
            std::vector<RetrievalAttempt> local;

            if (!rec.doi) {
                RetrievalAttempt attempt;
                attempt.doc_id = rec.id;
                attempt.provider = Provider::open_access;
                attempt.outcome = Outcome::no_doi;
                local.push_back(attempt);
            } else {
                const std::string& doi = *rec.doi;
                bool got_fulltext = false;

                auto oa = resolve_open_access(rec.id, doi, cfg.open_access, &oa_limiter,
                                              &cache);
                local.push_back(oa.attempt);
                if (oa.url) {
                    try {
                        auto body = fetch_with_policy(*oa.url, {}, cfg.open_access,
                                                      &oa_limiter, &cache, "oa_content", doi);
                        if (body.status == 200 && !body.body.empty()) {
                            attach_plain_fulltext(rec, body.body);
                            got_fulltext = true;
                        } else {
                            local.back().outcome = Outcome::http_error;
                            local.back().note = "content fetch HTTP " +
                                                std::to_string(body.status);
                        }
                    } catch (const HarvestError& e) {
                        local.back().outcome = Outcome::http_error;
                        local.back().note = e.what();
                    }
                }

                if (!got_fulltext && route_publisher(doi, cfg.publisher_prefixes)) {
                    auto pub = fetch_publisher_fulltext(rec.id, doi, cfg.publisher,
                                                        &pub_limiter, &cache);
                    if (pub.xml) {
                        try {
                            auto ft = corpus::extract_xml_fulltext(*pub.xml, cfg.xml_tags);
                            if (ft) {
                                rec.fulltext = std::move(*ft);
                                rec.stage = corpus::Stage::fulltext_ok;
                                got_fulltext = true;
                            } else {
                                pub.attempt.outcome = Outcome::http_error;
                                pub.attempt.note = "no full-text tag in XML";
                            }
                        } catch (const std::exception& e) {
                            pub.attempt.outcome = Outcome::http_error;
                            pub.attempt.note = std::string("bad XML: ") + e.what();
                        }
                    }
                    local.push_back(pub.attempt);
                }

                if (!got_fulltext && rec.stage == corpus::Stage::screened_in)
                    rec.stage = corpus::Stage::fulltext_missing;
            }

            std::lock_guard<std::mutex> lock(ledger_mutex);
            for (auto& attempt : local) attempts.push_back(std::move(attempt));
        }
    };

    int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(attempts.begin(), attempts.end(),
              [](const RetrievalAttempt& a, const RetrievalAttempt& b) {
                  if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
                  return static_cast<int>(a.provider) < static_cast<int>(b.provider);
              });

    HarvestResult result;
    result.attempts = std::move(attempts);
    auto [oa_count, pub_count] = retrieval_split(records);
    result.counts = corpus::prisma_counts(records, oa_count, pub_count);
    return result;
}

std::pair<std::int64_t, std::int64_t> retrieval_split(
    const std::vector<corpus::DocumentRecord>& records) {
    std::int64_t oa = 0, pub = 0;
    for (const auto& rec : records) {
        if (rec.stage != corpus::Stage::fulltext_ok || !rec.fulltext) continue;
        if (rec.fulltext->source_format == corpus::SourceFormat::plain) ++oa;
        else ++pub;
    }
    return {oa, pub};
}

// ---------------------------------------------------------------------------
// Ledger persistence

void save_attempts_csv(const std::vector<RetrievalAttempt>& attempts,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw HarvestError("cannot write " + path);
    out << csv::format_row({"doc_id", "provider", "outcome", "payload_kind", "note"});
    for (const auto& a : attempts) {
        std::string payload;
        if (a.payload_kind)
            payload = *a.payload_kind == PayloadKind::pdf_url ? "pdf_url" : "xml";
        out << csv::format_row({a.doc_id, std::string(provider_name(a.provider)),
                                std::string(outcome_name(a.outcome)), payload, a.note});
    }
}

std::vector<RetrievalAttempt> load_attempts_csv(const std::string& path) {
    auto rows = csv::parse_file(path);
    std::vector<RetrievalAttempt> attempts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 5) throw HarvestError("bad attempts csv row");
        RetrievalAttempt a;
        a.doc_id = row[0];
        a.provider = row[1] == "publisher" ? Provider::publisher : Provider::open_access;
        for (Outcome o : {Outcome::ok, Outcome::paywalled, Outcome::not_found,
                          Outcome::http_error, Outcome::no_doi}) {
            if (row[2] == outcome_name(o)) a.outcome = o;
        }
        if (row[3] == "pdf_url") a.payload_kind = PayloadKind::pdf_url;
        else if (row[3] == "xml") a.payload_kind = PayloadKind::xml;
        a.note = row[4];
        attempts.push_back(std::move(a));
    }
    return attempts;
}

}  // namespace litscape::harvest
