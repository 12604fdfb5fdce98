#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "litscape/corpus.hpp"

namespace litscape::harvest {

struct HarvestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProviderConfig {
    std::string base_url;
    std::optional<std::string> auth_token;
    double rate_limit = 10.0;      // requests per second, > 0
    double timeout_seconds = 30.0; // > 0
    int max_retries = 3;
    double backoff_seconds = 1.0;  // doubles per retry

    void validate() const;
};

enum class Provider { open_access, publisher };
enum class Outcome { ok, paywalled, not_found, http_error, no_doi };
enum class PayloadKind { pdf_url, xml };

std::string_view provider_name(Provider p);
std::string_view outcome_name(Outcome o);

struct RetrievalAttempt {
    std::string doc_id;
    Provider provider = Provider::open_access;
    Outcome outcome = Outcome::no_doi;
    std::optional<PayloadKind> payload_kind;
    std::string note;  // URL, error detail
};

// Serializes request spacing so each provider sees at most rate_limit
// requests per second.
class RateLimiter {
public:
    explicit RateLimiter(double rate_per_second);
    void acquire();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Raw HTTP exchange persisted on disk, keyed by DOI, so re-runs replay
// without network traffic.
struct CachedResponse {
    int status = 0;
    std::string body;
};

class ResponseCache {
public:
    explicit ResponseCache(std::string dir);  // empty dir disables caching
    std::optional<CachedResponse> get(std::string_view kind, std::string_view doi) const;
    void put(std::string_view kind, std::string_view doi, const CachedResponse& response);
    bool enabled() const { return !dir_.empty(); }

private:
    std::string path_for(std::string_view kind, std::string_view doi) const;
    std::string dir_;
};

// GET through cache + rate limiter with retry/backoff on transient
// failures (connect errors and 5xx).
CachedResponse fetch_with_policy(const std::string& url,
                                 const std::vector<std::pair<std::string, std::string>>& headers,
                                 const ProviderConfig& cfg, RateLimiter* limiter,
                                 ResponseCache* cache, std::string_view cache_kind,
                                 std::string_view cache_key);

struct ResolveResult {
    std::optional<std::string> url;
    RetrievalAttempt attempt;
};

// Open-access resolver: GET {base}/{doi} -> JSON with is_oa and a best
// location URL. Returns the URL when the resolver reports one; records
// an attempt either way.
ResolveResult resolve_open_access(const std::string& doc_id, const std::string& doi,
                                  const ProviderConfig& cfg, RateLimiter* limiter = nullptr,
                                  ResponseCache* cache = nullptr);

// True iff the DOI prefix appears in the publisher prefix list.
bool route_publisher(std::string_view doi,
                     const std::vector<std::string>& prefixes = {"10.1016"});

struct FetchResult {
    std::optional<std::string> xml;
    RetrievalAttempt attempt;
};

// Publisher full-text API: GET {base}/{doi} with an API-key header.
FetchResult fetch_publisher_fulltext(const std::string& doc_id, const std::string& doi,
                                     const ProviderConfig& cfg, RateLimiter* limiter = nullptr,
                                     ResponseCache* cache = nullptr);

struct HarvestConfig {
    ProviderConfig open_access;
    ProviderConfig publisher;
    std::vector<std::string> publisher_prefixes = {"10.1016"};
    std::string cache_dir;
    int workers = 1;
    bool resume = false;
    corpus::XmlTagRules xml_tags;
};

struct HarvestResult {
    std::vector<RetrievalAttempt> attempts;  // sorted by (doc_id, provider)
    corpus::PrismaCounts counts;
};

// Attempts open access first, then the publisher route, for every
// screened-in record with a DOI; attaches full texts and updates stages.
// Per-record errors are recorded, never fatal.
HarvestResult harvest_all(std::vector<corpus::DocumentRecord>& records,
                          const HarvestConfig& cfg);

// Splits counts of retrieved full texts by source: plain text came from
// the open-access route, XML from the publisher route.
std::pair<std::int64_t, std::int64_t> retrieval_split(
    const std::vector<corpus::DocumentRecord>& records);

void save_attempts_csv(const std::vector<RetrievalAttempt>& attempts,
                       const std::string& path);
std::vector<RetrievalAttempt> load_attempts_csv(const std::string& path);

}  // namespace litscape::harvest
