#include "litscape/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "litscape/util/rng.hpp"
#include "litscape/util/sha256.hpp"
#include "litscape/util/strings.hpp"

namespace litscape::embedding {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Fallback provider (seeded feature hashing)

namespace {

// FNV-1a over UTF-8 bytes, mixed with the seed. Deliberately not
// std::hash, whose value is implementation-defined.
std::uint64_t seeded_hash(std::uint64_t seed, std::string_view token) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ rng::splitmix64(seed);
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return rng::splitmix64(h);
}

std::vector<std::string> hash_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        bool word_char = std::isalnum(c) || c >= 0x80;
        if (word_char) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace

Eigen::VectorXd fallback_embed(const std::string& text, int dim, int seed) {
    if (dim <= 0) throw EmbeddingError("fallback_embed: dim must be positive");
    auto tokens = hash_tokens(text);
    if (tokens.empty())
        throw EmbeddingError("fallback_embed: text has no tokens");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    auto add_feature = [&](std::string_view feature) {
        std::uint64_t h = seeded_hash(static_cast<std::uint64_t>(seed), feature);
        auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim));
        double sign = (h >> 63) ? -1.0 : 1.0;
        v[bucket] += sign;
    };
    for (const auto& t : tokens) add_feature(t);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i] == tokens[i + 1]) continue;
        add_feature(tokens[i] + " " + tokens[i + 1]);
    }
    double norm = v.norm();
    if (norm == 0.0) throw EmbeddingError("fallback_embed: features cancelled to zero");
    return v / norm;
}

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw EmbeddingError("cosine_distance: dimension mismatch");
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw EmbeddingError("cosine_distance: zero-norm vector");
    double c = a.dot(b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return 1.0 - c;
}

// ---------------------------------------------------------------------------
// Providers

namespace {

class FallbackProvider final : public EmbeddingProvider {
public:
    explicit FallbackProvider(const EmbeddingConfig& cfg) : cfg_(cfg) {}

    std::vector<std::vector<float>> embed(const std::string&,
                                          const std::vector<std::string>& texts) override {
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        for (const auto& text : texts) {
            Eigen::VectorXd v = fallback_embed(text, cfg_.dim, cfg_.fallback_seed);
            std::vector<float> row(static_cast<std::size_t>(cfg_.dim));
            for (int i = 0; i < cfg_.dim; ++i) row[static_cast<std::size_t>(i)] = static_cast<float>(v[i]);
            out.push_back(std::move(row));
        }
        return out;
    }

private:
    EmbeddingConfig cfg_;
};

class HttpProvider final : public EmbeddingProvider {
public:
    explicit HttpProvider(const EmbeddingConfig& cfg) : cfg_(cfg) {
        auto& url = cfg_.endpoint;
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw EmbeddingError("embeddings endpoint must be an http(s) URL: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        host_ = url.substr(0, path_start == std::string::npos ? url.size() : path_start);
        path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    }

    std::vector<std::vector<float>> embed(const std::string& model_id,
                                          const std::vector<std::string>& texts) override {
        json body;
        body["model"] = model_id;
        body["input"] = texts;

        httplib::Client client(host_);
        client.set_read_timeout(std::chrono::milliseconds(
            static_cast<int>(cfg_.timeout_seconds * 1000)));
        auto res = client.Post(path_, body.dump(), "application/json");
        if (!res)
            throw EmbeddingError("embeddings endpoint unreachable: " + host_);
        if (res->status != 200)
            throw EmbeddingError("embeddings endpoint returned HTTP " +
                                 std::to_string(res->status));
        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::exception& e) {
            throw EmbeddingError(std::string("embeddings response not JSON: ") + e.what());
        }
        if (!reply.contains("data") || !reply["data"].is_array() ||
            reply["data"].size() != texts.size())
            throw EmbeddingError("embeddings response shape mismatch");
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        for (const auto& item : reply["data"]) {
            out.push_back(item.at("embedding").get<std::vector<float>>());
        }
        return out;
    }

private:
    EmbeddingConfig cfg_;
    std::string host_;
    std::string path_;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> make_http_provider(const EmbeddingConfig& cfg) {
    return std::make_unique<HttpProvider>(cfg);
}

std::unique_ptr<EmbeddingProvider> make_fallback_provider(const EmbeddingConfig& cfg) {
    return std::make_unique<FallbackProvider>(cfg);
}

// ---------------------------------------------------------------------------
// Cache

std::string cache_key(const std::string& model_id, const std::string& text) {
    return sha256::hex_digest(model_id + "\x1f" + text);
}

std::optional<std::vector<float>> cache_load(const std::string& cache_dir,
                                             const std::string& key) {
    fs::path path = fs::path(cache_dir) / (key + ".vec");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    in.seekg(0, std::ios::end);
    auto bytes = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    if (bytes % sizeof(float) != 0) return std::nullopt;
    std::vector<float> values(bytes / sizeof(float));
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
    if (!in) return std::nullopt;
    return values;
}

void cache_store(const std::string& cache_dir, const std::string& key,
                 const std::vector<float>& values) {
    fs::create_directories(cache_dir);
    fs::path path = fs::path(cache_dir) / (key + ".vec");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EmbeddingError("cannot write cache file " + path.string());
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
}

// ---------------------------------------------------------------------------
// Batch embedding

EmbeddingMatrix embed_batch(const std::vector<std::string>& texts,
                            const std::vector<std::string>& doc_ids,
                            EmbeddingProvider& provider, const EmbeddingConfig& cfg) {
    if (texts.size() != doc_ids.size())
        throw EmbeddingError("embed_batch: texts/doc_ids size mismatch");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (texts[i].empty())
            throw EmbeddingError("embed_batch: empty text for doc '" + doc_ids[i] + "'");
    }

    const auto n = static_cast<Eigen::Index>(texts.size());
    EmbeddingMatrix m;
    m.model_id = cfg.model_id;
    m.doc_ids = doc_ids;
    m.rows.resize(n, cfg.dim);

    std::vector<std::size_t> missing;
    std::vector<std::vector<float>> raw(texts.size());
    // Duplicate texts share one request slot so equal inputs always get
    // bitwise-equal vectors, cache or no cache.
    std::unordered_map<std::string, std::size_t> first_with_key;
    std::vector<std::optional<std::size_t>> alias(texts.size());
    bool use_cache = !cfg.cache_dir.empty();
    for (std::size_t i = 0; i < texts.size(); ++i) {
        std::string key = cache_key(cfg.model_id, texts[i]);
        auto [it, inserted] = first_with_key.emplace(key, i);
        if (!inserted) {
            alias[i] = it->second;
            continue;
        }
        if (use_cache) {
            if (auto hit = cache_load(cfg.cache_dir, key)) {
                if (hit->size() == static_cast<std::size_t>(cfg.dim)) {
                    raw[i] = std::move(*hit);
                    continue;
                }
            }
        }
        missing.push_back(i);
    }

    int batch = cfg.batch_size > 0 ? cfg.batch_size : 32;
    for (std::size_t at = 0; at < missing.size(); at += static_cast<std::size_t>(batch)) {
        std::size_t stop = std::min(missing.size(), at + static_cast<std::size_t>(batch));
        std::vector<std::string> chunk;
        chunk.reserve(stop - at);
        for (std::size_t k = at; k < stop; ++k) chunk.push_back(texts[missing[k]]);
        auto vectors = provider.embed(cfg.model_id, chunk);
        if (vectors.size() != chunk.size())
            throw EmbeddingError("provider returned wrong vector count");
        for (std::size_t k = at; k < stop; ++k) {
            auto& vec = vectors[k - at];
            if (vec.size() != static_cast<std::size_t>(cfg.dim))
                throw EmbeddingError("provider returned dim " + std::to_string(vec.size()) +
                                     ", configured dim " + std::to_string(cfg.dim));
            if (use_cache) cache_store(cfg.cache_dir, cache_key(cfg.model_id, texts[missing[k]]), vec);
            raw[missing[k]] = std::move(vec);
        }
    }

    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& src = alias[i] ? raw[*alias[i]] : raw[i];
        Eigen::VectorXd row(cfg.dim);
        for (int d = 0; d < cfg.dim; ++d)
            row[d] = static_cast<double>(src[static_cast<std::size_t>(d)]);
        if (cfg.unit_normalize) {
            double norm = row.norm();
            if (norm == 0.0)
                throw EmbeddingError("zero-norm embedding for doc '" + doc_ids[i] + "'");
            row /= norm;
            // quantize to the on-disk precision so a saved-and-loaded
            // matrix is bitwise identical to the in-memory one
            for (int d = 0; d < cfg.dim; ++d)
                row[d] = static_cast<double>(static_cast<float>(row[d]));
        }
        m.rows.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

// ---------------------------------------------------------------------------
// Matrix persistence

void save_matrix(const EmbeddingMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EmbeddingError("cannot write " + path);
    json header;
    header["model_id"] = m.model_id;
    header["rows"] = m.count();
    header["dim"] = m.dim();
    header["doc_ids"] = m.doc_ids;
    std::string h = header.dump();
    auto hlen = static_cast<std::uint32_t>(h.size());
    out.write("LSEM", 4);
    out.write(reinterpret_cast<const char*>(&hlen), 4);
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (Eigen::Index r = 0; r < m.rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.rows.cols(); ++c) {
            float v = static_cast<float>(m.rows(r, c));
            out.write(reinterpret_cast<const char*>(&v), sizeof(float));
        }
    }
}

EmbeddingMatrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmbeddingError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LSEM", 4) != 0)
        throw EmbeddingError("bad embedding matrix file " + path);
    std::uint32_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), 4);
    std::string h(hlen, '\0');
    in.read(h.data(), hlen);
    json header = json::parse(h);
    EmbeddingMatrix m;
    m.model_id = header.at("model_id").get<std::string>();
    m.doc_ids = header.at("doc_ids").get<std::vector<std::string>>();
    auto rows = header.at("rows").get<Eigen::Index>();
    auto dim = header.at("dim").get<Eigen::Index>();
    m.rows.resize(rows, dim);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            float v = 0;
            in.read(reinterpret_cast<char*>(&v), sizeof(float));
            m.rows(r, c) = static_cast<double>(v);
        }
    }
    if (!in) throw EmbeddingError("truncated embedding matrix file " + path);
    return m;
}

}  // namespace litscape::embedding
