#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace litscape::embedding {

struct EmbeddingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense document vectors. Values are quantized to 32-bit floats at the
// provider boundary and promoted to doubles for all numerics, so a vector
// read back from the cache is bitwise identical to the fresh one.
struct EmbeddingMatrix {
    Eigen::MatrixXd rows;               // n x dim
    std::vector<std::string> doc_ids;   // aligned by row index
    std::string model_id;

    Eigen::Index count() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
};

struct EmbeddingConfig {
    std::string model_id = "all-MiniLM-L6-v2";
    int dim = 384;
    std::string endpoint;              // HTTP embeddings endpoint, if remote
    int batch_size = 32;
    bool unit_normalize = true;
    std::string cache_dir;             // empty disables the disk cache
    int fallback_seed = 1;
    double timeout_seconds = 30.0;
};

// One batch of texts -> one float32 vector per text, order preserved.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<float>> embed(
        const std::string& model_id, const std::vector<std::string>& texts) = 0;
};

// POST {model, input:[...]} -> {data:[{embedding:[...]}...]}.
std::unique_ptr<EmbeddingProvider> make_http_provider(const EmbeddingConfig& cfg);

// Deterministic offline provider backed by fallback_embed.
std::unique_ptr<EmbeddingProvider> make_fallback_provider(const EmbeddingConfig& cfg);

// Embeds texts in batches through `provider`, caching each vector on disk
// under cfg.cache_dir keyed by (model_id, sha256(text)). Order preserved;
// row i corresponds to texts[i] and doc_ids[i].
EmbeddingMatrix embed_batch(const std::vector<std::string>& texts,
                            const std::vector<std::string>& doc_ids,
                            EmbeddingProvider& provider, const EmbeddingConfig& cfg);

// Feature-hashes word unigrams and bigrams into `dim` signed buckets and
// L2-normalizes. Hashing is defined on UTF-8 bytes, so results match
// across platforms. Bigrams of two identical tokens are skipped (they
// carry no signal beyond the unigram). Throws on token-free text.
Eigen::VectorXd fallback_embed(const std::string& text, int dim, int seed);

// 1 - cos(a, b), in [0, 2]. Throws on zero-norm input or dim mismatch.
double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Binary vector cache: little-endian float32 payload, one file per entry.
std::string cache_key(const std::string& model_id, const std::string& text);
std::optional<std::vector<float>> cache_load(const std::string& cache_dir,
                                             const std::string& key);
void cache_store(const std::string& cache_dir, const std::string& key,
                 const std::vector<float>& values);

// Embedding matrix persistence (row-major float32 with a small header).
void save_matrix(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix load_matrix(const std::string& path);

}  // namespace litscape::embedding
