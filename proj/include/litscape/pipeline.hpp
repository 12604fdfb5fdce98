#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "litscape/corpus.hpp"
#include "litscape/densclust.hpp"
#include "litscape/embedding.hpp"
#include "litscape/harvest.hpp"
#include "litscape/llmextract.hpp"
#include "litscape/manifold.hpp"

namespace litscape::pipeline {

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stage was requested whose prerequisite artifact is absent.
struct DependencyError : PipelineError {
    using PipelineError::PipelineError;
};

inline constexpr std::string_view kVersion = "0.1.0";

enum class Stage {
    ingest,
    screen,
    harvest,
    clean,
    embed,
    reduce,
    cluster,
    terms,
    label,
    extract,
    normalize,
    stats,
    report,
};

std::string_view stage_name(Stage s);
Stage stage_from_name(std::string_view name);
const std::vector<Stage>& all_stages();

enum class ChatProviderKind { replay, scripted, http };
enum class EmbeddingProviderKind { fallback, http };

struct RunConfig {
    std::uint64_t seed = 42;
    int workers = 1;
    bool resume = false;

    // paths
    std::string metadata_csv;
    std::string screening_json;   // optional
    std::string workdir = "out";
    std::string harvest_cache;
    std::string embedding_cache;  // optional
    std::string transcripts;
    std::string prompts = "assets/prompts";
    std::string term_groups;      // JSON {group: [terms...]}

    embedding::EmbeddingConfig embedding;
    EmbeddingProviderKind embedding_provider = EmbeddingProviderKind::fallback;
    // "included" embeds every screened-in record; "fulltext" restricts the
    // clustering corpus to records with retrieved full texts
    std::string embed_scope = "included";

    manifold::ProjectionConfig projection;     // clustering space (10-dim)
    manifold::ProjectionConfig projection_2d;  // scatter space

    densclust::ClusterConfig cluster;

    llmextract::ChatConfig chat;
    ChatProviderKind chat_provider = ChatProviderKind::replay;
    std::vector<std::string> lcia_methods;     // empty = defaults
    std::vector<std::string> generic_ai_labels = {
        "Machine Learning (ML)", "Machine Learning", "Prediction and Optimization",
        "Probabilistic Analysis", "Data Engineering"};

    harvest::ProviderConfig open_access;
    harvest::ProviderConfig publisher;
    std::vector<std::string> publisher_prefixes = {"10.1016"};
    std::string publisher_token_env = "LITSCAPE_PUBLISHER_TOKEN";

    int top_terms = 10;
    int top_phrases = 10;
    int trend_period_years = 4;
    int trend_top_k = 8;
    int specificity_max_terms = 500;
    int top_members = 15;

    std::string output_dir() const;    // workdir/outputs
    std::string manifest_path() const; // workdir/manifest.json

    static RunConfig load(const std::string& path);
    static RunConfig from_json_text(std::string_view text, const std::string& base_dir);
    std::string to_json() const;

    // Checks that every referenced input path exists.
    void validate() const;
};

struct StageRecord {
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256
    std::int64_t started_unix_ms = 0;
    std::int64_t finished_unix_ms = 0;
    bool skipped = false;
};

struct RunManifest {
    std::string tool_version{kVersion};
    std::string config_json;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, StageRecord>> stages;  // executed order

    std::string to_json() const;
    static RunManifest load(const std::string& path);
    void save(const std::string& path) const;
};

// Executes the requested stages in dependency order. Stages whose inputs
// and outputs both hash-match the previous manifest are skipped.
RunManifest run(const RunConfig& config, const std::vector<Stage>& stages);
RunManifest run_all(const RunConfig& config);

// Recomputes every output hash recorded in the manifest; returns the
// paths that are missing or differ.
std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::string& workdir);

// One point per document, cluster colors from a fixed palette, noise in
// gray, legend of cluster titles. Byte-deterministic for fixed inputs.
std::string emit_scatter(const manifold::Projection& projection,
                         const densclust::ClusterAssignment& assignment,
                         const std::vector<llmextract::ClusterCard>& cards);

std::map<std::string, std::vector<std::string>> load_term_groups(const std::string& path);

// Overrides the provider section of `config` from a standalone JSON file
// (same shape as the config's "providers" object).
void merge_providers(RunConfig& config, const std::string& path);

}  // namespace litscape::pipeline
