#include "litscape/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "litscape/termstats.hpp"
#include "litscape/util/csv.hpp"
#include "litscape/util/sha256.hpp"
#include "litscape/util/strings.hpp"

namespace litscape::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Stage names and dependencies

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::screen: return "screen";
        case Stage::harvest: return "harvest";
        case Stage::clean: return "clean";
        case Stage::embed: return "embed";
        case Stage::reduce: return "reduce";
        case Stage::cluster: return "cluster";
        case Stage::terms: return "terms";
        case Stage::label: return "label";
        case Stage::extract: return "extract";
        case Stage::normalize: return "normalize";
        case Stage::stats: return "stats";
        case Stage::report: return "report";
    }
    return "ingest";
}

Stage stage_from_name(std::string_view name) {
    for (Stage s : all_stages()) {
        if (stage_name(s) == name) return s;
    }
    throw PipelineError("unknown stage: " + std::string(name));
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages = {
        Stage::ingest, Stage::screen, Stage::harvest, Stage::clean,  Stage::embed,
        Stage::reduce, Stage::cluster, Stage::terms,  Stage::label,  Stage::extract,
        Stage::normalize, Stage::stats, Stage::report};
    return stages;
}

namespace {

// Artifact filenames, all relative to output_dir().
constexpr const char* kCorpusIngested = "corpus_ingested.jsonl";
constexpr const char* kCorpusScreened = "corpus_screened.jsonl";
constexpr const char* kCorpusHarvested = "corpus_harvested.jsonl";
constexpr const char* kCorpusClean = "corpus_clean.jsonl";
constexpr const char* kAttempts = "attempts.csv";
constexpr const char* kPrisma = "prisma.json";
constexpr const char* kEmbeddings = "embeddings.bin";
constexpr const char* kProjection10 = "projection10.csv";
constexpr const char* kProjection2 = "projection2.csv";
constexpr const char* kClusters = "clusters.csv";
constexpr const char* kClusterTerms = "cluster_terms.csv";
constexpr const char* kClusterPhrases = "cluster_phrases.csv";
constexpr const char* kClusterCards = "cluster_cards.json";
constexpr const char* kExtraction = "extraction.csv";
constexpr const char* kNormalized = "normalized.csv";
constexpr const char* kSpecificity = "specificity.csv";
constexpr const char* kContingency = "contingency.csv";
constexpr const char* kTrends = "trends.csv";
constexpr const char* kAiTopics = "ai_topics_by_year.csv";
constexpr const char* kScatter = "scatter.svg";
constexpr const char* kClusterSummary = "cluster_summary.csv";

struct StageSpec {
    std::vector<Stage> deps;
    std::vector<std::string> inputs;   // artifact files read (relative)
    std::vector<std::string> outputs;  // artifact files written (relative)
};

// Dependency artifact -> producing stage, for error messages.
const std::map<std::string, Stage>& artifact_producers() {
    static const std::map<std::string, Stage> producers = {
        {kCorpusIngested, Stage::ingest},   {kCorpusScreened, Stage::screen},
        {kCorpusHarvested, Stage::harvest}, {kAttempts, Stage::harvest},
        {kCorpusClean, Stage::clean},       {kEmbeddings, Stage::embed},
        {kProjection10, Stage::reduce},     {kProjection2, Stage::reduce},
        {kClusters, Stage::cluster},        {kClusterTerms, Stage::terms},
        {kClusterPhrases, Stage::terms},    {kClusterCards, Stage::label},
        {kExtraction, Stage::extract},      {kNormalized, Stage::normalize},
        {kSpecificity, Stage::stats},       {kContingency, Stage::stats},
        {kTrends, Stage::stats},            {kAiTopics, Stage::stats},
    };
    return producers;
}

const std::map<Stage, StageSpec>& stage_specs() {
    static const std::map<Stage, StageSpec> specs = {
        {Stage::ingest, {{}, {}, {kCorpusIngested}}},
        {Stage::screen, {{Stage::ingest}, {kCorpusIngested}, {kCorpusScreened}}},
        {Stage::harvest,
         {{Stage::screen}, {kCorpusScreened}, {kCorpusHarvested, kAttempts, kPrisma}}},
        {Stage::clean, {{Stage::harvest}, {kCorpusHarvested}, {kCorpusClean}}},
        {Stage::embed, {{Stage::clean}, {kCorpusClean}, {kEmbeddings}}},
        {Stage::reduce, {{Stage::embed}, {kEmbeddings}, {kProjection10, kProjection2}}},
        {Stage::cluster, {{Stage::reduce}, {kProjection10}, {kClusters}}},
        {Stage::terms,
         {{Stage::cluster, Stage::clean},
          {kClusters, kCorpusClean},
          {kClusterTerms, kClusterPhrases}}},
        {Stage::label,
         {{Stage::cluster, Stage::clean}, {kClusters, kCorpusClean}, {kClusterCards}}},
        {Stage::extract, {{Stage::clean}, {kCorpusClean}, {kExtraction}}},
        {Stage::normalize, {{Stage::extract}, {kExtraction}, {kNormalized}}},
        {Stage::stats,
         {{Stage::clean, Stage::normalize},
          {kCorpusClean, kNormalized, kExtraction},
          {kSpecificity, kContingency, kTrends, kAiTopics}}},
        {Stage::report,
         {{Stage::stats, Stage::label, Stage::terms, Stage::reduce, Stage::cluster},
          {kProjection2, kClusters, kClusterCards, kClusterPhrases, kCorpusHarvested},
          {kScatter, kClusterSummary, kPrisma}}},
    };
    return specs;
}

std::string now_iso() {
    return std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count());
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write " + path);
    out << content;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::string RunConfig::output_dir() const { return (fs::path(workdir) / "outputs").string(); }
std::string RunConfig::manifest_path() const {
    return (fs::path(workdir) / "manifest.json").string();
}

namespace {

manifold::ProjectionConfig projection_from_json(const json& j,
                                                manifold::ProjectionConfig base) {
    base.n_neighbors = j.value("n_neighbors", base.n_neighbors);
    base.n_components = j.value("n_components", base.n_components);
    base.min_dist = j.value("min_dist", base.min_dist);
    base.spread = j.value("spread", base.spread);
    if (j.contains("metric"))
        base.metric = manifold::metric_from_name(j.at("metric").get<std::string>());
    base.n_epochs = j.value("n_epochs", base.n_epochs);
    base.learning_rate = j.value("learning_rate", base.learning_rate);
    base.negative_sample_rate = j.value("negative_sample_rate", base.negative_sample_rate);
    base.parallel_threads = j.value("parallel_threads", base.parallel_threads);
    return base;
}

json projection_to_json(const manifold::ProjectionConfig& c) {
    json j;
    j["n_neighbors"] = c.n_neighbors;
    j["n_components"] = c.n_components;
    j["min_dist"] = c.min_dist;
    j["spread"] = c.spread;
    j["metric"] = std::string(manifold::metric_name(c.metric));
    j["n_epochs"] = c.n_epochs;
    j["learning_rate"] = c.learning_rate;
    j["negative_sample_rate"] = c.negative_sample_rate;
    j["parallel_threads"] = c.parallel_threads;
    return j;
}

harvest::ProviderConfig provider_from_json(const json& j) {
    harvest::ProviderConfig cfg;
    cfg.base_url = j.value("base_url", std::string());
    cfg.rate_limit = j.value("rate_limit", cfg.rate_limit);
    cfg.timeout_seconds = j.value("timeout", cfg.timeout_seconds);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.backoff_seconds = j.value("backoff", cfg.backoff_seconds);
    return cfg;
}

json provider_to_json(const harvest::ProviderConfig& cfg) {
    json j;
    j["base_url"] = cfg.base_url;
    j["rate_limit"] = cfg.rate_limit;
    j["timeout"] = cfg.timeout_seconds;
    j["max_retries"] = cfg.max_retries;
    j["backoff"] = cfg.backoff_seconds;
    return j;
}

}  // namespace

RunConfig RunConfig::from_json_text(std::string_view text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw PipelineError(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.resume = j.value("resume", cfg.resume);

    const json paths = j.value("paths", json::object());
    cfg.metadata_csv = resolve_path(base_dir, paths.value("metadata_csv", std::string()));
    cfg.screening_json = resolve_path(base_dir, paths.value("screening_json", std::string()));
    cfg.workdir = resolve_path(base_dir, paths.value("workdir", std::string("out")));
    cfg.harvest_cache = resolve_path(base_dir, paths.value("harvest_cache", std::string()));
    cfg.embedding_cache =
        resolve_path(base_dir, paths.value("embedding_cache", std::string()));
    cfg.transcripts = resolve_path(base_dir, paths.value("transcripts", std::string()));
    cfg.prompts = resolve_path(base_dir, paths.value("prompts", std::string("assets/prompts")));
    cfg.term_groups = resolve_path(base_dir, paths.value("term_groups", std::string()));

    if (j.contains("embedding")) {
        const auto& e = j["embedding"];
        cfg.embedding.model_id = e.value("model_id", cfg.embedding.model_id);
        cfg.embedding.dim = e.value("dim", cfg.embedding.dim);
        cfg.embedding.endpoint = e.value("endpoint", cfg.embedding.endpoint);
        cfg.embedding.batch_size = e.value("batch_size", cfg.embedding.batch_size);
        cfg.embedding.unit_normalize = e.value("unit_normalize", cfg.embedding.unit_normalize);
        cfg.embedding.fallback_seed = e.value("fallback_seed", cfg.embedding.fallback_seed);
        std::string provider = e.value("provider", std::string("fallback"));
        if (provider == "http") cfg.embedding_provider = EmbeddingProviderKind::http;
        else if (provider == "fallback") cfg.embedding_provider = EmbeddingProviderKind::fallback;
        else throw PipelineError("config: unknown embedding provider '" + provider + "'");
        cfg.embed_scope = e.value("scope", cfg.embed_scope);
        if (cfg.embed_scope != "included" && cfg.embed_scope != "fulltext")
            throw PipelineError("config: embedding.scope must be included|fulltext");
    }
    cfg.embedding.cache_dir = cfg.embedding_cache;

    cfg.projection = projection_from_json(j.value("projection", json::object()),
                                          manifold::ProjectionConfig{});
    manifold::ProjectionConfig scatter_base;
    scatter_base.n_components = 2;
    cfg.projection_2d =
        projection_from_json(j.value("projection_2d", json::object()), scatter_base);
    cfg.projection_2d.n_components = 2;  // the scatter is always planar
    cfg.projection.seed = cfg.seed;
    cfg.projection_2d.seed = cfg.seed + 1;

    if (j.contains("cluster")) {
        const auto& c = j["cluster"];
        cfg.cluster.min_cluster_size = c.value("min_cluster_size", cfg.cluster.min_cluster_size);
        cfg.cluster.min_samples = c.value("min_samples", cfg.cluster.min_samples);
        std::string selection = c.value("selection", std::string("leaf"));
        if (selection == "leaf") cfg.cluster.selection = densclust::Selection::leaf;
        else if (selection == "excess_of_mass")
            cfg.cluster.selection = densclust::Selection::excess_of_mass;
        else throw PipelineError("config: unknown cluster selection '" + selection + "'");
    }

    if (j.contains("chat")) {
        const auto& c = j["chat"];
        cfg.chat.endpoint = c.value("endpoint", cfg.chat.endpoint);
        cfg.chat.model_id = c.value("model_id", cfg.chat.model_id);
        cfg.chat.temperature = c.value("temperature", cfg.chat.temperature);
        cfg.chat.max_tokens = c.value("max_tokens", cfg.chat.max_tokens);
        cfg.chat.retries = c.value("retries", cfg.chat.retries);
        cfg.chat.context_budget_chars =
            c.value("context_budget_chars", cfg.chat.context_budget_chars);
        std::string provider = c.value("provider", std::string("replay"));
        if (provider == "replay") cfg.chat_provider = ChatProviderKind::replay;
        else if (provider == "scripted") cfg.chat_provider = ChatProviderKind::scripted;
        else if (provider == "http") cfg.chat_provider = ChatProviderKind::http;
        else throw PipelineError("config: unknown chat provider '" + provider + "'");
        cfg.lcia_methods = c.value("lcia_methods", cfg.lcia_methods);
    }

    if (j.contains("providers")) {
        const auto& p = j["providers"];
        if (p.contains("open_access")) cfg.open_access = provider_from_json(p["open_access"]);
        if (p.contains("publisher")) cfg.publisher = provider_from_json(p["publisher"]);
        cfg.publisher_prefixes = p.value("publisher_prefixes", cfg.publisher_prefixes);
        cfg.publisher_token_env = p.value("publisher_token_env", cfg.publisher_token_env);
    }

    if (j.contains("terms")) {
        const auto& t = j["terms"];
        cfg.top_terms = t.value("top_terms", cfg.top_terms);
        cfg.top_phrases = t.value("top_phrases", cfg.top_phrases);
        cfg.trend_period_years = t.value("trend_period_years", cfg.trend_period_years);
        cfg.trend_top_k = t.value("trend_top_k", cfg.trend_top_k);
        cfg.specificity_max_terms =
            t.value("specificity_max_terms", cfg.specificity_max_terms);
        cfg.top_members = t.value("top_members", cfg.top_members);
    }
    cfg.generic_ai_labels = j.value("generic_ai_labels", cfg.generic_ai_labels);
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::string text = read_file(path);
    return from_json_text(text, fs::path(path).parent_path().string());
}

std::string RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["workers"] = workers;
    j["resume"] = resume;
    j["paths"] = {{"metadata_csv", metadata_csv}, {"screening_json", screening_json},
                  {"workdir", workdir},           {"harvest_cache", harvest_cache},
                  {"embedding_cache", embedding_cache}, {"transcripts", transcripts},
                  {"prompts", prompts},           {"term_groups", term_groups}};
    j["embedding"] = {{"provider", embedding_provider == EmbeddingProviderKind::http
                                       ? "http"
                                       : "fallback"},
                      {"model_id", embedding.model_id},
                      {"dim", embedding.dim},
                      {"endpoint", embedding.endpoint},
                      {"batch_size", embedding.batch_size},
                      {"unit_normalize", embedding.unit_normalize},
                      {"fallback_seed", embedding.fallback_seed},
                      {"scope", embed_scope}};
    j["projection"] = projection_to_json(projection);
    j["projection_2d"] = projection_to_json(projection_2d);
    j["cluster"] = {{"min_cluster_size", cluster.min_cluster_size},
                    {"min_samples", cluster.min_samples},
                    {"selection",
                     cluster.selection == densclust::Selection::leaf ? "leaf"
                                                                     : "excess_of_mass"}};
    j["chat"] = {{"provider", chat_provider == ChatProviderKind::replay    ? "replay"
                              : chat_provider == ChatProviderKind::scripted ? "scripted"
                                                                            : "http"},
                 {"endpoint", chat.endpoint},
                 {"model_id", chat.model_id},
                 {"temperature", chat.temperature},
                 {"max_tokens", chat.max_tokens},
                 {"retries", chat.retries},
                 {"context_budget_chars", chat.context_budget_chars},
                 {"lcia_methods", lcia_methods}};
    j["providers"] = {{"open_access", provider_to_json(open_access)},
                      {"publisher", provider_to_json(publisher)},
                      {"publisher_prefixes", publisher_prefixes},
                      {"publisher_token_env", publisher_token_env}};
    j["terms"] = {{"top_terms", top_terms},
                  {"top_phrases", top_phrases},
                  {"trend_period_years", trend_period_years},
                  {"trend_top_k", trend_top_k},
                  {"specificity_max_terms", specificity_max_terms},
                  {"top_members", top_members}};
    j["generic_ai_labels"] = generic_ai_labels;
    return j.dump(2);
}

void RunConfig::validate() const {
    if (metadata_csv.empty() || !fs::exists(metadata_csv))
        throw PipelineError("config: metadata_csv not found: " + metadata_csv);
    if (!screening_json.empty() && !fs::exists(screening_json))
        throw PipelineError("config: screening_json not found: " + screening_json);
    if (!term_groups.empty() && !fs::exists(term_groups))
        throw PipelineError("config: term_groups not found: " + term_groups);
    if (!prompts.empty() && !fs::exists(prompts))
        throw PipelineError("config: prompts dir not found: " + prompts);
}

// ---------------------------------------------------------------------------
// Manifest

std::string RunManifest::to_json() const {
    json j;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["config"] = json::parse(config_json);
    auto& stages_json = j["stages"] = json::object();
    for (const auto& [name, record] : stages) {
        json r;
        r["skipped"] = record.skipped;
        r["started_unix_ms"] = record.started_unix_ms;
        r["finished_unix_ms"] = record.finished_unix_ms;
        r["inputs"] = record.inputs;
        r["outputs"] = record.outputs;
        stages_json[name] = r;
    }
    return j.dump(2) + "\n";
}

RunManifest RunManifest::load(const std::string& path) {
    json j = json::parse(read_file(path));
    RunManifest m;
    m.tool_version = j.value("tool_version", std::string());
    m.seed = j.value("seed", std::uint64_t{0});
    m.config_json = j.value("config", json::object()).dump(2);
    json stages_json = j.value("stages", json::object());
    for (const auto& [name, r] : stages_json.items()) {
        StageRecord record;
        record.skipped = r.value("skipped", false);
        record.started_unix_ms = r.value("started_unix_ms", std::int64_t{0});
        record.finished_unix_ms = r.value("finished_unix_ms", std::int64_t{0});
        record.inputs = r.value("inputs", std::map<std::string, std::string>{});
        record.outputs = r.value("outputs", std::map<std::string, std::string>{});
        m.stages.emplace_back(name, std::move(record));
    }
    return m;
}

void RunManifest::save(const std::string& path) const { write_file(path, to_json()); }

std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::string& workdir) {
    std::vector<std::string> mismatches;
    for (const auto& [name, record] : manifest.stages) {
        for (const auto& [rel, hash] : record.outputs) {
            fs::path path = fs::path(workdir) / "outputs" / rel;
            if (!fs::exists(path)) {
                mismatches.push_back(rel + " (missing)");
                continue;
            }
            if (sha256::hex_digest_file(path.string()) != hash)
                mismatches.push_back(rel + " (hash mismatch)");
        }
    }
    return mismatches;
}

// ---------------------------------------------------------------------------
// Stage execution context

namespace {

struct RunContext {
    const RunConfig& cfg;
    std::string out_dir;
    std::optional<RunManifest> previous;

    std::string artifact(const std::string& rel) const {
        return (fs::path(out_dir) / rel).string();
    }
};

std::vector<corpus::DocumentRecord> included_records(
    const std::vector<corpus::DocumentRecord>& records) {
    std::vector<corpus::DocumentRecord> out;
    for (const auto& r : records) {
        if (r.stage == corpus::Stage::screened_in || r.stage == corpus::Stage::fulltext_ok ||
            r.stage == corpus::Stage::fulltext_missing)
            out.push_back(r);
    }
    return out;
}

std::vector<corpus::DocumentRecord> embedding_scope_records(
    const std::vector<corpus::DocumentRecord>& records, const RunConfig& cfg) {
    std::vector<corpus::DocumentRecord> out;
    for (const auto& r : included_records(records)) {
        if (cfg.embed_scope == "fulltext" && r.stage != corpus::Stage::fulltext_ok) continue;
        if (r.abstract_text.empty()) continue;
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

std::unique_ptr<llmextract::ChatProvider> make_chat_provider(const RunConfig& cfg) {
    switch (cfg.chat_provider) {
        case ChatProviderKind::scripted:
            if (!cfg.transcripts.empty())
                return std::make_unique<llmextract::TranscriptCache>(
                    cfg.transcripts, llmextract::make_scripted_provider());
            return llmextract::make_scripted_provider();
        case ChatProviderKind::http: {
            auto http = llmextract::make_http_chat_provider(cfg.chat);
            if (!cfg.transcripts.empty())
                return std::make_unique<llmextract::TranscriptCache>(cfg.transcripts,
                                                                     std::move(http));
            return http;
        }
        case ChatProviderKind::replay:
        default:
            if (cfg.transcripts.empty())
                throw PipelineError("chat provider 'replay' needs paths.transcripts");
            return std::make_unique<llmextract::TranscriptCache>(cfg.transcripts, nullptr);
    }
}

// --- individual stages ---

void stage_ingest(RunContext& ctx) {
    auto result = corpus::ingest_metadata(ctx.cfg.metadata_csv);
    corpus::save_jsonl(result.records, ctx.artifact(kCorpusIngested));
}

void stage_screen(RunContext& ctx) {
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusIngested));
    std::vector<corpus::ScreeningDecision> decisions;
    // rows without an abstract are always excludable
    for (const auto& rec : records) {
        if (rec.abstract_text.empty())
            decisions.push_back({rec.id, corpus::Verdict::exclude,
                                 corpus::ExclusionReason::no_abstract});
    }
    if (!ctx.cfg.screening_json.empty()) {
        auto manual = corpus::decisions_from_json(read_file(ctx.cfg.screening_json));
        decisions.insert(decisions.end(), manual.begin(), manual.end());
    }
    corpus::apply_screening(records, decisions);
    corpus::save_jsonl(records, ctx.artifact(kCorpusScreened));
}

void stage_harvest(RunContext& ctx) {
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusScreened));
    harvest::HarvestConfig hcfg;
    hcfg.open_access = ctx.cfg.open_access;
    hcfg.publisher = ctx.cfg.publisher;
    hcfg.publisher_prefixes = ctx.cfg.publisher_prefixes;
    hcfg.cache_dir = ctx.cfg.harvest_cache;
    hcfg.workers = ctx.cfg.workers;
    hcfg.resume = ctx.cfg.resume;
    if (const char* token = std::getenv(ctx.cfg.publisher_token_env.c_str()))
        hcfg.publisher.auth_token = token;
    auto result = harvest::harvest_all(records, hcfg);
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    corpus::save_jsonl(records, ctx.artifact(kCorpusHarvested));
    harvest::save_attempts_csv(result.attempts, ctx.artifact(kAttempts));
    write_file(ctx.artifact(kPrisma), corpus::prisma_to_json(result.counts));
}

void stage_clean(RunContext& ctx) {
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusHarvested));
    for (auto& rec : records) {
        rec.title = corpus::clean_abstract(rec.title);
        rec.abstract_text = corpus::clean_abstract(rec.abstract_text);
        // full texts were cleaned when attached
    }
    corpus::save_jsonl(records, ctx.artifact(kCorpusClean));
}

void stage_embed(RunContext& ctx) {
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusClean));
    auto scope = embedding_scope_records(records, ctx.cfg);
    if (scope.empty()) throw PipelineError("embed: no documents in scope");
    std::vector<std::string> texts, ids;
    for (const auto& rec : scope) {
        texts.push_back(rec.abstract_text);
        ids.push_back(rec.id);
    }
    std::unique_ptr<embedding::EmbeddingProvider> provider =
        ctx.cfg.embedding_provider == EmbeddingProviderKind::http
            ? embedding::make_http_provider(ctx.cfg.embedding)
            : embedding::make_fallback_provider(ctx.cfg.embedding);
    auto matrix = embedding::embed_batch(texts, ids, *provider, ctx.cfg.embedding);
    embedding::save_matrix(matrix, ctx.artifact(kEmbeddings));
}

void stage_reduce(RunContext& ctx) {
    auto matrix = embedding::load_matrix(ctx.artifact(kEmbeddings));
    auto proj10 = manifold::project(matrix, ctx.cfg.projection);
    manifold::save_projection_csv(proj10, matrix.doc_ids, ctx.artifact(kProjection10));
    auto proj2 = manifold::project(matrix, ctx.cfg.projection_2d);
    manifold::save_projection_csv(proj2, matrix.doc_ids, ctx.artifact(kProjection2));
}

void stage_cluster(RunContext& ctx) {
    std::vector<std::string> ids;
    auto coords = manifold::load_projection_csv(ctx.artifact(kProjection10), &ids);
    auto assignment = densclust::cluster(coords, ctx.cfg.cluster);
    densclust::save_assignment_csv(assignment, ids, ctx.artifact(kClusters));
}

// Tokenized abstracts for the clustered documents, aligned with labels.
struct ClusteredCorpus {
    std::vector<std::string> ids;
    std::vector<std::string> abstracts;
    densclust::ClusterAssignment assignment;
};

ClusteredCorpus load_clustered(RunContext& ctx) {
    ClusteredCorpus cc;
    cc.assignment = densclust::load_assignment_csv(ctx.artifact(kClusters), &cc.ids);
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusClean));
    std::map<std::string, const corpus::DocumentRecord*> by_id;
    for (const auto& rec : records) by_id[rec.id] = &rec;
    for (const auto& id : cc.ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw PipelineError("clusters.csv references unknown doc '" + id + "'");
        cc.abstracts.push_back(it->second->abstract_text);
    }
    return cc;
}

void stage_terms(RunContext& ctx) {
    auto cc = load_clustered(ctx);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& text : cc.abstracts) tokens.push_back(termstats::tokenize(text));

    int n_clusters = cc.assignment.cluster_count();
    std::ofstream terms_out(ctx.artifact(kClusterTerms), std::ios::binary);
    std::ofstream phrases_out(ctx.artifact(kClusterPhrases), std::ios::binary);
    terms_out << csv::format_row({"cluster", "term", "score", "frequency"});
    phrases_out << csv::format_row({"cluster", "phrase", "score", "frequency"});
    for (int c = 0; c < n_clusters; ++c) {
        std::vector<int> members;
        std::vector<std::string> member_texts;
        for (std::size_t i = 0; i < cc.assignment.labels.size(); ++i) {
            if (cc.assignment.labels[i] == c) {
                members.push_back(static_cast<int>(i));
                member_texts.push_back(cc.abstracts[i]);
            }
        }
        if (members.empty()) continue;
        for (const auto& score : termstats::tfidf_cluster_terms(tokens, members,
                                                                ctx.cfg.top_terms)) {
            terms_out << csv::format_row({std::to_string(c), score.term,
                                          strings::format_double(score.score),
                                          std::to_string(score.frequency)});
        }
        for (const auto& score :
             termstats::extract_phrases(member_texts, ctx.cfg.top_phrases)) {
            phrases_out << csv::format_row({std::to_string(c), score.term,
                                            strings::format_double(score.score),
                                            std::to_string(score.frequency)});
        }
    }
}

void stage_label(RunContext& ctx) {
    auto cc = load_clustered(ctx);
    auto provider = make_chat_provider(ctx.cfg);
    auto templates = llmextract::PromptTemplates::load(ctx.cfg.prompts);
    auto tops = densclust::top_members(cc.assignment, ctx.cfg.top_members);
    std::vector<llmextract::ClusterCard> cards;
    for (std::size_t c = 0; c < tops.size(); ++c) {
        std::vector<std::string> abstracts;
        for (int idx : tops[c]) abstracts.push_back(cc.abstracts[static_cast<std::size_t>(idx)]);
        if (abstracts.empty()) continue;
        auto card = llmextract::label_cluster(abstracts, ctx.cfg.chat, *provider, templates);
        card.cluster_id = static_cast<int>(c);
        cards.push_back(std::move(card));
    }
    write_file(ctx.artifact(kClusterCards), llmextract::cards_to_json(cards));
}

void stage_extract(RunContext& ctx) {
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusClean));
    auto provider = make_chat_provider(ctx.cfg);
    auto templates = llmextract::PromptTemplates::load(ctx.cfg.prompts);
    std::vector<std::string> methods =
        ctx.cfg.lcia_methods.empty()
            ? std::vector<std::string>{"TRACI", "ReCiPe", "CML", "IPCC", "Eco-indicator",
                                       "USEtox"}
            : ctx.cfg.lcia_methods;

    std::vector<const corpus::DocumentRecord*> todo;
    for (const auto& rec : records) {
        if (rec.stage == corpus::Stage::fulltext_ok && rec.fulltext)
            todo.push_back(&rec);
    }
    // bounded worker pool; output order is canonical by doc_id regardless
    // of completion order, transcript writes are serialized by the cache
    std::vector<llmextract::ExtractionRecord> extractions(todo.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t at = cursor.fetch_add(1);
            if (at >= todo.size()) break;
            try {
                extractions[at] = llmextract::extract_fields(
                    todo[at]->id, todo[at]->fulltext->cleaned_text, methods, ctx.cfg.chat,
                    *provider, templates);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    int workers = std::max(1, ctx.cfg.workers);
    if (workers == 1 || todo.size() < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    std::sort(extractions.begin(), extractions.end(),
              [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
    llmextract::save_extractions_csv(extractions, ctx.artifact(kExtraction));
}

void stage_normalize(RunContext& ctx) {
    auto extractions = llmextract::load_extractions_csv(ctx.artifact(kExtraction));
    auto provider = make_chat_provider(ctx.cfg);
    auto templates = llmextract::PromptTemplates::load(ctx.cfg.prompts);
    auto ai = llmextract::VocabRules::ai_default();
    auto lca = llmextract::VocabRules::lca_stage_default();
    auto lcia = llmextract::VocabRules::lcia_default(ctx.cfg.lcia_methods);
    std::vector<llmextract::NormalizedRecord> normalized;
    for (const auto& record : extractions) {
        normalized.push_back(llmextract::normalize_labels(record, ai, lca, lcia,
                                                          ctx.cfg.chat, provider.get(),
                                                          templates));
    }
    llmextract::save_normalized_csv(normalized, ctx.artifact(kNormalized));
}

void stage_stats(RunContext& ctx) {
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusClean));
    auto included = included_records(records);
    std::sort(included.begin(), included.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    // specificity over titles+abstracts+keywords (docs with usable years;
    // the default partition axis is the publication period)
    std::vector<termstats::FieldedDoc> fielded;
    for (const auto& r : included) {
        if (r.year < 1900 || r.year > 2100) continue;
        fielded.push_back({r.title, r.abstract_text, r.keywords, r.year});
    }
    if (fielded.empty())
        for (const auto& r : included)
            fielded.push_back({r.title, r.abstract_text, r.keywords, r.year});
    termstats::SpecificityConfig spec_cfg;
    spec_cfg.max_terms = ctx.cfg.specificity_max_terms;
    termstats::save_term_scores_csv(termstats::specificity_rank(fielded, spec_cfg),
                                    ctx.artifact(kSpecificity));

    // contingency between the first two configured term groups
    std::vector<std::vector<std::string>> tokens;
    std::vector<int> years;
    for (const auto& r : included) {
        tokens.push_back(termstats::tokenize(r.abstract_text));
        years.push_back(r.year);
    }
    if (!ctx.cfg.term_groups.empty()) {
        auto groups = load_term_groups(ctx.cfg.term_groups);
        auto ai_it = groups.find("AI");
        auto lca_it = groups.find("LCA");
        if (ai_it != groups.end() && lca_it != groups.end()) {
            auto matrix = termstats::contingency(tokens, ai_it->second, lca_it->second);
            termstats::save_contingency_csv(matrix, ctx.artifact(kContingency));
        } else {
            write_file(ctx.artifact(kContingency),
                       "row_term,col_term,observed,expected,deviation,p,significant\n");
        }
    } else {
        write_file(ctx.artifact(kContingency),
                   "row_term,col_term,observed,expected,deviation,p,significant\n");
    }

    // term trends over 4-year periods, anchored at the earliest usable year
    std::vector<std::vector<std::string>> trend_tokens;
    std::vector<int> trend_years;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (years[i] < 1900 || years[i] > 2100) continue;
        trend_tokens.push_back(tokens[i]);
        trend_years.push_back(years[i]);
    }
    auto trends = termstats::trend_series(trend_tokens, trend_years,
                                          ctx.cfg.trend_period_years, ctx.cfg.trend_top_k);
    termstats::save_trend_csv(trends, ctx.artifact(kTrends));

    // AI topics by year from raw extracted technology labels; generic
    // labels grouped into Other, absent labels excluded
    auto extractions = llmextract::load_extractions_csv(ctx.artifact(kExtraction));
    std::map<std::string, int> year_by_id;
    for (const auto& r : records) year_by_id[r.id] = r.year;
    std::set<std::string> generic;
    for (const auto& label : ctx.cfg.generic_ai_labels)
        generic.insert(strings::to_lower_ascii(label));
    std::map<std::pair<int, std::string>, std::int64_t> topic_counts;
    for (const auto& e : extractions) {
        if (!e.ai_technology) continue;
        std::string label = *e.ai_technology;
        if (generic.count(strings::to_lower_ascii(label))) label = "Other";
        topic_counts[{year_by_id[e.doc_id], label}]++;
    }
    std::ofstream topics_out(ctx.artifact(kAiTopics), std::ios::binary);
    topics_out << csv::format_row({"year", "topic", "count"});
    for (const auto& [key, count] : topic_counts) {
        topics_out << csv::format_row(
            {std::to_string(key.first), key.second, std::to_string(count)});
    }
}

void stage_report(RunContext& ctx) {
    // scatter
    std::vector<std::string> ids;
    auto coords = manifold::load_projection_csv(ctx.artifact(kProjection2), &ids);
    std::vector<std::string> cluster_ids;
    auto assignment = densclust::load_assignment_csv(ctx.artifact(kClusters), &cluster_ids);
    if (ids != cluster_ids)
        throw PipelineError("report: projection and cluster doc ids disagree");
    auto cards = llmextract::cards_from_json(read_file(ctx.artifact(kClusterCards)));
    manifold::Projection proj;
    proj.coords = coords;
    proj.config = ctx.cfg.projection_2d;
    write_file(ctx.artifact(kScatter), emit_scatter(proj, assignment, cards));

    // cluster summary: TF-IDF phrases next to model titles
    auto phrase_rows = csv::parse_file(ctx.artifact(kClusterPhrases));
    std::map<int, std::vector<std::string>> phrases_by_cluster;
    for (std::size_t i = 1; i < phrase_rows.size(); ++i) {
        int c = std::stoi(phrase_rows[i][0]);
        if (phrases_by_cluster[c].size() < 2)
            phrases_by_cluster[c].push_back(phrase_rows[i][1]);
    }
    std::map<int, const llmextract::ClusterCard*> cards_by_id;
    for (const auto& card : cards) cards_by_id[card.cluster_id] = &card;
    std::ofstream summary(ctx.artifact(kClusterSummary), std::ios::binary);
    summary << csv::format_row({"cluster", "key_phrases", "title", "ai_summary"});
    for (const auto& [c, phrases] : phrases_by_cluster) {
        const auto* card = cards_by_id.count(c) ? cards_by_id.at(c) : nullptr;
        summary << csv::format_row({std::to_string(c), strings::join(phrases, ", "),
                                    card ? card->title : "",
                                    card ? card->ai_summary : ""});
    }

    // final PRISMA funnel
    auto records = corpus::load_jsonl(ctx.artifact(kCorpusHarvested));
    auto [oa, pub] = harvest::retrieval_split(records);
    write_file(ctx.artifact(kPrisma),
               corpus::prisma_to_json(corpus::prisma_counts(records, oa, pub)));
}

void execute_stage(Stage stage, RunContext& ctx) {
    switch (stage) {
        case Stage::ingest: stage_ingest(ctx); break;
        case Stage::screen: stage_screen(ctx); break;
        case Stage::harvest: stage_harvest(ctx); break;
        case Stage::clean: stage_clean(ctx); break;
        case Stage::embed: stage_embed(ctx); break;
        case Stage::reduce: stage_reduce(ctx); break;
        case Stage::cluster: stage_cluster(ctx); break;
        case Stage::terms: stage_terms(ctx); break;
        case Stage::label: stage_label(ctx); break;
        case Stage::extract: stage_extract(ctx); break;
        case Stage::normalize: stage_normalize(ctx); break;
        case Stage::stats: stage_stats(ctx); break;
        case Stage::report: stage_report(ctx); break;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// run()

RunManifest run(const RunConfig& config, const std::vector<Stage>& stages) {
    config.validate();
    RunContext ctx{config, config.output_dir(), std::nullopt};
    fs::create_directories(ctx.out_dir);
    if (fs::exists(config.manifest_path())) {
        try {
            ctx.previous = RunManifest::load(config.manifest_path());
        } catch (const std::exception&) {
            ctx.previous = std::nullopt;  // stale manifest: rerun everything
        }
    }

    // keep canonical order, drop duplicates
    std::vector<Stage> ordered;
    for (Stage s : all_stages()) {
        if (std::find(stages.begin(), stages.end(), s) != stages.end()) ordered.push_back(s);
    }
    if (ordered.empty()) throw PipelineError("run: no stages requested");

    RunManifest manifest;
    manifest.seed = config.seed;
    manifest.config_json = config.to_json();
    std::string config_hash = sha256::hex_digest(manifest.config_json);

    std::set<Stage> requested(ordered.begin(), ordered.end());
    for (Stage stage : ordered) {
        const StageSpec& spec = stage_specs().at(stage);

        // dependency artifacts must exist unless the producing stage runs first
        for (const auto& rel : spec.inputs) {
            if (fs::exists(ctx.artifact(rel))) continue;
            auto producer = artifact_producers().find(rel);
            std::string producer_name =
                producer != artifact_producers().end()
                    ? std::string(stage_name(producer->second))
                    : std::string("unknown");
            if (producer != artifact_producers().end() &&
                requested.count(producer->second))
                continue;  // will be produced earlier in this run
            throw DependencyError("stage '" + std::string(stage_name(stage)) +
                                  "' requires artifact '" + rel + "' produced by stage '" +
                                  producer_name + "'");
        }

        StageRecord record;
        record.started_unix_ms = now_ms();
        auto hash_inputs = [&] {
            std::map<std::string, std::string> hashes;
            hashes["__config__"] = config_hash;
            for (const auto& rel : spec.inputs)
                hashes[rel] = sha256::hex_digest_file(ctx.artifact(rel));
            // external files feeding this stage
            if (stage == Stage::ingest)
                hashes["metadata_csv"] = sha256::hex_digest_file(config.metadata_csv);
            if (stage == Stage::screen && !config.screening_json.empty())
                hashes["screening_json"] = sha256::hex_digest_file(config.screening_json);
            if (stage == Stage::stats && !config.term_groups.empty())
                hashes["term_groups"] = sha256::hex_digest_file(config.term_groups);
            if (stage == Stage::label || stage == Stage::extract ||
                stage == Stage::normalize) {
                for (const char* name :
                     {"cluster_label.txt", "extract_fields.txt", "normalize_label.txt"}) {
                    fs::path p = fs::path(config.prompts) / name;
                    if (fs::exists(p))
                        hashes[std::string("prompt:") + name] =
                            sha256::hex_digest_file(p.string());
                }
            }
            return hashes;
        };
        record.inputs = hash_inputs();

        bool can_skip = false;
        if (ctx.previous) {
            for (const auto& [name, prev] : ctx.previous->stages) {
                if (name != stage_name(stage)) continue;
                bool inputs_match = prev.inputs == record.inputs;
                bool outputs_ok = !prev.outputs.empty() || spec.outputs.empty();
                for (const auto& [rel, hash] : prev.outputs) {
                    if (!fs::exists(ctx.artifact(rel)) ||
                        sha256::hex_digest_file(ctx.artifact(rel)) != hash) {
                        outputs_ok = false;
                        break;
                    }
                }
                can_skip = inputs_match && outputs_ok;
                if (can_skip) record.outputs = prev.outputs;
                break;
            }
        }

        if (can_skip) {
            record.skipped = true;
            record.finished_unix_ms = now_ms();
            manifest.stages.emplace_back(std::string(stage_name(stage)), std::move(record));
            std::fprintf(stderr, "[litscape] %-9s skipped (up to date)\n",
                         std::string(stage_name(stage)).c_str());
            continue;
        }

        std::fprintf(stderr, "[litscape] %-9s running...\n",
                     std::string(stage_name(stage)).c_str());
        try {
            execute_stage(stage, ctx);
        } catch (...) {
            // partial manifest for completed stages
            manifest.stages.emplace_back(std::string(stage_name(stage)), std::move(record));
            fs::create_directories(fs::path(config.manifest_path()).parent_path());
            manifest.save(config.manifest_path());
            throw;
        }
        for (const auto& rel : spec.outputs) {
            if (fs::exists(ctx.artifact(rel)))
                record.outputs[rel] = sha256::hex_digest_file(ctx.artifact(rel));
        }
        record.finished_unix_ms = now_ms();
        manifest.stages.emplace_back(std::string(stage_name(stage)), std::move(record));
    }

    // merge untouched stages from the previous manifest so skipping keeps
    // working across partial runs
    if (ctx.previous) {
        for (const auto& [name, prev] : ctx.previous->stages) {
            bool present = false;
            for (const auto& [n, r] : manifest.stages) {
                if (n == name) present = true;
            }
            if (!present) manifest.stages.emplace_back(name, prev);
        }
        std::sort(manifest.stages.begin(), manifest.stages.end(),
                  [](const auto& a, const auto& b) {
                      auto idx = [](const std::string& n) {
                          const auto& order = all_stages();
                          for (std::size_t i = 0; i < order.size(); ++i)
                              if (stage_name(order[i]) == n) return i;
                          return order.size();
                      };
                      return idx(a.first) < idx(b.first);
                  });
    }

    manifest.save(config.manifest_path());
    return manifest;
}

RunManifest run_all(const RunConfig& config) { return run(config, all_stages()); }

// ---------------------------------------------------------------------------
// SVG scatter

namespace {

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
        "#e377c2", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a"};
    return colors;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string emit_scatter(const manifold::Projection& projection,
                         const densclust::ClusterAssignment& assignment,
                         const std::vector<llmextract::ClusterCard>& cards) {
    if (projection.coords.cols() != 2)
        throw PipelineError("emit_scatter: projection must have exactly 2 components");
    if (static_cast<std::size_t>(projection.coords.rows()) != assignment.labels.size())
        throw PipelineError("emit_scatter: assignment not aligned with projection");

    const int width = 1100, height = 640;
    const int plot_w = 760, plot_h = 560, margin = 40;

    double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
    const auto n = projection.coords.rows();
    if (n > 0) {
        min_x = projection.coords.col(0).minCoeff();
        max_x = projection.coords.col(0).maxCoeff();
        min_y = projection.coords.col(1).minCoeff();
        max_y = projection.coords.col(1).maxCoeff();
        if (max_x - min_x < 1e-9) max_x = min_x + 1;
        if (max_y - min_y < 1e-9) max_y = min_y + 1;
    }
    auto sx = [&](double x) {
        return margin + (x - min_x) / (max_x - min_x) * plot_w;
    };
    auto sy = [&](double y) {
        return margin + plot_h - (y - min_y) / (max_y - min_y) * plot_h;
    };

    std::map<int, std::string> titles;
    for (const auto& card : cards) titles[card.cluster_id] = card.title;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    svg += "<rect width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"white\"/>\n";
    svg += "<g stroke=\"#cccccc\" fill=\"none\"><rect x=\"" + std::to_string(margin) +
           "\" y=\"" + std::to_string(margin) + "\" width=\"" + std::to_string(plot_w) +
           "\" height=\"" + std::to_string(plot_h) + "\"/></g>\n";

    for (Eigen::Index i = 0; i < n; ++i) {
        int label = assignment.labels[static_cast<std::size_t>(i)];
        std::string color =
            label < 0 ? "#999999"
                      : palette()[static_cast<std::size_t>(label) % palette().size()];
        svg += "<circle cx=\"" + fmt2(sx(projection.coords(i, 0))) + "\" cy=\"" +
               fmt2(sy(projection.coords(i, 1))) + "\" r=\"4\" fill=\"" + color +
               "\" fill-opacity=\"0.8\"/>\n";
    }

    // legend
    int legend_x = margin + plot_w + 30;
    int legend_y = margin + 10;
    int n_clusters = assignment.cluster_count();
    for (int c = 0; c < n_clusters; ++c) {
        std::string title = titles.count(c) ? titles.at(c) : ("cluster " + std::to_string(c));
        svg += "<circle cx=\"" + std::to_string(legend_x) + "\" cy=\"" +
               std::to_string(legend_y) + "\" r=\"5\" fill=\"" +
               palette()[static_cast<std::size_t>(c) % palette().size()] + "\"/>\n";
        svg += "<text x=\"" + std::to_string(legend_x + 12) + "\" y=\"" +
               std::to_string(legend_y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + std::to_string(c) + ": " +
               escape_xml(title) + "</text>\n";
        legend_y += 22;
    }
    bool has_noise = false;
    for (int l : assignment.labels)
        if (l < 0) has_noise = true;
    if (has_noise) {
        svg += "<circle cx=\"" + std::to_string(legend_x) + "\" cy=\"" +
               std::to_string(legend_y) + "\" r=\"5\" fill=\"#999999\"/>\n";
        svg += "<text x=\"" + std::to_string(legend_x + 12) + "\" y=\"" +
               std::to_string(legend_y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">noise</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::map<std::string, std::vector<std::string>> load_term_groups(const std::string& path) {
    json j = json::parse(read_file(path));
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& [name, terms] : j.items())
        groups[name] = terms.get<std::vector<std::string>>();
    return groups;
}

void merge_providers(RunConfig& config, const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw PipelineError(std::string("providers config: ") + e.what());
    }
    if (j.contains("open_access")) config.open_access = provider_from_json(j["open_access"]);
    if (j.contains("publisher")) config.publisher = provider_from_json(j["publisher"]);
    config.publisher_prefixes = j.value("publisher_prefixes", config.publisher_prefixes);
    config.publisher_token_env = j.value("publisher_token_env", config.publisher_token_env);
}

}  // namespace litscape::pipeline
