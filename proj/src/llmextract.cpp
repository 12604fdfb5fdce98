#include "litscape/llmextract.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "litscape/util/csv.hpp"
#include "litscape/util/rng.hpp"
#include "litscape/util/sha256.hpp"
#include "litscape/util/strings.hpp"

namespace litscape::llmextract {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Requests and providers

std::string ChatRequest::canonical_json() const {
    json j;
    j["model"] = model;
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    auto& msgs = j["messages"] = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return j.dump();
}

namespace {

class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(const ChatConfig& cfg) : cfg_(cfg) {
        auto scheme_end = cfg.endpoint.find("://");
        if (scheme_end == std::string::npos)
            throw LlmError("chat endpoint must be an http(s) URL: " + cfg.endpoint);
        auto path_start = cfg.endpoint.find('/', scheme_end + 3);
        host_ = cfg.endpoint.substr(0, path_start == std::string::npos ? cfg.endpoint.size()
                                                                       : path_start);
        path_ = path_start == std::string::npos ? "/" : cfg.endpoint.substr(path_start);
    }

    std::string complete(const ChatRequest& request) override {
        httplib::Client client(host_);
        client.set_read_timeout(
            std::chrono::milliseconds(static_cast<int>(cfg_.timeout_seconds * 1000)));
        auto res = client.Post(path_, request.canonical_json(), "application/json");
        if (!res) throw LlmError("chat endpoint unreachable: " + host_);
        if (res->status != 200)
            throw LlmError("chat endpoint returned HTTP " + std::to_string(res->status));
        try {
            auto reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw LlmError(std::string("malformed chat response: ") + e.what());
        }
    }

private:
    ChatConfig cfg_;
    std::string host_;
    std::string path_;
};

}  // namespace

std::unique_ptr<ChatProvider> make_http_chat_provider(const ChatConfig& cfg) {
    return std::make_unique<HttpChatProvider>(cfg);
}

TranscriptCache::TranscriptCache(std::string dir, std::unique_ptr<ChatProvider> inner)
    : dir_(std::move(dir)), inner_(std::move(inner)) {}

std::string TranscriptCache::request_key(const ChatRequest& request) {
    return sha256::hex_digest(request.canonical_json());
}

std::string TranscriptCache::complete(const ChatRequest& request) {
    static std::mutex write_mutex;
    std::string key = request_key(request);
    fs::path path = fs::path(dir_) / (key + ".json");
    {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            try {
                return json::parse(ss.str()).at("response").get<std::string>();
            } catch (const json::exception& e) {
                throw LlmError("corrupt transcript " + path.string() + ": " + e.what());
            }
        }
    }
    if (!inner_)
        throw LlmError("transcript cache miss in replay mode (key " + key + ")");
    std::string response = inner_->complete(request);
    json entry;
    entry["request"] = json::parse(request.canonical_json());
    entry["response"] = response;
    std::lock_guard<std::mutex> lock(write_mutex);
    fs::create_directories(dir_);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LlmError("cannot write transcript " + path.string());
    out << entry.dump(2) << "\n";
    return response;
}

// ---------------------------------------------------------------------------
// parse_lines

std::string_view parse_error_name(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::empty_response: return "empty_response";
        case ParseErrorKind::wrong_line_count: return "wrong_line_count";
        case ParseErrorKind::key_mismatch: return "key_mismatch";
        case ParseErrorKind::duplicate_key: return "duplicate_key";
    }
    return "unknown";
}

namespace {

std::vector<std::string> nonempty_lines(std::string_view response) {
    std::vector<std::string> lines;
    std::string current;
    auto flush = [&] {
        std::string t = strings::trim(current);
        if (!t.empty()) lines.push_back(std::move(t));
        current.clear();
    };
    for (char c : response) {
        if (c == '\n') flush();
        else if (c != '\r') current.push_back(c);
    }
    flush();
    return lines;
}

// True when `line` is "key : value" (case-insensitive key); yields value.
bool match_key(std::string_view line, std::string_view key, std::string* value) {
    if (!strings::starts_with_ci(line, key)) return false;
    std::size_t at = key.size();
    while (at < line.size() && (line[at] == ' ' || line[at] == '\t')) ++at;
    if (at >= line.size() || line[at] != ':') return false;
    ++at;
    *value = strings::trim(line.substr(at));
    return true;
}

}  // namespace

ParseResult parse_lines(std::string_view response, int expected,
                        const std::vector<std::string>& keys) {
    ParseResult result;
    auto lines = nonempty_lines(response);
    if (lines.empty()) {
        result.error = ParseError{ParseErrorKind::empty_response, 0, "no non-empty lines"};
        return result;
    }
    if (expected <= 0) {
        result.error = ParseError{ParseErrorKind::wrong_line_count,
                                  static_cast<int>(lines.size()), "expected count must be > 0"};
        return result;
    }

    if (keys.empty()) {
        if (static_cast<int>(lines.size()) != expected) {
            result.error = ParseError{ParseErrorKind::wrong_line_count,
                                      static_cast<int>(lines.size()),
                                      "expected " + std::to_string(expected) + " lines, got " +
                                          std::to_string(lines.size())};
            return result;
        }
        result.fields = std::move(lines);
        return result;
    }

    if (static_cast<int>(keys.size()) != expected) {
        result.error = ParseError{ParseErrorKind::key_mismatch, 0,
                                  "keys/expected count mismatch in caller"};
        return result;
    }

    // anchor the block at the first line carrying keys[0]
    std::size_t anchor = lines.size();
    std::string first_value;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (match_key(lines[i], keys[0], &first_value)) {
            anchor = i;
            break;
        }
    }
    if (anchor == lines.size()) {
        result.error =
            ParseError{ParseErrorKind::key_mismatch, static_cast<int>(lines.size()),
                       "no line starts with key '" + keys[0] + ":'"};
        return result;
    }
    if (lines.size() - anchor < static_cast<std::size_t>(expected)) {
        result.error = ParseError{ParseErrorKind::wrong_line_count,
                                  static_cast<int>(lines.size() - anchor),
                                  "block has " + std::to_string(lines.size() - anchor) +
                                      " lines, expected " + std::to_string(expected)};
        return result;
    }
    result.fields.push_back(first_value);
    for (int k = 1; k < expected; ++k) {
        const std::string& line = lines[anchor + static_cast<std::size_t>(k)];
        std::string value;
        if (match_key(line, keys[static_cast<std::size_t>(k)], &value)) {
            result.fields.push_back(std::move(value));
            continue;
        }
        // diagnose: repeated earlier key, or a foreign line
        for (int seen = 0; seen <= k; ++seen) {
            std::string ignored;
            if (match_key(line, keys[static_cast<std::size_t>(seen)], &ignored)) {
                result.fields.clear();
                result.error = ParseError{ParseErrorKind::duplicate_key, 0,
                                          "key '" + keys[static_cast<std::size_t>(seen)] +
                                              "' repeated"};
                return result;
            }
        }
        result.fields.clear();
        result.error = ParseError{ParseErrorKind::key_mismatch, 0,
                                  "line " + std::to_string(k + 1) + " does not start with '" +
                                      keys[static_cast<std::size_t>(k)] + ":'"};
        return result;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Templates

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        auto open = tmpl.find("{{", i);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(i));
            break;
        }
        out.append(tmpl.substr(i, open - i));
        auto close = tmpl.find("}}", open);
        if (close == std::string_view::npos)
            throw LlmError("template: unterminated {{placeholder}}");
        std::string name(tmpl.substr(open + 2, close - open - 2));
        auto it = values.find(name);
        if (it == values.end()) throw LlmError("template: unknown placeholder " + name);
        out += it->second;
        i = close + 2;
    }
    return out;
}

namespace {
std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LlmError("cannot read template " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

PromptTemplates PromptTemplates::load(const std::string& dir) {
    PromptTemplates t;
    t.cluster_label = read_file(fs::path(dir) / "cluster_label.txt");
    t.extract_fields = read_file(fs::path(dir) / "extract_fields.txt");
    t.normalize = read_file(fs::path(dir) / "normalize_label.txt");
    return t;
}

// ---------------------------------------------------------------------------
// Cluster labeling

namespace {

const std::vector<std::string>& cluster_card_keys() {
    static const std::vector<std::string> keys = {"Title", "Description", "AI"};
    return keys;
}

std::string complete_with_retries(const std::string& prompt, int expected,
                                  const std::vector<std::string>& keys,
                                  const ChatConfig& cfg, ChatProvider& provider,
                                  std::vector<std::string>* fields, int* retry_count) {
    if (prompt.size() > cfg.context_budget_chars)
        throw LlmError("prompt exceeds context budget (" + std::to_string(prompt.size()) +
                       " > " + std::to_string(cfg.context_budget_chars) + " chars)");
    ChatRequest request;
    request.model = cfg.model_id;
    request.temperature = cfg.temperature;
    request.max_tokens = cfg.max_tokens;
    request.messages = {{"user", prompt}};

    std::string last_response;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        last_response = provider.complete(request);
        ParseResult parsed = parse_lines(last_response, expected, keys);
        if (parsed.ok()) {
            *fields = std::move(parsed.fields);
            *retry_count = attempt;
            return last_response;
        }
        if (attempt == cfg.retries) {
            throw LlmError("response format invalid after " + std::to_string(cfg.retries) +
                           " retries (" + std::string(parse_error_name(parsed.error->kind)) +
                           ": " + parsed.error->detail + "); raw response:\n" + last_response);
        }
        // corrective suffix naming the exact violation
        std::string correction =
            "\n\nYour previous reply did not follow the required format (" +
            std::string(parse_error_name(parsed.error->kind)) + ": " + parsed.error->detail +
            "). Reply again with exactly " + std::to_string(expected) +
            " lines, each starting with its field name followed by a colon.";
        request.messages = {{"user", prompt + correction}};
    }
    return last_response;  // unreachable
}

}  // namespace

ClusterCard label_cluster(const std::vector<std::string>& abstracts, const ChatConfig& cfg,
                          ChatProvider& provider, const PromptTemplates& templates) {
    if (abstracts.empty() || abstracts.size() > 15)
        throw LlmError("label_cluster: expected 1..15 abstracts, got " +
                       std::to_string(abstracts.size()));
    std::string blob;
    for (std::size_t i = 0; i < abstracts.size(); ++i) {
        blob += "Abstract " + std::to_string(i + 1) + ": " + abstracts[i] + "\n\n";
    }
    std::string prompt = render_template(templates.cluster_label, {{"abstracts", blob}});

    ClusterCard card;
    std::vector<std::string> fields;
    complete_with_retries(prompt, 3, cluster_card_keys(), cfg, provider, &fields,
                          &card.retry_count);
    card.title = fields[0];
    card.description = fields[1];
    card.ai_summary = fields[2];
    if (card.title.empty() || card.description.empty() || card.ai_summary.empty())
        throw LlmError("label_cluster: empty field in model reply");
    return card;
}

std::string cards_to_json(const std::vector<ClusterCard>& cards) {
    json j = json::array();
    for (const auto& c : cards) {
        j.push_back({{"cluster_id", c.cluster_id},
                     {"title", c.title},
                     {"description", c.description},
                     {"ai_summary", c.ai_summary},
                     {"retry_count", c.retry_count}});
    }
    return j.dump(2) + "\n";
}

std::vector<ClusterCard> cards_from_json(std::string_view json_text) {
    std::vector<ClusterCard> cards;
    for (const auto& item : json::parse(json_text)) {
        ClusterCard c;
        c.cluster_id = item.at("cluster_id").get<int>();
        c.title = item.at("title").get<std::string>();
        c.description = item.at("description").get<std::string>();
        c.ai_summary = item.at("ai_summary").get<std::string>();
        c.retry_count = item.value("retry_count", 0);
        cards.push_back(std::move(c));
    }
    return cards;
}

// ---------------------------------------------------------------------------
// Seven-field extraction

const std::vector<std::string>& extraction_keys() {
    static const std::vector<std::string> keys = {
        "LCA stage",     "LCIA method",      "Application area", "AI/ML task",
        "AI/ML technology", "Impact metrics", "Claimed benefit"};
    return keys;
}

std::vector<std::optional<std::string>> ExtractionRecord::fields() const {
    return {lca_stage,     lcia_method,    application_area, ai_task,
            ai_technology, impact_metrics, claimed_benefit};
}

std::string truncate_at_whitespace(std::string_view text, std::size_t budget) {
    if (text.size() <= budget) return std::string(text);
    std::size_t cut = budget;
    while (cut > 0 && !std::isspace(static_cast<unsigned char>(text[cut]))) --cut;
    if (cut == 0) cut = budget;  // one giant token: hard cut
    return strings::trim(text.substr(0, cut));
}

namespace {

std::optional<std::string> sentinel_to_absent(std::string value) {
    std::string t = strings::trim(value);
    if (strings::equals_ci(t, "none") || t.empty()) return std::nullopt;
    return t;
}

}  // namespace

ExtractionRecord extract_fields(const std::string& doc_id, const std::string& fulltext,
                                const std::vector<std::string>& lcia_methods,
                                const ChatConfig& cfg, ChatProvider& provider,
                                const PromptTemplates& templates) {
    if (strings::trim(fulltext).empty())
        throw LlmError("extract_fields: empty full text for doc '" + doc_id + "'");
    std::string excerpt = truncate_at_whitespace(fulltext, kFulltextBudgetChars);
    std::string methods = strings::join(lcia_methods, ", ");
    std::string prompt = render_template(templates.extract_fields,
                                         {{"lcia_methods", methods}, {"fulltext", excerpt}});

    ExtractionRecord record;
    record.doc_id = doc_id;
    std::vector<std::string> fields;
    int retry_count = 0;
    complete_with_retries(prompt, kExtractionFieldCount, extraction_keys(), cfg, provider,
                          &fields, &retry_count);
    record.lca_stage = sentinel_to_absent(fields[0]);
    record.lcia_method = sentinel_to_absent(fields[1]);
    record.application_area = sentinel_to_absent(fields[2]);
    record.ai_task = sentinel_to_absent(fields[3]);
    record.ai_technology = sentinel_to_absent(fields[4]);
    record.impact_metrics = sentinel_to_absent(fields[5]);
    record.claimed_benefit = sentinel_to_absent(fields[6]);
    return record;
}

// ---------------------------------------------------------------------------
// Controlled-vocabulary normalization

std::optional<std::string> VocabRules::resolve(std::string_view value) const {
    std::string lower = strings::to_lower_ascii(strings::trim(value));
    if (lower.empty()) return std::nullopt;
    for (const auto& label : labels) {
        if (strings::equals_ci(lower, label)) return label;
    }
    for (const auto& [needle, label] : synonyms) {
        if (lower.find(needle) != std::string::npos) return label;
    }
    return std::nullopt;
}

VocabRules VocabRules::ai_default() {
    VocabRules v;
    v.category = "AI/ML technology";
    v.labels = {"ANN",        "SVM", "LLM",        "Decision Trees",
                "Reinforcement Learning", "PCA", "Regression", "Other"};
    v.synonyms = {
        {"artificial neural network", "ANN"},
        {"neural network", "ANN"},
        {"deep learning", "ANN"},
        {"convolutional", "ANN"},
        {"lstm", "ANN"},
        {"multilayer perceptron", "ANN"},
        {"support vector", "SVM"},
        {"large language model", "LLM"},
        {"language model", "LLM"},
        {"gpt", "LLM"},
        {"bert", "LLM"},
        {"transformer", "LLM"},
        {"random forest", "Decision Trees"},
        {"decision tree", "Decision Trees"},
        {"gradient boosting", "Decision Trees"},
        {"xgboost", "Decision Trees"},
        {"boosting", "Decision Trees"},
        {"reinforcement", "Reinforcement Learning"},
        {"q-learning", "Reinforcement Learning"},
        {"principal component", "PCA"},
        {"regression", "Regression"},
    };
    v.fallback = "Other";
    return v;
}

VocabRules VocabRules::lca_stage_default() {
    VocabRules v;
    v.category = "LCA stage";
    v.labels = {"Goal & Scope Definition", "LCI", "LCIA", "Interpretation"};
    v.synonyms = {
        {"goal", "Goal & Scope Definition"},
        {"scope", "Goal & Scope Definition"},
        {"impact assessment", "LCIA"},
        {"lcia", "LCIA"},
        {"inventory", "LCI"},
        {"lci", "LCI"},
        {"interpretation", "Interpretation"},
    };
    v.fallback = "None";
    return v;
}

VocabRules VocabRules::lcia_default(const std::vector<std::string>& methods) {
    VocabRules v;
    v.category = "LCIA method";
    v.labels = methods.empty()
                   ? std::vector<std::string>{"TRACI", "ReCiPe", "CML", "IPCC",
                                              "Eco-indicator", "USEtox", "Other"}
                   : methods;
    for (const auto& label : v.labels) {
        if (label == "Other") continue;
        v.synonyms.emplace_back(strings::to_lower_ascii(label), label);
    }
    v.fallback = "Other";
    return v;
}

namespace {

std::string normalize_one(const std::optional<std::string>& value, const VocabRules& vocab,
                          const ChatConfig& cfg, ChatProvider* provider,
                          const PromptTemplates& templates, bool* warning) {
    if (!value) return "None";  // sentinel passthrough, no model call
    if (auto hit = vocab.resolve(*value)) return *hit;
    if (!provider) return vocab.fallback;

    std::vector<std::string> choices = vocab.labels;
    std::string prompt = render_template(
        templates.normalize, {{"category", vocab.category},
                              {"choices", strings::join(choices, ", ")},
                              {"value", *value}});
    ChatRequest request;
    request.model = cfg.model_id;
    request.temperature = cfg.temperature;
    request.max_tokens = 32;
    request.messages = {{"user", prompt}};
    try {
        std::string reply = strings::trim(provider->complete(request));
        for (const auto& label : vocab.labels) {
            if (strings::equals_ci(reply, label)) return label;
        }
        return vocab.fallback;  // out-of-vocabulary model output
    } catch (const LlmError&) {
        *warning = true;
        return vocab.fallback;
    }
}

}  // namespace

NormalizedRecord normalize_labels(const ExtractionRecord& record, const VocabRules& ai,
                                  const VocabRules& lca, const VocabRules& lcia,
                                  const ChatConfig& cfg, ChatProvider* provider,
                                  const PromptTemplates& templates) {
    NormalizedRecord out;
    out.doc_id = record.doc_id;
    out.ai_label = normalize_one(record.ai_technology, ai, cfg, provider, templates,
                                 &out.warning);
    out.lca_stage_label =
        normalize_one(record.lca_stage, lca, cfg, provider, templates, &out.warning);
    out.lcia_label =
        normalize_one(record.lcia_method, lcia, cfg, provider, templates, &out.warning);
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {
std::string opt_to_csv(const std::optional<std::string>& v) { return v ? *v : "None"; }
std::optional<std::string> csv_to_opt(const std::string& v) {
    if (v == "None" || v.empty()) return std::nullopt;
    return v;
}
}  // namespace

void save_extractions_csv(const std::vector<ExtractionRecord>& records,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LlmError("cannot write " + path);
    out << csv::format_row({"doc_id", "lca_stage", "lcia_method", "application_area",
                            "ai_task", "ai_technology", "impact_metrics", "claimed_benefit"});
    for (const auto& r : records) {
        out << csv::format_row({r.doc_id, opt_to_csv(r.lca_stage), opt_to_csv(r.lcia_method),
                                opt_to_csv(r.application_area), opt_to_csv(r.ai_task),
                                opt_to_csv(r.ai_technology), opt_to_csv(r.impact_metrics),
                                opt_to_csv(r.claimed_benefit)});
    }
}

std::vector<ExtractionRecord> load_extractions_csv(const std::string& path) {
    auto rows = csv::parse_file(path);
    std::vector<ExtractionRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 8) throw LlmError("bad extraction csv row in " + path);
        ExtractionRecord r;
        r.doc_id = row[0];
        r.lca_stage = csv_to_opt(row[1]);
        r.lcia_method = csv_to_opt(row[2]);
        r.application_area = csv_to_opt(row[3]);
        r.ai_task = csv_to_opt(row[4]);
        r.ai_technology = csv_to_opt(row[5]);
        r.impact_metrics = csv_to_opt(row[6]);
        r.claimed_benefit = csv_to_opt(row[7]);
        records.push_back(std::move(r));
    }
    return records;
}

void save_normalized_csv(const std::vector<NormalizedRecord>& records,
                         const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LlmError("cannot write " + path);
    out << csv::format_row({"doc_id", "ai_label", "lca_stage_label", "lcia_label", "warning"});
    for (const auto& r : records) {
        out << csv::format_row(
            {r.doc_id, r.ai_label, r.lca_stage_label, r.lcia_label, r.warning ? "1" : "0"});
    }
}

std::vector<NormalizedRecord> load_normalized_csv(const std::string& path) {
    auto rows = csv::parse_file(path);
    std::vector<NormalizedRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5) throw LlmError("bad normalized csv row in " + path);
        records.push_back({row[0], row[1], row[2], row[3], row[4] == "1"});
    }
    return records;
}

// ---------------------------------------------------------------------------
// Scripted provider

namespace {

// Deterministic content pools for the offline responder.
const std::vector<std::string>& pool_stages() {
    static const std::vector<std::string> v = {
        "Goal & Scope Definition", "Life Cycle Inventory", "Impact assessment (LCIA)",
        "Interpretation", "None"};
    return v;
}
const std::vector<std::string>& pool_methods() {
    static const std::vector<std::string> v = {"TRACI", "ReCiPe", "CML 2001", "None", "None"};
    return v;
}
const std::vector<std::string>& pool_areas() {
    static const std::vector<std::string> v = {
        "Construction materials", "Water treatment", "Energy systems",
        "Agricultural production", "Manufacturing"};
    return v;
}
const std::vector<std::string>& pool_tasks() {
    static const std::vector<std::string> v = {
        "Predicting impact factors", "Filling inventory data gaps",
        "Optimizing process parameters", "Classifying literature", "None"};
    return v;
}
const std::vector<std::string>& pool_tech() {
    static const std::vector<std::string> v = {
        "artificial neural network", "random forest classifier", "support vector machine",
        "large language model", "linear regression"};
    return v;
}
const std::vector<std::string>& pool_metrics() {
    static const std::vector<std::string> v = {
        "kg CO2-eq", "global warming potential", "cumulative energy demand", "None",
        "water footprint"};
    return v;
}
const std::vector<std::string>& pool_benefits() {
    static const std::vector<std::string> v = {
        "Reduced assessment time", "Improved prediction accuracy",
        "Lower data collection cost", "Broader scenario coverage", "None"};
    return v;
}
const std::vector<std::string>& pool_title_heads() {
    static const std::vector<std::string> v = {
        "Data-Driven Assessment of", "Predictive Modeling for", "Optimization Studies in",
        "Emission Profiling of", "Inventory Learning for"};
    return v;
}
const std::vector<std::string>& pool_title_tails() {
    static const std::vector<std::string> v = {
        "Construction Materials", "Water Treatment Systems", "Energy Conversion Processes",
        "Agricultural Supply Chains", "Industrial Manufacturing"};
    return v;
}

class ScriptedProvider final : public ChatProvider {
public:
    std::string complete(const ChatRequest& request) override {
        std::string prompt;
        for (const auto& m : request.messages) prompt += m.content;
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : prompt) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        auto pick = [&](const std::vector<std::string>& pool, int salt) -> const std::string& {
            return pool[static_cast<std::size_t>(
                rng::splitmix64(h ^ static_cast<std::uint64_t>(salt)) % pool.size())];
        };
        if (prompt.find("exactly three lines") != std::string::npos ||
            prompt.find("Title:") != std::string::npos) {
            return "Title: " + pick(pool_title_heads(), 1) + " " + pick(pool_title_tails(), 2) +
                   "\nDescription: Papers in this group study " +
                   strings::to_lower_ascii(pick(pool_title_tails(), 3)) +
                   " with quantified environmental impacts.\nAI: Models such as " +
                   pick(pool_tech(), 4) + " support estimation and optimization tasks.\n";
        }
        if (prompt.find("exactly seven lines") != std::string::npos ||
            prompt.find("LCA stage:") != std::string::npos) {
            return "LCA stage: " + pick(pool_stages(), 1) +
                   "\nLCIA method: " + pick(pool_methods(), 2) +
                   "\nApplication area: " + pick(pool_areas(), 3) +
                   "\nAI/ML task: " + pick(pool_tasks(), 4) +
                   "\nAI/ML technology: " + pick(pool_tech(), 5) +
                   "\nImpact metrics: " + pick(pool_metrics(), 6) +
                   "\nClaimed benefit: " + pick(pool_benefits(), 7) + "\n";
        }
        if (prompt.find("exactly one label") != std::string::npos) {
            // closed choice: answer with the first listed choice
            auto at = prompt.find("choices: ");
            if (at != std::string::npos) {
                auto stop = prompt.find('\n', at);
                std::string choices = prompt.substr(at + 9, stop - at - 9);
                auto comma = choices.find(',');
                return strings::trim(comma == std::string::npos ? choices
                                                                : choices.substr(0, comma));
            }
            return "Other";
        }
        return "OK";
    }
};

}  // namespace

std::unique_ptr<ChatProvider> make_scripted_provider() {
    return std::make_unique<ScriptedProvider>();
}

}  // namespace litscape::llmextract
