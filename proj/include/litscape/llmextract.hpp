#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::llmextract {

struct LlmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChatConfig {
    std::string endpoint;
    std::string model_id = "mistral-7b-instruct";
    double temperature = 0.1;
    int max_tokens = 512;
    int retries = 2;
    double timeout_seconds = 60.0;
    // len(prompt) must stay under this before any request is sent
    std::size_t context_budget_chars = 20000;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    double temperature = 0.1;
    int max_tokens = 512;
    std::vector<ChatMessage> messages;

    std::string canonical_json() const;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

// POST {model, temperature, max_tokens, messages:[...]} ->
// choices[0].message.content.
std::unique_ptr<ChatProvider> make_http_chat_provider(const ChatConfig& cfg);

// Deterministic rule-based responder; the repo's offline stand-in for a
// local model server. Produces format-conformant answers derived from a
// hash of the prompt.
std::unique_ptr<ChatProvider> make_scripted_provider();

// Records (sha256(request) -> response) on disk. In replay mode a cache
// miss is an error, so CI never needs a live model.
class TranscriptCache final : public ChatProvider {
public:
    // inner == nullptr puts the cache in replay-only mode.
    TranscriptCache(std::string dir, std::unique_ptr<ChatProvider> inner);

    std::string complete(const ChatRequest& request) override;
    static std::string request_key(const ChatRequest& request);

private:
    std::string dir_;
    std::unique_ptr<ChatProvider> inner_;
};

// ---------------------------------------------------------------------------
// Strict response parsing

enum class ParseErrorKind {
    empty_response,
    wrong_line_count,
    key_mismatch,
    duplicate_key,
};

std::string_view parse_error_name(ParseErrorKind kind);

struct ParseError {
    ParseErrorKind kind = ParseErrorKind::empty_response;
    int line_count = 0;     // for wrong_line_count
    std::string detail;
};

struct ParseResult {
    std::vector<std::string> fields;
    std::optional<ParseError> error;
    bool ok() const { return !error.has_value(); }
};

// Trims blank lines and wrapper prose around the answer block. With keys,
// the block is anchored at the first line starting with keys[0] and every
// line must carry its key ("Key: value", case-insensitive); without keys,
// all non-empty lines must number exactly `expected`. Never throws.
ParseResult parse_lines(std::string_view response, int expected,
                        const std::vector<std::string>& keys = {});

// ---------------------------------------------------------------------------
// Prompt templates

struct PromptTemplates {
    std::string cluster_label;   // {{abstracts}}
    std::string extract_fields;  // {{lcia_methods}}, {{fulltext}}
    std::string normalize;       // {{category}}, {{choices}}, {{value}}

    static PromptTemplates load(const std::string& dir);
};

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values);

// ---------------------------------------------------------------------------
// Cluster labeling

struct ClusterCard {
    int cluster_id = -1;
    std::string title;
    std::string description;
    std::string ai_summary;
    int retry_count = 0;
};

// Prompts over the cluster's top abstracts (1..15) and parses exactly
// three "Title/Description/AI" lines, retrying with a corrective suffix.
ClusterCard label_cluster(const std::vector<std::string>& abstracts, const ChatConfig& cfg,
                          ChatProvider& provider, const PromptTemplates& templates);

std::string cards_to_json(const std::vector<ClusterCard>& cards);
std::vector<ClusterCard> cards_from_json(std::string_view json_text);

// ---------------------------------------------------------------------------
// Seven-field extraction

inline constexpr int kExtractionFieldCount = 7;
inline constexpr std::size_t kFulltextBudgetChars = 12000;

// Field keys in prompt order.
const std::vector<std::string>& extraction_keys();

struct ExtractionRecord {
    std::string doc_id;
    std::optional<std::string> lca_stage;
    std::optional<std::string> lcia_method;
    std::optional<std::string> application_area;
    std::optional<std::string> ai_task;
    std::optional<std::string> ai_technology;
    std::optional<std::string> impact_metrics;
    std::optional<std::string> claimed_benefit;

    std::vector<std::optional<std::string>> fields() const;
};

// Cuts at the nearest whitespace at or before `budget` characters.
std::string truncate_at_whitespace(std::string_view text, std::size_t budget);

ExtractionRecord extract_fields(const std::string& doc_id, const std::string& fulltext,
                                const std::vector<std::string>& lcia_methods,
                                const ChatConfig& cfg, ChatProvider& provider,
                                const PromptTemplates& templates);

// ---------------------------------------------------------------------------
// Controlled-vocabulary normalization

struct VocabRules {
    std::string category;               // e.g. "AI/ML technology"
    std::vector<std::string> labels;    // closed vocabulary
    // checked in order; first needle contained in the value wins
    std::vector<std::pair<std::string, std::string>> synonyms;
    std::string fallback = "Other";     // used for invalid/unresolvable values

    // Deterministic tier: exact label match, then synonym table.
    std::optional<std::string> resolve(std::string_view value) const;

    static VocabRules ai_default();
    static VocabRules lca_stage_default();
    static VocabRules lcia_default(const std::vector<std::string>& methods = {});
};

struct NormalizedRecord {
    std::string doc_id;
    std::string ai_label = "None";
    std::string lca_stage_label = "None";
    std::string lcia_label = "None";
    bool warning = false;  // transport failure fell back to the fallback label
};

// Two-tier normalization: synonym tables first, then a closed-choice chat
// prompt for unresolved values. provider == nullptr skips the model tier.
NormalizedRecord normalize_labels(const ExtractionRecord& record, const VocabRules& ai,
                                  const VocabRules& lca, const VocabRules& lcia,
                                  const ChatConfig& cfg, ChatProvider* provider,
                                  const PromptTemplates& templates);

void save_extractions_csv(const std::vector<ExtractionRecord>& records,
                          const std::string& path);
std::vector<ExtractionRecord> load_extractions_csv(const std::string& path);
void save_normalized_csv(const std::vector<NormalizedRecord>& records,
                         const std::string& path);
std::vector<NormalizedRecord> load_normalized_csv(const std::string& path);

}  // namespace litscape::llmextract
