#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::corpus {

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Screening funnel; transitions only move forward.
enum class Stage {
    identified,
    screened_in,
    screened_out,
    fulltext_ok,
    fulltext_missing,
};

std::string_view stage_name(Stage s);
Stage stage_from_name(std::string_view name);

// Returns true iff a record may move from `from` to `to`.
bool stage_transition_allowed(Stage from, Stage to);

enum class SourceFormat { xml, plain };

struct FullText {
    SourceFormat source_format = SourceFormat::plain;
    std::int64_t raw_chars = 0;
    std::string cleaned_text;
};

struct DocumentRecord {
    std::string id;
    std::optional<std::string> doi;
    std::string title;
    std::string abstract_text;
    std::vector<std::string> keywords;
    int year = 0;
    std::string venue;
    Stage stage = Stage::identified;
    std::optional<FullText> fulltext;
};

enum class ExclusionReason { doc_type, language, off_topic, no_abstract, other };

std::string_view reason_name(ExclusionReason r);
ExclusionReason reason_from_name(std::string_view name);

enum class Verdict { include, exclude };

struct ScreeningDecision {
    std::string doc_id;
    Verdict verdict = Verdict::exclude;
    ExclusionReason reason = ExclusionReason::other;
};

struct PrismaCounts {
    std::int64_t identified = 0;
    std::int64_t screened_included = 0;
    std::int64_t with_doi = 0;
    std::int64_t open_access_retrieved = 0;
    std::int64_t publisher_retrieved = 0;
    std::int64_t fulltext_total = 0;
};

// The character and pattern table behind the cleaning functions. The
// defaults implement: keep letters, digits, and . , ; : ( ) - % ; drop
// everything else; URLs, emails and DOIs are removed as whole tokens.
struct CleaningRules {
    std::string allowed_punctuation = ".,;:()-%";
    // Non-ASCII code points in these inclusive ranges count as letters
    // (Latin-1 supplement through Latin Extended-B by default).
    std::vector<std::pair<std::uint32_t, std::uint32_t>> letter_ranges = {
        {0x00C0, 0x00FF}, {0x0100, 0x024F}};

    bool is_allowed(std::uint32_t cp) const;

    static const CleaningRules& defaults();
};

// Ordered candidate tags for XML full-text extraction; first match wins.
// Matches either the qualified tag name or its local part.
struct XmlTagRules {
    std::vector<std::string> candidates = {"body", "sections", "rawtext"};
    static const XmlTagRules& defaults();
};

struct IngestResult {
    std::vector<DocumentRecord> records;
    // Prebuilt exclude decisions for rows without an abstract.
    std::vector<ScreeningDecision> excludable;
};

// Reads a CSV metadata export. Header names are matched case-insensitively
// against an alias table (see column_aliases in corpus.cpp); Title,
// Abstract, and Year are mandatory. Rows without an id column get
// synthesized ids doc-0001, doc-0002, ...
IngestResult ingest_metadata(const std::string& path);
IngestResult ingest_metadata_text(std::string_view csv_text);

struct ScreeningResult {
    PrismaCounts counts;
};

// Applies exclude decisions (stage -> screened_out, reason recorded) and
// moves every remaining identified record to screened_in. Idempotent;
// never moves a record backward.
ScreeningResult apply_screening(std::vector<DocumentRecord>& records,
                                const std::vector<ScreeningDecision>& decisions);

// Recomputes the PRISMA funnel from record stages. Retrieval-split counts
// (open access vs publisher) are taken from the caller because they live
// in the harvest ledger.
PrismaCounts prisma_counts(const std::vector<DocumentRecord>& records,
                           std::int64_t open_access_retrieved = 0,
                           std::int64_t publisher_retrieved = 0);

std::string clean_abstract(std::string_view text,
                           const CleaningRules& rules = CleaningRules::defaults());

// clean_abstract plus URL/email/DOI token removal and hyphen-newline
// word rejoining ("assess-\nment" -> "assessment").
std::string clean_fulltext(std::string_view text,
                           const CleaningRules& rules = CleaningRules::defaults());

// Extracts the full-text body from publisher XML. Returns nullopt when no
// candidate tag matches (callers mark the record fulltext_missing);
// throws xml::XmlError on malformed input.
std::optional<FullText> extract_xml_fulltext(
    std::string_view xml_text, const XmlTagRules& tags = XmlTagRules::defaults(),
    const CleaningRules& rules = CleaningRules::defaults());

// JSON-lines persistence, one DocumentRecord per line, keys sorted.
std::string to_jsonl(const std::vector<DocumentRecord>& records);
std::vector<DocumentRecord> from_jsonl(std::string_view text);
void save_jsonl(const std::vector<DocumentRecord>& records, const std::string& path);
std::vector<DocumentRecord> load_jsonl(const std::string& path);

std::string prisma_to_json(const PrismaCounts& counts);
PrismaCounts prisma_from_json(std::string_view json_text);

std::vector<ScreeningDecision> decisions_from_json(std::string_view json_text);

}  // namespace litscape::corpus
