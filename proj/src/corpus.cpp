#include "litscape/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "litscape/util/csv.hpp"
#include "litscape/util/strings.hpp"
#include "litscape/util/xml.hpp"

namespace litscape::corpus {

using json = nlohmann::ordered_json;

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::identified: return "identified";
        case Stage::screened_in: return "screened_in";
        case Stage::screened_out: return "screened_out";
        case Stage::fulltext_ok: return "fulltext_ok";
        case Stage::fulltext_missing: return "fulltext_missing";
    }
    return "identified";
}

Stage stage_from_name(std::string_view name) {
    if (name == "identified") return Stage::identified;
    if (name == "screened_in") return Stage::screened_in;
    if (name == "screened_out") return Stage::screened_out;
    if (name == "fulltext_ok") return Stage::fulltext_ok;
    if (name == "fulltext_missing") return Stage::fulltext_missing;
    throw CorpusError("unknown stage: " + std::string(name));
}

bool stage_transition_allowed(Stage from, Stage to) {
    if (from == to) return true;
    switch (from) {
        case Stage::identified:
            return true;  // any later stage
        case Stage::screened_in:
            return to == Stage::fulltext_ok || to == Stage::fulltext_missing ||
                   to == Stage::screened_out;
        case Stage::screened_out:
        case Stage::fulltext_ok:
        case Stage::fulltext_missing:
            return false;  // terminal
    }
    return false;
}

std::string_view reason_name(ExclusionReason r) {
    switch (r) {
        case ExclusionReason::doc_type: return "doc_type";
        case ExclusionReason::language: return "language";
        case ExclusionReason::off_topic: return "off_topic";
        case ExclusionReason::no_abstract: return "no_abstract";
        case ExclusionReason::other: return "other";
    }
    return "other";
}

ExclusionReason reason_from_name(std::string_view name) {
    if (name == "doc_type") return ExclusionReason::doc_type;
    if (name == "language") return ExclusionReason::language;
    if (name == "off_topic") return ExclusionReason::off_topic;
    if (name == "no_abstract") return ExclusionReason::no_abstract;
    if (name == "other") return ExclusionReason::other;
    throw CorpusError("unknown exclusion reason: " + std::string(name));
}

bool CleaningRules::is_allowed(std::uint32_t cp) const {
    if (cp < 0x80) {
        char c = static_cast<char>(cp);
        if (std::isalnum(static_cast<unsigned char>(c))) return true;
        if (c == ' ') return true;
        return allowed_punctuation.find(c) != std::string::npos;
    }
    for (auto [lo, hi] : letter_ranges) {
        if (cp >= lo && cp <= hi) return true;
    }
    return false;
}

const CleaningRules& CleaningRules::defaults() {
    static const CleaningRules rules;
    return rules;
}

const XmlTagRules& XmlTagRules::defaults() {
    static const XmlTagRules rules;
    return rules;
}

// ---------------------------------------------------------------------------
// Cleaning

std::string clean_abstract(std::string_view text, const CleaningRules& rules) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        std::uint32_t cp = strings::decode_utf8(text, i);
        bool is_space = cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' ||
                        cp == 0x0B || cp == 0x0C;
        if (is_space) {
            pending_space = true;
            continue;
        }
        if (!rules.is_allowed(cp)) continue;
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        strings::append_utf8(out, cp);
    }
    return out;
}

namespace {

bool is_token_break(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\x0B' || c == '\x0C';
}

bool looks_like_url(std::string_view token) {
    auto lower = strings::to_lower_ascii(token);
    if (lower.rfind("http://", 0) == 0 || lower.rfind("https://", 0) == 0 ||
        lower.rfind("ftp://", 0) == 0 || lower.rfind("www.", 0) == 0)
        return true;
    return false;
}

bool looks_like_email(std::string_view token) {
    auto at = token.find('@');
    if (at == std::string_view::npos || at == 0 || at + 1 >= token.size()) return false;
    auto dot = token.find('.', at + 2);
    return dot != std::string_view::npos && dot + 1 < token.size();
}

bool looks_like_doi(std::string_view token) {
    auto lower = strings::to_lower_ascii(token);
    std::string_view t = lower;
    if (t.rfind("doi:", 0) == 0) return true;
    // 10.NNNN/suffix
    if (t.rfind("10.", 0) == 0) {
        std::size_t k = 3;
        std::size_t digits = 0;
        while (k < t.size() && std::isdigit(static_cast<unsigned char>(t[k]))) {
            ++k;
            ++digits;
        }
        return digits >= 4 && k < t.size() && t[k] == '/';
    }
    return false;
}

// Strips surrounding punctuation so "(https://x.y)." still matches.
std::string_view token_core(std::string_view token) {
    std::size_t b = 0, e = token.size();
    auto is_edge = [](char c) {
        return c == '(' || c == ')' || c == '[' || c == ']' || c == '.' || c == ',' ||
               c == ';' || c == ':' || c == '<' || c == '>' || c == '"' || c == '\'';
    };
    while (b < e && is_edge(token[b])) ++b;
    while (e > b && is_edge(token[e - 1])) --e;
    return token.substr(b, e - b);
}

std::string remove_identifier_tokens(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_token_break(text[i])) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && !is_token_break(text[i])) ++i;
        std::string_view token = text.substr(start, i - start);
        std::string_view core = token_core(token);
        if (looks_like_url(core) || looks_like_email(core) || looks_like_doi(core))
            continue;  // drop the token, keep the following break
        out.append(token);
    }
    return out;
}

std::string rejoin_hyphen_linebreaks(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '-') {
            std::size_t j = i + 1;
            while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r'))
                ++j;
            if (j < text.size() && text[j] == '\n') {
                ++j;
                while (j < text.size() && (text[j] == ' ' || text[j] == '\t' ||
                                           text[j] == '\r' || text[j] == '\n'))
                    ++j;
                i = j - 1;  // hyphen and break both dropped, word halves join
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string clean_fulltext(std::string_view text, const CleaningRules& rules) {
    std::string rejoined = rejoin_hyphen_linebreaks(text);
    std::string no_ids = remove_identifier_tokens(rejoined);
    return clean_abstract(no_ids, rules);
}

// ---------------------------------------------------------------------------
// XML full text

std::optional<FullText> extract_xml_fulltext(std::string_view xml_text,
                                             const XmlTagRules& tags,
                                             const CleaningRules& rules) {
    auto root = xml::parse(xml_text);
    for (const auto& candidate : tags.candidates) {
        if (const xml::Element* el = xml::find_first(*root, candidate)) {
            FullText ft;
            ft.source_format = SourceFormat::xml;
            std::string raw = el->text_content();
            ft.raw_chars = static_cast<std::int64_t>(raw.size());
            ft.cleaned_text = clean_fulltext(raw, rules);
            return ft;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

// Canonical column -> accepted header spellings (case-insensitive).
const std::map<std::string, std::vector<std::string>>& column_aliases() {
    static const std::map<std::string, std::vector<std::string>> aliases = {
        {"id", {"id", "eid", "record id"}},
        {"doi", {"doi"}},
        {"title", {"title", "document title"}},
        {"abstract", {"abstract"}},
        {"keywords", {"keywords", "author keywords", "index keywords"}},
        {"year", {"year", "publication year"}},
        {"venue", {"venue", "source title", "journal"}},
    };
    return aliases;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& canonical) {
    const auto& names = column_aliases().at(canonical);
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string h = strings::trim(header[i]);
        for (const auto& name : names) {
            if (strings::equals_ci(h, name)) return i;
        }
    }
    return std::nullopt;
}

}  // namespace

IngestResult ingest_metadata_text(std::string_view csv_text) {
    auto rows = csv::parse(csv_text);
    if (rows.empty()) throw CorpusError("metadata csv: missing header row");
    const auto& header = rows.front();

    auto title_col = find_column(header, "title");
    auto abstract_col = find_column(header, "abstract");
    auto year_col = find_column(header, "year");
    if (!title_col || !abstract_col || !year_col) {
        std::string missing;
        if (!title_col) missing += " Title";
        if (!abstract_col) missing += " Abstract";
        if (!year_col) missing += " Year";
        throw CorpusError("metadata csv: missing mandatory column(s):" + missing);
    }
    auto id_col = find_column(header, "id");
    auto doi_col = find_column(header, "doi");
    auto keywords_col = find_column(header, "keywords");
    auto venue_col = find_column(header, "venue");

    IngestResult result;
    std::unordered_set<std::string> seen_ids;
    auto cell = [](const std::vector<std::string>& row, std::size_t col) -> std::string {
        return col < row.size() ? strings::trim(row[col]) : std::string();
    };

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && strings::trim(row[0]).empty()) continue;

        DocumentRecord rec;
        if (id_col) rec.id = cell(row, *id_col);
        if (rec.id.empty()) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "doc-%04zu", r);
            rec.id = buf;
        }
        if (!seen_ids.insert(rec.id).second)
            throw CorpusError("metadata csv: duplicate id '" + rec.id + "'");

        rec.title = cell(row, *title_col);
        rec.abstract_text = cell(row, *abstract_col);
        std::string year_str = cell(row, *year_col);
        if (!year_str.empty()) {
            try {
                rec.year = std::stoi(year_str);
            } catch (const std::exception&) {
                throw CorpusError("metadata csv: bad year '" + year_str + "' in row " +
                                  std::to_string(r + 1));
            }
        }
        if (rec.year != 0 && (rec.year < 1900 || rec.year > 2100))
            throw CorpusError("metadata csv: year out of range in row " + std::to_string(r + 1));

        if (doi_col) {
            std::string doi = cell(row, *doi_col);
            if (!doi.empty()) rec.doi = doi;
        }
        if (keywords_col) {
            for (auto& kw : strings::split(cell(row, *keywords_col), ';')) {
                std::string t = strings::trim(kw);
                if (!t.empty()) rec.keywords.push_back(t);
            }
        }
        if (venue_col) rec.venue = cell(row, *venue_col);
        rec.stage = Stage::identified;

        if (rec.abstract_text.empty()) {
            result.excludable.push_back(
                {rec.id, Verdict::exclude, ExclusionReason::no_abstract});
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

IngestResult ingest_metadata(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("metadata csv: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ingest_metadata_text(ss.str());
}

// ---------------------------------------------------------------------------
// Screening

ScreeningResult apply_screening(std::vector<DocumentRecord>& records,
                                const std::vector<ScreeningDecision>& decisions) {
    std::unordered_map<std::string, DocumentRecord*> by_id;
    for (auto& rec : records) by_id[rec.id] = &rec;

    for (const auto& decision : decisions) {
        auto it = by_id.find(decision.doc_id);
        if (it == by_id.end())
            throw CorpusError("screening decision for unknown id '" + decision.doc_id + "'");
        DocumentRecord& rec = *it->second;
        Stage target = decision.verdict == Verdict::exclude ? Stage::screened_out
                                                            : Stage::screened_in;
        if (rec.stage == target) continue;
        // Re-applying decisions to records already past screening is a
        // no-op rather than an error; the funnel never runs backward.
        if (!stage_transition_allowed(rec.stage, target)) continue;
        rec.stage = target;
    }
    // Survivors of the read-through are included.
    for (auto& rec : records) {
        if (rec.stage == Stage::identified) rec.stage = Stage::screened_in;
    }
    return {prisma_counts(records)};
}

PrismaCounts prisma_counts(const std::vector<DocumentRecord>& records,
                           std::int64_t open_access_retrieved,
                           std::int64_t publisher_retrieved) {
    PrismaCounts counts;
    counts.identified = static_cast<std::int64_t>(records.size());
    counts.open_access_retrieved = open_access_retrieved;
    counts.publisher_retrieved = publisher_retrieved;
    for (const auto& rec : records) {
        bool included = rec.stage == Stage::screened_in || rec.stage == Stage::fulltext_ok ||
                        rec.stage == Stage::fulltext_missing;
        if (!included) continue;
        ++counts.screened_included;
        if (rec.doi) ++counts.with_doi;
        if (rec.stage == Stage::fulltext_ok) ++counts.fulltext_total;
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json record_to_json(const DocumentRecord& rec) {
    json j;
    j["id"] = rec.id;
    if (rec.doi) j["doi"] = *rec.doi;
    j["title"] = rec.title;
    j["abstract"] = rec.abstract_text;
    j["keywords"] = rec.keywords;
    j["year"] = rec.year;
    j["venue"] = rec.venue;
    j["stage"] = std::string(stage_name(rec.stage));
    if (rec.fulltext) {
        j["fulltext"] = {
            {"source_format", rec.fulltext->source_format == SourceFormat::xml ? "xml" : "plain"},
            {"raw_chars", rec.fulltext->raw_chars},
            {"cleaned_text", rec.fulltext->cleaned_text},
        };
    }
    return j;
}

DocumentRecord record_from_json(const json& j) {
    DocumentRecord rec;
    rec.id = j.at("id").get<std::string>();
    if (j.contains("doi")) rec.doi = j.at("doi").get<std::string>();
    rec.title = j.at("title").get<std::string>();
    rec.abstract_text = j.at("abstract").get<std::string>();
    rec.keywords = j.value("keywords", std::vector<std::string>{});
    rec.year = j.value("year", 0);
    rec.venue = j.value("venue", std::string());
    rec.stage = stage_from_name(j.at("stage").get<std::string>());
    if (j.contains("fulltext")) {
        FullText ft;
        const auto& f = j.at("fulltext");
        ft.source_format =
            f.at("source_format").get<std::string>() == "xml" ? SourceFormat::xml
                                                              : SourceFormat::plain;
        ft.raw_chars = f.at("raw_chars").get<std::int64_t>();
        ft.cleaned_text = f.at("cleaned_text").get<std::string>();
        rec.fulltext = std::move(ft);
    }
    return rec;
}

}  // namespace

std::string to_jsonl(const std::vector<DocumentRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += record_to_json(rec).dump();
        out.push_back('\n');
    }
    return out;
}

std::vector<DocumentRecord> from_jsonl(std::string_view text) {
    std::vector<DocumentRecord> records;
    std::unordered_set<std::string> seen;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (strings::trim(line).empty()) continue;
        DocumentRecord rec;
        try {
            rec = record_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw CorpusError(std::string("corpus jsonl: ") + e.what());
        }
        if (rec.fulltext && rec.stage != Stage::fulltext_ok)
            throw CorpusError("corpus jsonl: fulltext present but stage is not fulltext_ok for '" +
                              rec.id + "'");
        if (!seen.insert(rec.id).second)
            throw CorpusError("corpus jsonl: duplicate id '" + rec.id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

void save_jsonl(const std::vector<DocumentRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError("cannot write " + path);
    out << to_jsonl(records);
}

std::vector<DocumentRecord> load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_jsonl(ss.str());
}

std::string prisma_to_json(const PrismaCounts& c) {
    json j;
    j["identified"] = c.identified;
    j["screened_included"] = c.screened_included;
    j["with_doi"] = c.with_doi;
    j["open_access_retrieved"] = c.open_access_retrieved;
    j["publisher_retrieved"] = c.publisher_retrieved;
    j["fulltext_total"] = c.fulltext_total;
    return j.dump(2) + "\n";
}

PrismaCounts prisma_from_json(std::string_view text) {
    json j = json::parse(text);
    PrismaCounts c;
    c.identified = j.at("identified").get<std::int64_t>();
    c.screened_included = j.at("screened_included").get<std::int64_t>();
    c.with_doi = j.at("with_doi").get<std::int64_t>();
    c.open_access_retrieved = j.at("open_access_retrieved").get<std::int64_t>();
    c.publisher_retrieved = j.at("publisher_retrieved").get<std::int64_t>();
    c.fulltext_total = j.at("fulltext_total").get<std::int64_t>();
    if (c.fulltext_total != c.open_access_retrieved + c.publisher_retrieved)
        throw CorpusError("prisma counts: fulltext_total != open_access + publisher");
    return c;
}

std::vector<ScreeningDecision> decisions_from_json(std::string_view text) {
    json j = json::parse(text);
    std::vector<ScreeningDecision> decisions;
    for (const auto& item : j) {
        ScreeningDecision d;
        d.doc_id = item.at("doc_id").get<std::string>();
        std::string verdict = item.at("verdict").get<std::string>();
        if (verdict == "include") d.verdict = Verdict::include;
        else if (verdict == "exclude") d.verdict = Verdict::exclude;
        else throw CorpusError("screening json: bad verdict '" + verdict + "'");
        if (d.verdict == Verdict::exclude)
            d.reason = reason_from_name(item.at("reason").get<std::string>());
        decisions.push_back(std::move(d));
    }
    return decisions;
}

}  // namespace litscape::corpus
