#include "litscape/termstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "litscape/util/csv.hpp"
#include "litscape/util/strings.hpp"

namespace litscape::termstats {

// ---------------------------------------------------------------------------
// Tokenization

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "also", "am", "an",
        "and", "any", "are", "aren", "as", "at", "be", "because", "been", "before",
        "being", "below", "between", "both", "but", "by", "can", "cannot", "could",
        "did", "do", "does", "doing", "down", "during", "each", "et", "etc", "few",
        "for", "from", "further", "had", "has", "have", "having", "he", "her", "here",
        "hers", "herself", "him", "himself", "his", "how", "however", "i", "if", "in",
        "into", "is", "it", "its", "itself", "just", "may", "me", "might", "more",
        "most", "must", "my", "myself", "no", "nor", "not", "of", "off", "on", "once",
        "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "per",
        "results", "same", "she", "should", "since", "so", "some", "such", "than",
        "that", "the", "their", "theirs", "them", "themselves", "then", "there",
        "these", "they", "this", "those", "through", "thus", "to", "too", "under",
        "until", "up", "upon", "us", "used", "using", "very", "via", "was", "we",
        "were", "what", "when", "where", "which", "while", "who", "whom", "why",
        "will", "with", "within", "without", "would", "you", "your", "yours",
        "yourself", "yourselves"};
    return words;
}

bool is_stopword(std::string_view token) {
    return stopwords().count(std::string(token)) > 0;
}

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::size_t codepoint_length(std::string_view token) {
    std::size_t count = 0, i = 0;
    while (i < token.size()) {
        strings::decode_utf8(token, i);
        ++count;
    }
    return count;
}

bool keep_token(const std::string& token, bool keep_stopwords) {
    if (token.empty()) return false;
    if (codepoint_length(token) <= 1) return false;
    return keep_stopwords || !is_stopword(token);
}

bool is_segment_break(unsigned char c) {
    return c == '.' || c == ';' || c == ':' || c == '!' || c == '?' || c == '(' ||
           c == ')' || c == '[' || c == ']';
}

}  // namespace

std::vector<std::vector<std::string>> tokenize_segments(std::string_view text,
                                                        bool keep_stopwords) {
    std::vector<std::vector<std::string>> segments(1);
    std::string current;
    auto flush_token = [&] {
        // trim hyphens that ended up at the edges
        while (!current.empty() && current.front() == '-') current.erase(current.begin());
        while (!current.empty() && current.back() == '-') current.pop_back();
        if (keep_token(current, keep_stopwords)) segments.back().push_back(current);
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
            continue;
        }
        if (c == '-' && !current.empty() && i + 1 < text.size() &&
            is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
            current.push_back('-');
            continue;
        }
        flush_token();
        if (is_segment_break(c) && !segments.back().empty()) segments.emplace_back();
    }
    flush_token();
    if (segments.back().empty()) segments.pop_back();
    return segments;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for (auto& segment : tokenize_segments(text)) {
        for (auto& token : segment) tokens.push_back(std::move(token));
    }
    return tokens;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& docs) {
    Vocabulary v;
    for (const auto& doc : docs) {
        std::set<std::string> seen(doc.begin(), doc.end());
        for (const auto& term : seen) ++v.document_frequency[term];
    }
    int next_id = 0;
    for (const auto& [term, df] : v.document_frequency) v.term_ids[term] = next_id++;
    return v;
}

// ---------------------------------------------------------------------------
// TF-IDF

namespace {

// Shared scorer over generic per-document term counts.
std::vector<TermScore> tfidf_rank(
    const std::vector<std::unordered_map<std::string, std::int64_t>>& doc_counts,
    const std::vector<std::int64_t>& doc_lengths, const std::vector<int>& cluster,
    int top_n) {
    const auto n_docs = static_cast<double>(doc_counts.size());
    std::unordered_map<std::string, int> df;
    for (const auto& counts : doc_counts) {
        for (const auto& [term, count] : counts) ++df[term];
    }
    std::unordered_map<std::string, double> score_sum;
    std::unordered_map<std::string, std::int64_t> cluster_freq;
    for (int idx : cluster) {
        const auto& counts = doc_counts[static_cast<std::size_t>(idx)];
        double len = static_cast<double>(doc_lengths[static_cast<std::size_t>(idx)]);
        if (len <= 0) continue;
        for (const auto& [term, count] : counts) {
            double tf = static_cast<double>(count) / len;
            double idf = std::log((1.0 + n_docs) /
                                  (1.0 + static_cast<double>(df[term]))) + 1.0;
            score_sum[term] += tf * idf;
            cluster_freq[term] += count;
        }
    }
    std::vector<TermScore> scores;
    scores.reserve(score_sum.size());
    const auto cluster_size = static_cast<double>(cluster.size());
    for (const auto& [term, sum] : score_sum) {
        scores.push_back({term, sum / cluster_size, cluster_freq[term]});
    }
    std::sort(scores.begin(), scores.end(), [](const TermScore& a, const TermScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (top_n >= 0 && scores.size() > static_cast<std::size_t>(top_n))
        scores.resize(static_cast<std::size_t>(top_n));
    return scores;
}

std::vector<std::unordered_map<std::string, std::int64_t>> count_tokens(
    const std::vector<std::vector<std::string>>& docs) {
    std::vector<std::unordered_map<std::string, std::int64_t>> counts(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        for (const auto& token : docs[i]) ++counts[i][token];
    }
    return counts;
}

}  // namespace

std::vector<TermScore> tfidf_cluster_terms(
    const std::vector<std::vector<std::string>>& corpus_tokens,
    const std::vector<int>& cluster_doc_indices, int top_n) {
    if (cluster_doc_indices.empty())
        throw TermstatsError("tfidf_cluster_terms: empty cluster");
    auto counts = count_tokens(corpus_tokens);
    std::vector<std::int64_t> lengths(corpus_tokens.size());
    for (std::size_t i = 0; i < corpus_tokens.size(); ++i)
        lengths[i] = static_cast<std::int64_t>(corpus_tokens[i].size());
    return tfidf_rank(counts, lengths, cluster_doc_indices, top_n);
}

// ---------------------------------------------------------------------------
// Phrases

namespace {

std::vector<std::string> doc_phrases(const std::string& text, const PhraseConfig& cfg,
                                     const std::unordered_set<std::string>& blocked) {
    std::vector<std::string> phrases;
    for (const auto& segment : tokenize_segments(text, /*keep_stopwords=*/true)) {
        const auto len = segment.size();
        for (std::size_t start = 0; start < len; ++start) {
            for (int n = cfg.nmin; n <= cfg.nmax; ++n) {
                if (start + static_cast<std::size_t>(n) > len) break;
                const std::string& first = segment[start];
                const std::string& last = segment[start + static_cast<std::size_t>(n) - 1];
                if (is_stopword(first) || is_stopword(last)) continue;
                std::string phrase = first;
                for (int k = 1; k < n; ++k) {
                    phrase += ' ';
                    phrase += segment[start + static_cast<std::size_t>(k)];
                }
                if (blocked.count(phrase)) continue;
                phrases.push_back(std::move(phrase));
            }
        }
    }
    return phrases;
}

}  // namespace

std::vector<std::vector<std::string>> phrase_candidates(
    const std::vector<std::string>& texts, const PhraseConfig& cfg) {
    std::unordered_set<std::string> blocked(cfg.blocklist.begin(), cfg.blocklist.end());
    std::vector<std::vector<std::string>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(doc_phrases(text, cfg, blocked));
    return out;
}

std::vector<TermScore> extract_phrases(const std::vector<std::string>& texts, int top_n,
                                       const PhraseConfig& cfg) {
    auto per_doc = phrase_candidates(texts, cfg);
    auto counts = count_tokens(per_doc);
    std::vector<std::int64_t> lengths(per_doc.size());
    std::vector<int> all_docs;
    for (std::size_t i = 0; i < per_doc.size(); ++i) {
        lengths[i] = static_cast<std::int64_t>(per_doc[i].size());
        all_docs.push_back(static_cast<int>(i));
    }
    return tfidf_rank(counts, lengths, all_docs, top_n);
}

// ---------------------------------------------------------------------------
// Chi-square and the incomplete gamma function

namespace {

constexpr int kGammaMaxIter = 500;
constexpr double kGammaEps = 1e-15;

// Lower regularized incomplete gamma P(s, x) by series expansion
// (converges fast for x < s + 1).
double gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < kGammaMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kGammaEps) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper regularized incomplete gamma Q(s, x) by modified Lentz continued
// fraction (x >= s + 1).
double gamma_q_contfrac(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kGammaMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kGammaEps) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double gamma_q(double s, double x) {
    if (s <= 0) throw TermstatsError("gamma_q: s must be positive");
    if (x < 0) throw TermstatsError("gamma_q: x must be nonnegative");
    if (x == 0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_contfrac(s, x);
}

ChiSquareResult chi_square(const Eigen::MatrixXd& observed) {
    const auto r = observed.rows();
    const auto c = observed.cols();
    if (r < 2 || c < 2) throw TermstatsError("chi_square: table must be at least 2x2");
    if ((observed.array() < 0).any())
        throw TermstatsError("chi_square: counts must be nonnegative");

    Eigen::VectorXd row_sums = observed.rowwise().sum();
    Eigen::VectorXd col_sums = observed.colwise().sum();
    double total = observed.sum();
    if (total <= 0) throw TermstatsError("chi_square: empty table");
    if ((row_sums.array() == 0).any() || (col_sums.array() == 0).any())
        throw TermstatsError("chi_square: degenerate margins (all-zero row or column)");

    double chi2 = 0;
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            double expected = row_sums[i] * col_sums[j] / total;
            double diff = observed(i, j) - expected;
            chi2 += diff * diff / expected;
        }
    }
    ChiSquareResult result;
    result.chi2 = chi2;
    result.dof = static_cast<int>((r - 1) * (c - 1));
    result.p = gamma_q(static_cast<double>(result.dof) / 2.0, chi2 / 2.0);
    return result;
}

// ---------------------------------------------------------------------------
// Specificity ranking

std::vector<TermScore> specificity_rank(const std::vector<FieldedDoc>& docs,
                                        const SpecificityConfig& cfg) {
    if (docs.empty()) throw TermstatsError("specificity_rank: empty corpus");

    // Partition the documents in two groups.
    std::vector<int> group(docs.size(), 0);
    if (cfg.partition == PartitionAxis::period) {
        std::vector<int> years;
        for (const auto& d : docs) years.push_back(d.year);
        std::vector<int> sorted_years = years;
        std::sort(sorted_years.begin(), sorted_years.end());
        int median = sorted_years[sorted_years.size() / 2];
        for (std::size_t i = 0; i < docs.size(); ++i) group[i] = years[i] >= median ? 1 : 0;
    }
    // PartitionAxis::field handled below by doubling the doc list.

    struct TermStats {
        std::int64_t in_a = 0;
        std::int64_t in_b = 0;
    };
    std::unordered_map<std::string, TermStats> stats;
    std::int64_t n_a = 0, n_b = 0;

    auto doc_text = [](const FieldedDoc& d) {
        std::string text = d.title + ". " + d.abstract_text;
        for (const auto& kw : d.keywords) {
            text += ". ";
            text += kw;
        }
        return text;
    };

    if (cfg.partition == PartitionAxis::field) {
        // title+keywords vs abstract
        for (const auto& d : docs) {
            std::string tk = d.title;
            for (const auto& kw : d.keywords) {
                tk += ". ";
                tk += kw;
            }
            auto a_phrases = phrase_candidates({tk}, cfg.phrases)[0];
            auto b_phrases = phrase_candidates({d.abstract_text}, cfg.phrases)[0];
            std::set<std::string> in_a(a_phrases.begin(), a_phrases.end());
            std::set<std::string> in_b(b_phrases.begin(), b_phrases.end());
            ++n_a;
            ++n_b;
            for (const auto& t : in_a) ++stats[t].in_a;
            for (const auto& t : in_b) ++stats[t].in_b;
        }
    } else {
        std::vector<std::string> texts;
        texts.reserve(docs.size());
        for (const auto& d : docs) texts.push_back(doc_text(d));
        auto per_doc = phrase_candidates(texts, cfg.phrases);
        for (std::size_t i = 0; i < docs.size(); ++i) {
            std::set<std::string> present(per_doc[i].begin(), per_doc[i].end());
            if (group[i] == 0) ++n_a;
            else ++n_b;
            for (const auto& t : present) {
                if (group[i] == 0) ++stats[t].in_a;
                else ++stats[t].in_b;
            }
        }
    }

    std::vector<TermScore> scores;
    scores.reserve(stats.size());
    for (const auto& [term, st] : stats) {
        std::int64_t present = st.in_a + st.in_b;
        Eigen::MatrixXd table(2, 2);
        table << static_cast<double>(st.in_a), static_cast<double>(n_a - st.in_a),
            static_cast<double>(st.in_b), static_cast<double>(n_b - st.in_b);
        double chi2 = 0;
        // rows here are the partition groups, columns presence/absence
        Eigen::MatrixXd t2 = table.transpose();
        Eigen::VectorXd rs = t2.rowwise().sum();
        Eigen::VectorXd cs = t2.colwise().sum();
        double total = t2.sum();
        bool degenerate = (rs.array() == 0).any() || (cs.array() == 0).any() || total <= 0;
        if (!degenerate) {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double expected = rs[i] * cs[j] / total;
                    double diff = t2(i, j) - expected;
                    chi2 += diff * diff / expected;
                }
        }
        scores.push_back({term, chi2, present});
    }
    std::sort(scores.begin(), scores.end(), [](const TermScore& a, const TermScore& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.term < b.term;
    });
    if (scores.size() > static_cast<std::size_t>(cfg.max_terms))
        scores.resize(static_cast<std::size_t>(cfg.max_terms));
    return scores;
}

// ---------------------------------------------------------------------------
// Contingency

bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase) {
    if (phrase.empty() || tokens.size() < phrase.size()) return false;
    for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
        bool match = true;
        for (std::size_t k = 0; k < phrase.size(); ++k) {
            if (tokens[start + k] != phrase[k]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

ContingencyMatrix contingency(const std::vector<std::vector<std::string>>& doc_tokens,
                              const std::vector<std::string>& group_a,
                              const std::vector<std::string>& group_b) {
    if (group_a.empty() || group_b.empty())
        throw TermstatsError("contingency: both term groups must be non-empty");

    auto presence = [&](const std::string& term) {
        std::vector<bool> out(doc_tokens.size(), false);
        auto phrase = tokenize(term);
        std::int64_t count = 0;
        for (std::size_t i = 0; i < doc_tokens.size(); ++i) {
            if (contains_phrase(doc_tokens[i], phrase)) {
                out[i] = true;
                ++count;
            }
        }
        return std::make_pair(out, count);
    };

    ContingencyMatrix m;
    std::vector<std::vector<bool>> a_presence, b_presence;
    for (const auto& term : group_a) {
        auto [pres, count] = presence(term);
        if (count == 0) {
            m.dropped_terms.push_back(term);
            continue;
        }
        m.row_terms.push_back(term);
        a_presence.push_back(std::move(pres));
    }
    for (const auto& term : group_b) {
        auto [pres, count] = presence(term);
        if (count == 0) {
            m.dropped_terms.push_back(term);
            continue;
        }
        m.col_terms.push_back(term);
        b_presence.push_back(std::move(pres));
    }
    const auto rows = static_cast<Eigen::Index>(m.row_terms.size());
    const auto cols = static_cast<Eigen::Index>(m.col_terms.size());
    if (rows == 0 || cols == 0)
        throw TermstatsError("contingency: no group terms present in corpus");

    m.observed.setZero(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            std::int64_t both = 0;
            for (std::size_t d = 0; d < doc_tokens.size(); ++d) {
                if (a_presence[static_cast<std::size_t>(i)][d] &&
                    b_presence[static_cast<std::size_t>(j)][d])
                    ++both;
            }
            m.observed(i, j) = static_cast<double>(both);
        }
    }

    double total = m.observed.sum();
    Eigen::VectorXd row_sums = m.observed.rowwise().sum();
    Eigen::VectorXd col_sums = m.observed.colwise().sum();
    m.expected.setZero(rows, cols);
    m.deviation.setZero(rows, cols);
    m.cell_p.setOnes(rows, cols);
    m.significant.assign(static_cast<std::size_t>(rows),
                         std::vector<bool>(static_cast<std::size_t>(cols), false));
    if (total > 0) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                double e = row_sums[i] * col_sums[j] / total;
                m.expected(i, j) = e;
                if (e > 0) m.deviation(i, j) = (m.observed(i, j) - e) / e;
                // cell-vs-rest 2x2 test
                double o = m.observed(i, j);
                double r_rest = row_sums[i] - o;
                double c_rest = col_sums[j] - o;
                double rest = total - row_sums[i] - col_sums[j] + o;
                if (r_rest >= 0 && c_rest >= 0 && rest >= 0) {
                    Eigen::MatrixXd cell(2, 2);
                    cell << o, r_rest, c_rest, rest;
                    Eigen::VectorXd rr = cell.rowwise().sum();
                    Eigen::VectorXd cc = cell.colwise().sum();
                    if ((rr.array() > 0).all() && (cc.array() > 0).all()) {
                        auto res = chi_square(cell);
                        m.cell_p(i, j) = res.p;
                        m.significant[static_cast<std::size_t>(i)]
                                     [static_cast<std::size_t>(j)] = res.p < 0.05;
                    }
                }
            }
        }
        bool degenerate = (row_sums.array() == 0).any() || (col_sums.array() == 0).any();
        if (!degenerate && rows >= 2 && cols >= 2) {
            auto global = chi_square(m.observed);
            m.chi2 = global.chi2;
            m.dof = global.dof;
            m.p = global.p;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Trends

TrendSeries trend_series(const std::vector<std::vector<std::string>>& doc_tokens,
                         const std::vector<int>& years, int period_years, int top_k,
                         const std::vector<std::string>& explicit_terms) {
    if (doc_tokens.size() != years.size())
        throw TermstatsError("trend_series: tokens/years size mismatch");
    if (period_years < 1) throw TermstatsError("trend_series: period_years must be >= 1");
    TrendSeries series;
    if (doc_tokens.empty()) return series;

    int min_year = *std::min_element(years.begin(), years.end());
    int max_year = *std::max_element(years.begin(), years.end());

    if (!explicit_terms.empty()) {
        series.terms = explicit_terms;
    } else {
        // top-K unigrams and bigrams by total occurrences, ties alphabetical
        std::unordered_map<std::string, std::int64_t> totals;
        for (const auto& tokens : doc_tokens) {
            for (const auto& t : tokens) ++totals[t];
            for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
                ++totals[tokens[i] + " " + tokens[i + 1]];
        }
        std::vector<std::pair<std::string, std::int64_t>> ranked(totals.begin(), totals.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < top_k; ++i)
            series.terms.push_back(ranked[i].first);
    }

    std::vector<std::vector<std::string>> term_tokens;
    for (const auto& term : series.terms) term_tokens.push_back(tokenize(term));

    for (int start = min_year; start <= max_year; start += period_years) {
        int stop = start + period_years - 1;
        std::string label = std::to_string(start) + "-" + std::to_string(stop);
        std::vector<std::int64_t> counts(series.terms.size(), 0);
        for (std::size_t d = 0; d < doc_tokens.size(); ++d) {
            if (years[d] < start || years[d] > stop) continue;
            const auto& tokens = doc_tokens[d];
            for (std::size_t t = 0; t < term_tokens.size(); ++t) {
                const auto& phrase = term_tokens[t];
                if (phrase.empty()) continue;
                if (phrase.size() == 1) {
                    counts[t] += std::count(tokens.begin(), tokens.end(), phrase[0]);
                } else {
                    for (std::size_t at = 0; at + phrase.size() <= tokens.size(); ++at) {
                        bool match = true;
                        for (std::size_t k = 0; k < phrase.size(); ++k) {
                            if (tokens[at + k] != phrase[k]) {
                                match = false;
                                break;
                            }
                        }
                        if (match) ++counts[t];
                    }
                }
            }
        }
        std::int64_t bin_total = std::accumulate(counts.begin(), counts.end(),
                                                 static_cast<std::int64_t>(0));
        for (std::size_t t = 0; t < series.terms.size(); ++t) {
            TrendPoint point;
            point.period = label;
            point.period_start = start;
            point.term = series.terms[t];
            point.count = counts[t];
            point.height = bin_total > 0
                               ? static_cast<double>(counts[t]) / static_cast<double>(bin_total)
                               : 0.0;
            series.points.push_back(std::move(point));
        }
    }
    return series;
}

// ---------------------------------------------------------------------------
// Persistence

void save_term_scores_csv(const std::vector<TermScore>& scores, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TermstatsError("cannot write " + path);
    out << csv::format_row({"term", "score", "frequency"});
    for (const auto& s : scores) {
        out << csv::format_row(
            {s.term, strings::format_double(s.score), std::to_string(s.frequency)});
    }
}

void save_contingency_csv(const ContingencyMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TermstatsError("cannot write " + path);
    out << csv::format_row(
        {"row_term", "col_term", "observed", "expected", "deviation", "p", "significant"});
    for (Eigen::Index i = 0; i < m.observed.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.observed.cols(); ++j) {
            out << csv::format_row(
                {m.row_terms[static_cast<std::size_t>(i)],
                 m.col_terms[static_cast<std::size_t>(j)],
                 strings::format_double(m.observed(i, j)),
                 strings::format_double(m.expected(i, j)),
                 strings::format_double(m.deviation(i, j)),
                 strings::format_double(m.cell_p(i, j)),
                 m.significant[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                     ? "1"
                     : "0"});
        }
    }
    out << csv::format_row({"__global__", "", strings::format_double(m.observed.sum()), "",
                            "", strings::format_double(m.p),
                            m.p < 0.05 ? "1" : "0"});
}

void save_trend_csv(const TrendSeries& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TermstatsError("cannot write " + path);
    out << csv::format_row({"period", "term", "count", "height"});
    for (const auto& p : t.points) {
        out << csv::format_row({p.period, p.term, std::to_string(p.count),
                                strings::format_double(p.height)});
    }
}

}  // namespace litscape::termstats
