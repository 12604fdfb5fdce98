#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::termstats {

struct TermstatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The shipped stopword list (lowercase, sorted).
const std::set<std::string>& stopwords();
bool is_stopword(std::string_view token);

// Lowercases, splits on non-alphanumerics (hyphens stay inside words),
// drops single-character tokens and stopwords.
std::vector<std::string> tokenize(std::string_view text);

// Like tokenize but segmented at sentence punctuation; n-grams never
// cross a segment boundary. Phrase building keeps stopwords in the
// stream (interior stopwords are allowed; edges are checked separately).
std::vector<std::vector<std::string>> tokenize_segments(std::string_view text,
                                                        bool keep_stopwords = false);

struct Vocabulary {
    std::map<std::string, int> term_ids;            // dense 0..V-1
    std::map<std::string, int> document_frequency;  // docs containing term

    static Vocabulary build(const std::vector<std::vector<std::string>>& docs);
};

struct TermScore {
    std::string term;
    double score = 0;
    std::int64_t frequency = 0;
};

// tf = count/doc_length, idf = ln((1+N)/(1+df)) + 1; per-term score is
// the mean tf*idf over the cluster's documents (absent terms contribute
// zero). Top-N by score, ties alphabetical.
std::vector<TermScore> tfidf_cluster_terms(
    const std::vector<std::vector<std::string>>& corpus_tokens,
    const std::vector<int>& cluster_doc_indices, int top_n);

struct PhraseConfig {
    int nmin = 2;
    int nmax = 4;
    std::vector<std::string> blocklist = {"life cycle assessment", "life cycle",
                                          "cycle assessment", "lca"};
};

// Stopword-boundary n-grams (2..4 tokens), re-ranked with the same
// TF-IDF scoring over phrase occurrences.
std::vector<TermScore> extract_phrases(const std::vector<std::string>& texts,
                                       int top_n, const PhraseConfig& cfg = PhraseConfig());

// Phrase candidates per document without scoring (used by specificity).
std::vector<std::vector<std::string>> phrase_candidates(
    const std::vector<std::string>& texts, const PhraseConfig& cfg = PhraseConfig());

struct ChiSquareResult {
    double chi2 = 0;
    int dof = 0;
    double p = 1.0;
};

// Pearson chi-square over an r x c table of counts; p from the upper
// regularized incomplete gamma (series/continued fraction, |err|<=1e-10).
ChiSquareResult chi_square(const Eigen::MatrixXd& observed);

// Upper regularized incomplete gamma Q(s, x).
double gamma_q(double s, double x);

struct FieldedDoc {
    std::string title;
    std::string abstract_text;
    std::vector<std::string> keywords;
    int year = 0;
};

enum class PartitionAxis { period, field };

struct SpecificityConfig {
    int max_terms = 500;
    PartitionAxis partition = PartitionAxis::period;
    PhraseConfig phrases;
};

// Ranks multi-word terms across titles+abstracts+keywords by 2x2
// chi-square specificity against the configured document partition,
// then by document frequency.
std::vector<TermScore> specificity_rank(const std::vector<FieldedDoc>& docs,
                                        const SpecificityConfig& cfg = SpecificityConfig());

struct ContingencyMatrix {
    std::vector<std::string> row_terms;
    std::vector<std::string> col_terms;
    Eigen::MatrixXd observed;
    Eigen::MatrixXd expected;
    Eigen::MatrixXd deviation;   // (O-E)/E, 0 where E == 0
    Eigen::MatrixXd cell_p;
    std::vector<std::vector<bool>> significant;  // cell p < 0.05
    double chi2 = 0;
    int dof = 0;
    double p = 1.0;
    std::vector<std::string> dropped_terms;  // absent from the corpus
};

// O_ij = number of documents whose text contains both term_i and term_j
// (presence, not raw frequency). Terms may be multi-word phrases.
ContingencyMatrix contingency(const std::vector<std::vector<std::string>>& doc_tokens,
                              const std::vector<std::string>& group_a,
                              const std::vector<std::string>& group_b);

struct TrendPoint {
    std::string period;  // e.g. "2014-2017"
    int period_start = 0;
    std::string term;
    std::int64_t count = 0;
    double height = 0;  // normalized to sum 1 within the period
};

struct TrendSeries {
    std::vector<TrendPoint> points;
    std::vector<std::string> terms;  // the reported top-K terms
};

// Bins documents into consecutive periodYears windows anchored at the
// earliest year and reports normalized per-period heights of the top-K
// corpus terms. Pass explicit terms to pin the reported set.
TrendSeries trend_series(const std::vector<std::vector<std::string>>& doc_tokens,
                         const std::vector<int>& years, int period_years, int top_k,
                         const std::vector<std::string>& explicit_terms = {});

// True iff `phrase` (already tokenized) occurs contiguously in `tokens`.
bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase);

void save_term_scores_csv(const std::vector<TermScore>& scores, const std::string& path);
void save_contingency_csv(const ContingencyMatrix& m, const std::string& path);
void save_trend_csv(const TrendSeries& t, const std::string& path);

}  // namespace litscape::termstats
