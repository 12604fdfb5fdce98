#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "litscape/termstats.hpp"
#include "litscape/util/rng.hpp"
#include "litscape/util/strings.hpp"
#include "support/chi2_oracle.hpp"

using namespace litscape;
using termstats::TermScore;

TEST_CASE("tokenize rules") {
    CHECK(termstats::tokenize("Life-cycle Assessment of LCA") ==
          std::vector<std::string>{"life-cycle", "assessment", "lca"});
    CHECK(termstats::tokenize("").empty());
    CHECK(termstats::tokenize("the and of").empty());
    CHECK(termstats::tokenize("a I x") == std::vector<std::string>{});  // len-1 dropped
    CHECK(termstats::tokenize("CO2 emissions; 2020") ==
          std::vector<std::string>{"co2", "emissions", "2020"});
}

TEST_CASE("tfidf matches hand computation on the toy corpus") {
    // d1="solar energy storage", d2="solar panel", d3="wind energy"
    std::vector<std::vector<std::string>> tokens = {
        {"solar", "energy", "storage"}, {"solar", "panel"}, {"wind", "energy"}};
    auto scores = termstats::tfidf_cluster_terms(tokens, {0, 1}, 10);

    const double idf_solar = std::log(4.0 / 3.0) + 1.0;   // df 2
    const double idf_rare = std::log(4.0 / 2.0) + 1.0;    // df 1
    const double expect_solar = ((1.0 / 3.0) * idf_solar + (1.0 / 2.0) * idf_solar) / 2.0;
    const double expect_panel = ((1.0 / 2.0) * idf_rare) / 2.0;
    const double expect_storage = ((1.0 / 3.0) * idf_rare) / 2.0;
    const double expect_energy = ((1.0 / 3.0) * idf_solar) / 2.0;

    REQUIRE(scores.size() == 4);  // wind never appears in the cluster
    CHECK(scores[0].term == "solar");
    CHECK(scores[0].score == doctest::Approx(expect_solar).epsilon(1e-12));
    CHECK(scores[1].term == "panel");
    CHECK(scores[1].score == doctest::Approx(expect_panel).epsilon(1e-12));
    CHECK(scores[2].term == "storage");
    CHECK(scores[2].score == doctest::Approx(expect_storage).epsilon(1e-12));
    CHECK(scores[3].term == "energy");
    CHECK(scores[3].score == doctest::Approx(expect_energy).epsilon(1e-12));
    for (const auto& s : scores) CHECK(s.term != "wind");
}

TEST_CASE("tfidf idf floor when term is in every document") {
    std::vector<std::vector<std::string>> tokens = {{"common"}, {"common"}, {"common"}};
    auto scores = termstats::tfidf_cluster_terms(tokens, {0, 1, 2}, 5);
    REQUIRE(scores.size() == 1);
    // idf = ln(4/4) + 1 = 1, tf = 1 in each doc
    CHECK(scores[0].score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tfidf topN larger than vocabulary returns everything") {
    std::vector<std::vector<std::string>> tokens = {{"alpha", "beta"}};
    auto scores = termstats::tfidf_cluster_terms(tokens, {0}, 100);
    CHECK(scores.size() == 2);
}

TEST_CASE("tfidf ranking invariant under whole-corpus duplication") {
    std::vector<std::vector<std::string>> tokens = {
        {"solar", "energy", "storage"}, {"solar", "panel"}, {"wind", "energy"}};
    auto base = termstats::tfidf_cluster_terms(tokens, {0, 1}, 10);
    std::vector<std::vector<std::string>> doubled = tokens;
    doubled.insert(doubled.end(), tokens.begin(), tokens.end());
    auto dup = termstats::tfidf_cluster_terms(doubled, {0, 1}, 10);
    REQUIRE(base.size() == dup.size());
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i].term == dup[i].term);
}

TEST_CASE("phrase extraction boundary rules") {
    SUBCASE("candidates from the cited example") {
        auto scores = termstats::extract_phrases(
            {"the carbon emissions of recycled aggregates"}, 50);
        std::vector<std::string> terms;
        for (const auto& s : scores) terms.push_back(s.term);
        CHECK(std::find(terms.begin(), terms.end(), "carbon emissions") != terms.end());
        CHECK(std::find(terms.begin(), terms.end(), "recycled aggregates") != terms.end());
        // never starts or ends on a stopword
        for (const auto& t : terms) {
            auto words = strings::split(t, ' ');
            CHECK_FALSE(termstats::is_stopword(words.front()));
            CHECK_FALSE(termstats::is_stopword(words.back()));
        }
    }
    SUBCASE("text shorter than two tokens yields nothing") {
        CHECK(termstats::extract_phrases({"solar"}, 10).empty());
        CHECK(termstats::extract_phrases({""}, 10).empty());
    }
    SUBCASE("phrases never cross a sentence period") {
        auto scores = termstats::extract_phrases({"solar energy. wind turbines"}, 50);
        for (const auto& s : scores) {
            CHECK(s.term.find("energy wind") == std::string::npos);
        }
        std::vector<std::string> terms;
        for (const auto& s : scores) terms.push_back(s.term);
        CHECK(std::find(terms.begin(), terms.end(), "solar energy") != terms.end());
        CHECK(std::find(terms.begin(), terms.end(), "wind turbines") != terms.end());
    }
    SUBCASE("blocklist removes domain-generic phrases") {
        auto scores = termstats::extract_phrases(
            {"life cycle assessment of carbon emissions"}, 50);
        for (const auto& s : scores) {
            CHECK(s.term != "life cycle assessment");
            CHECK(s.term != "life cycle");
        }
    }
}

TEST_CASE("chi_square hand example and trivial cases") {
    Eigen::MatrixXd table(2, 2);
    table << 10, 20, 30, 40;
    auto result = termstats::chi_square(table);
    CHECK(result.chi2 == doctest::Approx(0.79365).epsilon(1e-5));
    CHECK(result.dof == 1);

    Eigen::MatrixXd proportional(2, 2);
    proportional << 10, 20, 20, 40;  // rows proportional -> O == E
    auto zero = termstats::chi_square(proportional);
    CHECK(zero.chi2 == doctest::Approx(0.0));
    CHECK(zero.p == doctest::Approx(1.0));

    Eigen::MatrixXd degenerate(2, 2);
    degenerate << 0, 0, 1, 2;
    CHECK_THROWS_AS(termstats::chi_square(degenerate), termstats::TermstatsError);
}

TEST_CASE("chi_square matches the independent oracle on random tables") {
    rng::Xoshiro256 gen(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        int r = 2 + static_cast<int>(gen.below(5));
        int c = 2 + static_cast<int>(gen.below(5));
        Eigen::MatrixXd table(r, c);
        std::vector<std::vector<long double>> raw(static_cast<std::size_t>(r),
                                                  std::vector<long double>(
                                                      static_cast<std::size_t>(c)));
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) {
                // +1 guarantees nonzero margins
                double v = static_cast<double>(gen.below(40)) + 1.0;
                table(i, j) = v;
                raw[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            }
        }
        auto mine = termstats::chi_square(table);
        auto ref = oracle::chi2_table(raw);
        CHECK(mine.dof == ref.dof);
        CHECK(std::abs(mine.chi2 - static_cast<double>(ref.chi2)) <= 1e-9);
        CHECK(std::abs(mine.p - static_cast<double>(ref.p)) <= 1e-9);
    }
}

TEST_CASE("gamma_q stays stable at extremes") {
    // huge statistics underflow to 0, never NaN
    CHECK(termstats::gamma_q(0.5, 600.0) >= 0.0);
    CHECK(termstats::gamma_q(12.5, 1e4) >= 0.0);
    CHECK(std::isfinite(termstats::gamma_q(12.5, 1e4)));
    CHECK(termstats::gamma_q(3.0, 0.0) == 1.0);
    CHECK(termstats::gamma_q(1.0, 1e-12) == doctest::Approx(1.0));
    CHECK_THROWS_AS(termstats::gamma_q(0.0, 1.0), termstats::TermstatsError);
    CHECK_THROWS_AS(termstats::gamma_q(1.0, -1.0), termstats::TermstatsError);
    // monotone decreasing in x
    double prev = 1.0;
    for (double x = 0.0; x <= 40.0; x += 0.5) {
        double q = termstats::gamma_q(2.5, x);
        CHECK(q <= prev + 1e-15);
        prev = q;
    }
}

TEST_CASE("contingency deviation scores") {
    SUBCASE("O = 4E gives D = 3") {
        // margins engineered so E(a1,b1) = 2 while O = 8
        std::vector<std::vector<std::string>> docs;
        auto add_docs = [&](int count, const std::string& a, const std::string& b) {
            for (int i = 0; i < count; ++i) docs.push_back({a, b});
        };
        add_docs(8, "alpha", "uno");
        add_docs(92, "alpha", "dos");
        add_docs(12, "beta", "uno");
        add_docs(888, "beta", "dos");
        auto m = termstats::contingency(docs, {"alpha", "beta"}, {"uno", "dos"});
        REQUIRE(m.observed.rows() == 2);
        CHECK(m.observed(0, 0) == 8);
        CHECK(m.expected(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(m.deviation(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(m.significant[0][0]);
        // deviation identity everywhere
        double total = m.observed.sum();
        for (Eigen::Index i = 0; i < 2; ++i) {
            for (Eigen::Index j = 0; j < 2; ++j) {
                double e = m.observed.row(i).sum() * m.observed.col(j).sum() / total;
                CHECK(m.deviation(i, j) ==
                      doctest::Approx((m.observed(i, j) - e) / e).epsilon(1e-12));
            }
        }
    }
    SUBCASE("independent placement gives D near 0 and no significance") {
        std::vector<std::vector<std::string>> docs;
        for (int i = 0; i < 25; ++i) docs.push_back({"alpha", "uno"});
        for (int i = 0; i < 25; ++i) docs.push_back({"alpha", "dos"});
        for (int i = 0; i < 25; ++i) docs.push_back({"beta", "uno"});
        for (int i = 0; i < 25; ++i) docs.push_back({"beta", "dos"});
        auto m = termstats::contingency(docs, {"alpha", "beta"}, {"uno", "dos"});
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) {
                CHECK(std::abs(m.deviation(i, j)) < 1e-12);
                CHECK_FALSE(m.significant[static_cast<std::size_t>(i)]
                                         [static_cast<std::size_t>(j)]);
            }
        CHECK(m.p == doctest::Approx(1.0));
    }
    SUBCASE("empty intersections give D = -1") {
        std::vector<std::vector<std::string>> docs;
        for (int i = 0; i < 50; ++i) docs.push_back({"alpha", "dos"});
        for (int i = 0; i < 50; ++i) docs.push_back({"beta", "uno"});
        auto m = termstats::contingency(docs, {"alpha", "beta"}, {"uno", "dos"});
        CHECK(m.deviation(0, 0) == doctest::Approx(-1.0));
        CHECK(m.deviation(1, 1) == doctest::Approx(-1.0));
    }
    SUBCASE("absent terms are reported and dropped") {
        std::vector<std::vector<std::string>> docs = {{"alpha", "uno"}, {"beta", "uno"}};
        auto m = termstats::contingency(docs, {"alpha", "beta", "ghost"}, {"uno"});
        CHECK(m.dropped_terms == std::vector<std::string>{"ghost"});
        CHECK(m.row_terms == std::vector<std::string>{"alpha", "beta"});
    }
    SUBCASE("multi-word terms match by phrase containment") {
        std::vector<std::vector<std::string>> docs = {
            termstats::tokenize("machine learning for carbon emissions"),
            termstats::tokenize("carbon emissions only here"),
        };
        auto m = termstats::contingency(docs, {"machine learning"}, {"carbon emissions"});
        CHECK(m.observed(0, 0) == 1);
    }
}

TEST_CASE("trend series normalization") {
    SUBCASE("single period, one term -> height 1") {
        std::vector<std::vector<std::string>> docs = {{"solar", "solar"}};
        auto t = termstats::trend_series(docs, {2020}, 4, 1);
        REQUIRE(t.points.size() == 1);
        CHECK(t.points[0].height == doctest::Approx(1.0));
        CHECK(t.points[0].period == "2020-2023");
    }
    SUBCASE("counts 3 and 1 -> heights 0.75/0.25") {
        std::vector<std::vector<std::string>> docs = {
            {"solar", "solar", "solar", "wind"}};
        auto t = termstats::trend_series(docs, {2020}, 4, 5, {"solar", "wind"});
        REQUIRE(t.points.size() == 2);
        CHECK(t.points[0].height == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(t.points[1].height == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("periods sum to 1 within 1e-12; empty bins emit zero rows") {
        rng::Xoshiro256 gen(5);
        std::vector<std::vector<std::string>> docs;
        std::vector<int> years;
        std::vector<std::string> pool = {"solar", "wind", "carbon", "storage", "grid"};
        for (int i = 0; i < 60; ++i) {
            std::vector<std::string> doc;
            for (int k = 0; k < 1 + static_cast<int>(gen.below(8)); ++k)
                doc.push_back(pool[gen.below(5)]);
            docs.push_back(doc);
            // leave 2008-2011 empty
            int year = 2004 + static_cast<int>(gen.below(3));
            if (gen.below(2)) year = 2012 + static_cast<int>(gen.below(10));
            years.push_back(year);
        }
        auto t = termstats::trend_series(docs, years, 4, 4);
        std::map<std::string, double> sums;
        std::map<std::string, std::int64_t> counts;
        for (const auto& p : t.points) {
            sums[p.period] += p.height;
            counts[p.period] += p.count;
        }
        for (const auto& [period, sum] : sums) {
            if (counts[period] == 0) CHECK(sum == 0.0);  // empty bin rows emitted as zeros
            else CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("specificity ranking") {
    std::vector<termstats::FieldedDoc> docs;
    // group A (years < 2010): "solar panels" concentrated here
    for (int i = 0; i < 10; ++i)
        docs.push_back({"Solar panels study", "solar panels improve output energy", {},
                        2004});
    // group B: "wind turbines" concentrated here
    for (int i = 0; i < 10; ++i)
        docs.push_back({"Wind turbines study", "wind turbines improve output energy", {},
                        2015});
    termstats::SpecificityConfig cfg;
    cfg.max_terms = 500;
    auto scores = termstats::specificity_rank(docs, cfg);
    REQUIRE_FALSE(scores.empty());

    auto score_of = [&](const std::string& term) -> const TermScore* {
        for (const auto& s : scores)
            if (s.term == term) return &s;
        return nullptr;
    };
    const auto* concentrated = score_of("solar panels");
    const auto* balanced = score_of("output energy");
    REQUIRE(concentrated != nullptr);
    REQUIRE(balanced != nullptr);
    CHECK(concentrated->score > balanced->score);
    CHECK(balanced->score == doctest::Approx(0.0));  // identical distribution
    // one-partition term has the maximal score among equal-frequency terms
    for (const auto& s : scores) {
        if (s.frequency == concentrated->frequency) {
            CHECK(s.score <= concentrated->score + 1e-12);
        }
    }
}

TEST_CASE("term score csv format fixture") {
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "litscape_termscores.csv";
    termstats::save_term_scores_csv({{"renewable energy", 228, 8}}, path.string());
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "term,score,frequency");
    CHECK(row == "renewable energy,228,8");
    fs::remove(path);
}
