// Acceptance suite: every criterion prints one PASS/FAIL line with its
// measured values; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "litscape/corpus.hpp"
#include "litscape/densclust.hpp"
#include "litscape/harvest.hpp"
#include "litscape/llmextract.hpp"
#include "litscape/manifold.hpp"
#include "litscape/pipeline.hpp"
#include "litscape/termstats.hpp"
#include "litscape/util/csv.hpp"
#include "litscape/util/rng.hpp"
#include "litscape/util/sha256.hpp"

#include "support/chi2_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/hdbscan_oracle.hpp"
#include "support/prisma_fixture.hpp"

using namespace litscape;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Criterion {
    int number;
    std::string summary;
    bool passed = true;
    std::string detail;
    double seconds = 0;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

void run_criterion(int number, const std::string& summary, double budget_seconds,
                   const std::function<void(Criterion&)>& body) {
    Criterion c{number, summary};
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.passed = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
    if (budget_seconds > 0 && c.seconds > budget_seconds) {
        c.passed = false;
        c.detail += (c.detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("%s criterion %d: %s (%.2fs)%s%s\n", c.passed ? "PASS" : "FAIL", c.number,
                c.summary.c_str(), c.seconds, c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.passed) ++failures;
}

pipeline::RunConfig mini_replay_config(const fs::path& workdir) {
    auto config = pipeline::RunConfig::load(std::string(LITSCAPE_ASSETS_DIR) +
                                            "/configs/mini.json");
    config.workdir = workdir.string();
    return config;
}

std::map<std::string, std::string> hash_tree(const fs::path& dir) {
    std::map<std::string, std::string> hashes;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        hashes[fs::relative(entry.path(), dir).string()] =
            sha256::hex_digest_file(entry.path().string());
    }
    return hashes;
}

}  // namespace

int main() {
    // 1. chi-square against the independent oracle
    run_criterion(1, "chi-square matches direct-summation + incomplete-gamma oracle", 5.0,
                  [](Criterion& c) {
        Eigen::MatrixXd hand(2, 2);
        hand << 10, 20, 30, 40;
        auto hand_result = termstats::chi_square(hand);
        c.require(std::abs(hand_result.chi2 - 0.79365) <= 1e-5,
                  "hand example chi2 = " + std::to_string(hand_result.chi2));
        c.require(hand_result.dof == 1, "hand example dof");

        rng::Xoshiro256 gen(90210);
        double worst_chi2 = 0, worst_p = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            int r = 2 + static_cast<int>(gen.below(5));
            int cc = 2 + static_cast<int>(gen.below(5));
            Eigen::MatrixXd table(r, cc);
            std::vector<std::vector<long double>> raw(
                static_cast<std::size_t>(r),
                std::vector<long double>(static_cast<std::size_t>(cc)));
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < cc; ++j) {
                    double v = static_cast<double>(gen.below(40)) + 1.0;
                    table(i, j) = v;
                    raw[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                }
            auto mine = termstats::chi_square(table);
            auto ref = oracle::chi2_table(raw);
            worst_chi2 = std::max(worst_chi2,
                                  std::abs(mine.chi2 - static_cast<double>(ref.chi2)));
            worst_p = std::max(worst_p, std::abs(mine.p - static_cast<double>(ref.p)));
            if (mine.dof != ref.dof) c.require(false, "dof mismatch");
        }
        c.require(worst_chi2 <= 1e-9, "max chi2 error " + std::to_string(worst_chi2));
        c.require(worst_p <= 1e-9, "max p error " + std::to_string(worst_p));
    });

    // 2. HDBSCAN equivalence with the brute-force reference
    run_criterion(2, "HDBSCAN memberships equal brute-force reference on 1000 sets", 30.0,
                  [](Criterion& c) {
        rng::Xoshiro256 gen(5150);
        for (int trial = 0; trial < 1000; ++trial) {
            int mcs = 3 + static_cast<int>(gen.below(2));
            int n = mcs + static_cast<int>(gen.below(static_cast<std::uint32_t>(13 - mcs)));
            Eigen::MatrixXd points(n, 2);
            for (int i = 0; i < n; ++i) {
                points(i, 0) = gen.uniform(0, 1);
                points(i, 1) = gen.uniform(0, 1);
            }
            densclust::ClusterConfig cfg;
            cfg.min_cluster_size = mcs;
            cfg.min_samples = 1;
            auto mine = densclust::cluster(points, cfg);
            auto ref = oracle::hdbscan_reference(points, mcs, 1);
            if (mine.labels != ref.labels) {
                c.require(false, "membership mismatch at trial " + std::to_string(trial));
                return;
            }
        }
    });

    // 3. cluster recovery through reduce -> cluster
    run_criterion(3, "blob fixture recovers 3 clusters, ARI >= 0.95, noise <= 10%", 60.0,
                  [](Criterion& c) {
        std::vector<int> truth;
        auto points = fixtures::three_blobs(30, 64, 0.05, 42, &truth);
        manifold::ProjectionConfig pcfg;  // 10 neighbors, 10 components, cosine, min_dist 0
        pcfg.seed = 42;
        auto projection = manifold::project(points, pcfg);
        densclust::ClusterConfig ccfg;
        ccfg.min_cluster_size = 15;
        ccfg.min_samples = 1;
        auto assignment = densclust::cluster(projection.coords, ccfg);

        int clusters = assignment.cluster_count();
        int noise = 0;
        for (int l : assignment.labels)
            if (l < 0) ++noise;
        double ari = fixtures::adjusted_rand_index(truth, assignment.labels);
        c.require(clusters == 3, "clusters = " + std::to_string(clusters));
        c.require(ari >= 0.95, "ARI = " + std::to_string(ari));
        c.require(noise * 10 <= static_cast<int>(assignment.labels.size()),
                  "noise = " + std::to_string(noise));
        c.detail = "clusters=3, ARI=" + std::to_string(ari) +
                   ", noise=" + std::to_string(noise);
    });

    // 4. UMAP properties on the blob fixture
    run_criterion(4, "trustworthiness >= 0.90, exact symmetry, sigma residuals, bit repro",
                  120.0, [](Criterion& c) {
        auto points = fixtures::three_blobs(30, 64, 0.05, 42);
        manifold::ProjectionConfig cfg;
        cfg.seed = 42;

        auto graph = manifold::knn_graph(points, cfg.n_neighbors, cfg.metric);
        auto fss = manifold::fuzzy_simplicial_set(graph, cfg.n_neighbors);
        Eigen::MatrixXd w(fss.weights);
        c.require((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0,
                  "fuzzy set not exactly symmetric");
        double max_residual = fss.sigma_residuals.maxCoeff();
        c.require(max_residual <= 1e-5,
                  "sigma residual " + std::to_string(max_residual));

        auto run1 = manifold::project(points, cfg);
        auto run2 = manifold::project(points, cfg);
        c.require(run1.coords == run2.coords, "same-seed runs differ");

        auto input_dist = fixtures::pairwise_cosine(points);
        auto output_dist = fixtures::pairwise_euclidean(run1.coords);
        double trust = fixtures::trustworthiness(input_dist, output_dist, 10);
        c.require(trust >= 0.90, "trustworthiness = " + std::to_string(trust));
        c.detail = "trustworthiness=" + std::to_string(trust);
    });

    // 5. TF-IDF and trend arithmetic
    run_criterion(5, "TF-IDF matches hand values within 1e-12; trend heights sum to 1",
                  10.0, [](Criterion& c) {
        std::vector<std::vector<std::string>> tokens = {
            {"solar", "energy", "storage"}, {"solar", "panel"}, {"wind", "energy"}};
        auto scores = termstats::tfidf_cluster_terms(tokens, {0, 1}, 10);
        const double idf_solar = std::log(4.0 / 3.0) + 1.0;
        const double idf_rare = std::log(4.0 / 2.0) + 1.0;
        struct Expect {
            const char* term;
            double score;
        };
        const Expect expected[] = {
            {"solar", ((1.0 / 3.0) + (1.0 / 2.0)) / 2.0 * idf_solar},
            {"panel", (1.0 / 2.0) / 2.0 * idf_rare},
            {"storage", (1.0 / 3.0) / 2.0 * idf_rare},
            {"energy", (1.0 / 3.0) / 2.0 * idf_solar},
        };
        c.require(scores.size() == 4, "score row count");
        for (std::size_t i = 0; i < 4 && i < scores.size(); ++i) {
            c.require(scores[i].term == expected[i].term,
                      "rank " + std::to_string(i) + " term " + scores[i].term);
            c.require(std::abs(scores[i].score - expected[i].score) <= 1e-12,
                      std::string(expected[i].term) + " score off by " +
                          std::to_string(std::abs(scores[i].score - expected[i].score)));
        }

        rng::Xoshiro256 gen(8);
        std::vector<std::vector<std::string>> docs;
        std::vector<int> years;
        std::vector<std::string> pool = {"solar", "wind", "carbon", "grid", "storage"};
        for (int i = 0; i < 80; ++i) {
            std::vector<std::string> doc;
            for (int k = 0; k < 2 + static_cast<int>(gen.below(6)); ++k)
                doc.push_back(pool[gen.below(5)]);
            docs.push_back(doc);
            years.push_back(2000 + static_cast<int>(gen.below(20)));
        }
        auto trend = termstats::trend_series(docs, years, 4, 4);
        std::map<std::string, double> sums;
        std::map<std::string, std::int64_t> counts;
        for (const auto& p : trend.points) {
            sums[p.period] += p.height;
            counts[p.period] += p.count;
        }
        for (const auto& [period, sum] : sums) {
            if (counts[period] > 0)
                c.require(std::abs(sum - 1.0) <= 1e-12, "period " + period + " sums to " +
                                                            std::to_string(sum));
        }
    });

    // 6. parser robustness
    run_criterion(6, "100k fuzzed chat responses crash-free with typed errors", 60.0,
                  [](Criterion& c) {
        using namespace llmextract;
        auto conformant3 = parse_lines("Title: X\nDescription: Y\nAI: Z", 3,
                                       {"Title", "Description", "AI"});
        c.require(conformant3.ok() &&
                      conformant3.fields == std::vector<std::string>{"X", "Y", "Z"},
                  "3-line fixture");
        auto conformant7 = parse_lines(
            "LCA stage: a\nLCIA method: b\nApplication area: c\nAI/ML task: d\n"
            "AI/ML technology: e\nImpact metrics: f\nClaimed benefit: g",
            7, extraction_keys());
        c.require(conformant7.ok() && conformant7.fields.size() == 7, "7-line fixture");

        rng::Xoshiro256 gen(424242);
        for (int trial = 0; trial < 100000; ++trial) {
            std::string input;
            std::size_t len = gen.below(160);
            for (std::size_t i = 0; i < len; ++i) {
                switch (gen.below(7)) {
                    case 0: input.push_back('\n'); break;
                    case 1: input += "Title:"; break;
                    case 2: input += "LCA stage:"; break;
                    case 3: input.push_back(static_cast<char>(gen.below(256))); break;
                    case 4: input.push_back(':'); break;
                    default: input.push_back(static_cast<char>('a' + gen.below(26)));
                }
            }
            auto a = parse_lines(input, 3, {"Title", "Description", "AI"});
            auto b = parse_lines(input, 7, extraction_keys());
            auto d = parse_lines(input, 3);
            if (!(a.ok() || a.error.has_value()) || !(b.ok() || b.error.has_value()) ||
                !(d.ok() || d.error.has_value())) {
                c.require(false, "untyped outcome at trial " + std::to_string(trial));
                return;
            }
        }
    });

    // 7. extraction contract over the mini-corpus with recorded transcripts
    run_criterion(7, "extraction records are 7-field, None->absent, labels in-vocabulary",
                  120.0, [](Criterion& c) {
        auto workdir = fs::temp_directory_path() / "litscape_acceptance_extract";
        fs::remove_all(workdir);
        auto config = mini_replay_config(workdir);
        pipeline::run_all(config);

        auto rows = csv::parse_file(
            (fs::path(config.output_dir()) / "extraction.csv").string());
        c.require(rows.size() > 1, "no extraction rows");
        for (std::size_t i = 1; i < rows.size(); ++i)
            c.require(rows[i].size() == 8, "row width " + std::to_string(rows[i].size()));
        auto extractions = llmextract::load_extractions_csv(
            (fs::path(config.output_dir()) / "extraction.csv").string());
        bool saw_absent = false;
        for (const auto& e : extractions) {
            c.require(e.fields().size() == 7, "field count");
            for (const auto& f : e.fields()) {
                if (!f.has_value()) saw_absent = true;
                else c.require(*f != "None", "literal None leaked through");
            }
        }
        c.require(saw_absent, "no None sentinel exercised by the fixture");

        auto ai = llmextract::VocabRules::ai_default();
        auto lca = llmextract::VocabRules::lca_stage_default();
        auto lcia = llmextract::VocabRules::lcia_default();
        auto in_vocab = [](const std::vector<std::string>& labels, const std::string& v) {
            if (v == "None" || v == "Other") return true;
            return std::find(labels.begin(), labels.end(), v) != labels.end();
        };
        auto normalized = llmextract::load_normalized_csv(
            (fs::path(config.output_dir()) / "normalized.csv").string());
        c.require(normalized.size() == extractions.size(), "normalized row count");
        for (const auto& n : normalized) {
            c.require(in_vocab(ai.labels, n.ai_label), "ai label " + n.ai_label);
            c.require(in_vocab(lca.labels, n.lca_stage_label),
                      "lca label " + n.lca_stage_label);
            c.require(in_vocab(lcia.labels, n.lcia_label), "lcia label " + n.lcia_label);
        }
        fs::remove_all(workdir);
    });

    // 8. PRISMA arithmetic on the review-scale fixture
    run_criterion(8, "ledger replay yields 72 + 137 = 209 retrieved full texts", 60.0,
                  [](Criterion& c) {
        auto cache_dir = fs::temp_directory_path() / "litscape_acceptance_prisma";
        fs::remove_all(cache_dir);
        auto fx = fixtures::make_prisma_fixture(cache_dir.string());
        auto cfg = fixtures::replay_config(cache_dir.string());
        auto result = harvest::harvest_all(fx.records, cfg);
        c.require(result.counts.open_access_retrieved == 72,
                  "oa = " + std::to_string(result.counts.open_access_retrieved));
        c.require(result.counts.publisher_retrieved == 137,
                  "publisher = " + std::to_string(result.counts.publisher_retrieved));
        c.require(result.counts.fulltext_total == 209,
                  "total = " + std::to_string(result.counts.fulltext_total));
        c.require(result.counts.fulltext_total == result.counts.open_access_retrieved +
                                                      result.counts.publisher_retrieved,
                  "split identity");
        fs::remove_all(cache_dir);
    });

    // 9. end-to-end determinism
    run_criterion(9, "two full runs produce byte-identical artifact trees", 300.0,
                  [](Criterion& c) {
        auto workdir_a = fs::temp_directory_path() / "litscape_acceptance_det_a";
        auto workdir_b = fs::temp_directory_path() / "litscape_acceptance_det_b";
        fs::remove_all(workdir_a);
        fs::remove_all(workdir_b);
        pipeline::run_all(mini_replay_config(workdir_a));
        pipeline::run_all(mini_replay_config(workdir_b));
        auto tree_a = hash_tree(workdir_a / "outputs");
        auto tree_b = hash_tree(workdir_b / "outputs");
        c.require(!tree_a.empty(), "no artifacts produced");
        c.require(tree_a.size() == tree_b.size(), "artifact counts differ");
        for (const auto& [rel, hash] : tree_a) {
            auto it = tree_b.find(rel);
            if (it == tree_b.end() || it->second != hash) {
                c.require(false, "differs: " + rel);
            }
        }
        c.detail = std::to_string(tree_a.size()) + " artifacts compared";
        fs::remove_all(workdir_a);
        fs::remove_all(workdir_b);
    });

    if (failures > 0) {
        std::printf("ACCEPTANCE: %d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all 9 criteria passed\n");
    return 0;
}
