// Shared synthetic fixtures and independent oracles for the geometry
// tests: Gaussian blobs, trustworthiness, neighborhood overlap, and the
// adjusted Rand index.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "litscape/util/rng.hpp"

namespace fixtures {

inline double gaussian(litscape::rng::Xoshiro256& gen) {
    // Box-Muller; consumes two uniforms per call
    double u1 = gen.uniform();
    while (u1 <= 1e-300) u1 = gen.uniform();
    double u2 = gen.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Three Gaussian blobs with unit-separated centers placed away from the
// origin (so cosine geometry behaves), n_per points each.
inline Eigen::MatrixXd three_blobs(int n_per, int dim, double sigma, std::uint64_t seed,
                                   std::vector<int>* labels = nullptr) {
    if (dim < 3) throw std::invalid_argument("three_blobs: dim must be >= 3");
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(3, dim);
    centers(0, 0) = 2.0;
    centers(1, 0) = 2.0;
    centers(1, 1) = 1.0;
    centers(2, 0) = 2.0;
    centers(2, 1) = 0.5;
    centers(2, 2) = std::sqrt(3.0) / 2.0;

    litscape::rng::Xoshiro256 gen(seed);
    Eigen::MatrixXd points(3 * n_per, dim);
    for (int b = 0; b < 3; ++b) {
        for (int i = 0; i < n_per; ++i) {
            for (int d = 0; d < dim; ++d)
                points(b * n_per + i, d) = centers(b, d) + sigma * gaussian(gen);
            if (labels) labels->push_back(b);
        }
    }
    return points;
}

inline Eigen::MatrixXd pairwise_euclidean(const Eigen::MatrixXd& x) {
    const auto n = x.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
    return d;
}

inline Eigen::MatrixXd pairwise_cosine(const Eigen::MatrixXd& x) {
    const auto n = x.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double c = x.row(i).dot(x.row(j)) / (x.row(i).norm() * x.row(j).norm());
            d(i, j) = 1.0 - std::clamp(c, -1.0, 1.0);
        }
    }
    return d;
}

// k nearest neighbor index sets from a distance matrix (self excluded,
// ties by lower index).
inline std::vector<std::vector<int>> knn_sets(const Eigen::MatrixXd& dist, int k) {
    const auto n = dist.rows();
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
            return a < b;
        });
        for (int cand : order) {
            if (cand == static_cast<int>(i)) continue;
            sets[static_cast<std::size_t>(i)].push_back(cand);
            if (static_cast<int>(sets[static_cast<std::size_t>(i)].size()) == k) break;
        }
    }
    return sets;
}

// Trustworthiness from exact high/low-dimensional neighbor ranks.
inline double trustworthiness(const Eigen::MatrixXd& input_dist,
                              const Eigen::MatrixXd& output_dist, int k) {
    const auto n = input_dist.rows();
    auto input_knn = knn_sets(input_dist, k);
    auto output_knn = knn_sets(output_dist, k);

    // rank(i, j): position of j in i's input-space neighbor ordering (1-based)
    std::vector<std::vector<int>> rank(static_cast<std::size_t>(n),
                                       std::vector<int>(static_cast<std::size_t>(n), 0));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (input_dist(i, a) != input_dist(i, b)) return input_dist(i, a) < input_dist(i, b);
            return a < b;
        });
        int r = 0;
        for (int j : order) {
            if (j == static_cast<int>(i)) continue;
            rank[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ++r;
        }
    }

    double penalty = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& in_set = input_knn[static_cast<std::size_t>(i)];
        for (int j : output_knn[static_cast<std::size_t>(i)]) {
            if (std::find(in_set.begin(), in_set.end(), j) != in_set.end()) continue;
            penalty += rank[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - k;
        }
    }
    double dn = static_cast<double>(n);
    double dk = static_cast<double>(k);
    return 1.0 - 2.0 / (dn * dk * (2.0 * dn - 3.0 * dk - 1.0)) * penalty;
}

inline double mean_jaccard_overlap(const Eigen::MatrixXd& input_dist,
                                   const Eigen::MatrixXd& output_dist, int k) {
    auto a = knn_sets(input_dist, k);
    auto b = knn_sets(output_dist, k);
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<int> sa = a[i], sb = b[i];
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        std::vector<int> inter, uni;
        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                              std::back_inserter(inter));
        std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
        total += static_cast<double>(inter.size()) / static_cast<double>(uni.size());
    }
    return total / static_cast<double>(a.size());
}

// Adjusted Rand index between two labelings (noise label -1 is treated as
// its own cluster).
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    auto relabel = [](const std::vector<int>& v) {
        std::vector<int> out(v.size());
        std::vector<int> seen;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto it = std::find(seen.begin(), seen.end(), v[i]);
            if (it == seen.end()) {
                seen.push_back(v[i]);
                out[i] = static_cast<int>(seen.size()) - 1;
            } else {
                out[i] = static_cast<int>(it - seen.begin());
            }
        }
        return out;
    };
    std::vector<int> x = relabel(a), y = relabel(b);
    int kx = *std::max_element(x.begin(), x.end()) + 1;
    int ky = *std::max_element(y.begin(), y.end()) + 1;
    std::vector<std::vector<long long>> table(static_cast<std::size_t>(kx),
                                              std::vector<long long>(
                                                  static_cast<std::size_t>(ky), 0));
    for (std::size_t i = 0; i < x.size(); ++i)
        ++table[static_cast<std::size_t>(x[i])][static_cast<std::size_t>(y[i])];

    auto comb2 = [](long long m) { return m * (m - 1) / 2; };
    long long sum_cells = 0, sum_rows = 0, sum_cols = 0;
    for (int i = 0; i < kx; ++i) {
        long long row = 0;
        for (int j = 0; j < ky; ++j) {
            sum_cells += comb2(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            row += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        sum_rows += comb2(row);
    }
    for (int j = 0; j < ky; ++j) {
        long long col = 0;
        for (int i = 0; i < kx; ++i)
            col += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        sum_cols += comb2(col);
    }
    long long total = comb2(static_cast<long long>(x.size()));
    double expected = static_cast<double>(sum_rows) * static_cast<double>(sum_cols) /
                      static_cast<double>(total);
    double max_index = 0.5 * (static_cast<double>(sum_rows) + static_cast<double>(sum_cols));
    if (max_index == expected) return 1.0;
    return (static_cast<double>(sum_cells) - expected) / (max_index - expected);
}

}  // namespace fixtures
