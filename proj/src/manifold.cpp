#include "litscape/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "litscape/util/csv.hpp"
#include "litscape/util/rng.hpp"
#include "litscape/util/strings.hpp"

namespace litscape::manifold {

std::string_view metric_name(Metric m) {
    return m == Metric::cosine ? "cosine" : "euclidean";
}

Metric metric_from_name(std::string_view name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean") return Metric::euclidean;
    throw ManifoldError("unknown metric: " + std::string(name));
}

// ---------------------------------------------------------------------------
// k-NN graph

NeighborGraph knn_graph(const Eigen::MatrixXd& points, int k, Metric metric) {
    const auto n = points.rows();
    if (k < 1 || k >= n)
        throw ManifoldError("knn_graph: k must satisfy 1 <= k <= n-1 (k=" +
                            std::to_string(k) + ", n=" + std::to_string(n) + ")");

    Eigen::MatrixXd dist(n, n);
    if (metric == Metric::euclidean) {
        Eigen::VectorXd sq = points.rowwise().squaredNorm();
        dist = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
               2.0 * points * points.transpose();
        dist = dist.cwiseMax(0.0).cwiseSqrt();
    } else {
        Eigen::VectorXd norms = points.rowwise().norm();
        Eigen::MatrixXd normalized = points;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (norms[i] > 0) normalized.row(i) /= norms[i];
        }
        dist = Eigen::MatrixXd::Ones(n, n) - normalized * normalized.transpose();
        dist = dist.cwiseMax(0.0);
    }

    NeighborGraph g;
    g.indices.resize(n, k);
    g.distances.resize(n, k);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        auto cmp = [&](int a, int b) {
            double da = dist(i, a), db = dist(i, b);
            if (da != db) return da < db;
            return a < b;  // deterministic tie-break
        };
        // self sorts first (distance 0, lowest-or-equal index wins on ties
        // only against true duplicates, which sort after it by index)
        std::sort(order.begin(), order.end(), cmp);
        int col = 0;
        for (int cand : order) {
            if (cand == static_cast<int>(i)) continue;
            g.indices(i, col) = cand;
            g.distances(i, col) = dist(i, cand);
            if (++col == k) break;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Fuzzy simplicial set

namespace {

constexpr double kSigmaMin = 1e-5;
constexpr double kSigmaMax = 1e5;
constexpr int kSigmaIters = 64;

double membership_sum(const Eigen::MatrixXd& distances, Eigen::Index i, double rho,
                      double sigma) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < distances.cols(); ++j) {
        double d = distances(i, j) - rho;
        sum += d <= 0.0 ? 1.0 : std::exp(-d / sigma);
    }
    return sum;
}

}  // namespace

FuzzySimplicialSet fuzzy_simplicial_set(const NeighborGraph& graph, int k) {
    const auto n = graph.indices.rows();
    if (graph.indices.cols() != k)
        throw ManifoldError("fuzzy_simplicial_set: graph has " +
                            std::to_string(graph.indices.cols()) + " columns, expected k=" +
                            std::to_string(k));
    const double target = std::log2(static_cast<double>(k));

    FuzzySimplicialSet fss;
    fss.sigma_residuals.resize(n);

    // directed membership strengths
    std::vector<Eigen::Triplet<double>> directed;
    directed.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = graph.distances(i, 0);
        double lo = kSigmaMin, hi = kSigmaMax;
        // membership_sum is nondecreasing in sigma
        double sigma = 1.0;
        for (int iter = 0; iter < kSigmaIters; ++iter) {
            sigma = 0.5 * (lo + hi);
            if (membership_sum(graph.distances, i, rho, sigma) > target) hi = sigma;
            else lo = sigma;
        }
        sigma = 0.5 * (lo + hi);
        double residual = std::abs(membership_sum(graph.distances, i, rho, sigma) - target);
        fss.sigma_residuals[i] = residual;
        if (residual > 1e-5) fss.clamped_points.push_back(static_cast<int>(i));

        for (Eigen::Index j = 0; j < k; ++j) {
            double d = graph.distances(i, j) - rho;
            double w = d <= 0.0 ? 1.0 : std::exp(-d / sigma);
            directed.emplace_back(static_cast<int>(i), graph.indices(i, j), w);
        }
    }

    Eigen::SparseMatrix<double> w1(n, n);
    w1.setFromTriplets(directed.begin(), directed.end(),
                       [](double a, double b) { return std::max(a, b); });

    // probabilistic t-conorm symmetrization over the union support
    std::vector<Eigen::Triplet<double>> sym;
    sym.reserve(directed.size() * 2);
    for (int col = 0; col < w1.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(w1, col); it; ++it) {
            int i = static_cast<int>(it.row());
            int j = col;
            if (i == j) continue;
            if (i > j) continue;  // handle each unordered pair once
            double a = it.value();
            double b = w1.coeff(j, i);
            // short-circuit keeps nearest-neighbor weights exactly 1
            double w = (a == 1.0 || b == 1.0) ? 1.0 : a + b - a * b;
            sym.emplace_back(i, j, w);
            sym.emplace_back(j, i, w);
        }
    }
    // pairs present only as (j, i) with j > i
    for (int col = 0; col < w1.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(w1, col); it; ++it) {
            int i = static_cast<int>(it.row());
            int j = col;
            if (i <= j) continue;
            if (w1.coeff(j, i) != 0.0) continue;  // already handled above
            double a = it.value();
            sym.emplace_back(i, j, a);
            sym.emplace_back(j, i, a);
        }
    }
    fss.weights.resize(n, n);
    fss.weights.setFromTriplets(sym.begin(), sym.end());
    fss.weights.makeCompressed();
    return fss;
}

// ---------------------------------------------------------------------------
// Low-dimensional similarity curve

CurveParams fit_ab(double min_dist, double spread) {
    if (min_dist < 0 || spread <= 0)
        throw ManifoldError("fit_ab: require min_dist >= 0 and spread > 0");

    constexpr int kGrid = 300;
    Eigen::VectorXd xs(kGrid), ys(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        double d = 3.0 * spread * static_cast<double>(i) / (kGrid - 1);
        xs[i] = d;
        ys[i] = d <= min_dist ? 1.0 : std::exp(-(d - min_dist) / spread);
    }

    // Levenberg-Marquardt on f(d) = 1 / (1 + a d^(2b)).
    double a = 1.0, b = 1.0;
    double lambda = 1e-3;
    auto residuals = [&](double pa, double pb, Eigen::VectorXd& r) {
        double sse = 0;
        for (int i = 0; i < kGrid; ++i) {
            double d = xs[i];
            double f = 1.0 / (1.0 + pa * (d > 0 ? std::pow(d, 2.0 * pb) : 0.0));
            r[i] = f - ys[i];
            sse += r[i] * r[i];
        }
        return sse;
    };
    Eigen::VectorXd r(kGrid), r_try(kGrid);
    double sse = residuals(a, b, r);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::MatrixXd jac(kGrid, 2);
        for (int i = 0; i < kGrid; ++i) {
            double d = xs[i];
            if (d <= 0) {
                jac(i, 0) = jac(i, 1) = 0;
                continue;
            }
            double p = std::pow(d, 2.0 * b);
            double denom = 1.0 + a * p;
            jac(i, 0) = -p / (denom * denom);
            jac(i, 1) = -a * p * 2.0 * std::log(d) / (denom * denom);
        }
        Eigen::Matrix2d jtj = jac.transpose() * jac;
        Eigen::Vector2d jtr = jac.transpose() * r;
        Eigen::Matrix2d damped = jtj;
        damped(0, 0) += lambda * jtj(0, 0);
        damped(1, 1) += lambda * jtj(1, 1);
        Eigen::Vector2d step = damped.ldlt().solve(-jtr);
        double a_try = a + step[0], b_try = b + step[1];
        if (a_try <= 0 || b_try <= 0) {
            lambda *= 10;
            continue;
        }
        double sse_try = residuals(a_try, b_try, r_try);
        if (sse_try < sse) {
            a = a_try;
            b = b_try;
            r = r_try;
            sse = sse_try;
            lambda = std::max(lambda * 0.5, 1e-12);
            if (step.norm() < 1e-12) break;
        } else {
            lambda *= 10;
            if (lambda > 1e12) break;
        }
    }
    CurveParams params;
    params.a = a;
    params.b = b;
    params.fit_residual = sse / kGrid;
    return params;
}

// ---------------------------------------------------------------------------
// Layout optimization

namespace {

constexpr double kClip = 4.0;

inline double clip(double v) { return v < -kClip ? -kClip : (v > kClip ? kClip : v); }

Eigen::MatrixXd spectral_init(const Eigen::SparseMatrix<double>& weights, int n_components,
                              std::uint64_t seed) {
    const auto n = weights.rows();
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < weights.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(weights, col); it; ++it) {
            degree[it.row()] += it.value();
        }
    }
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i)
        inv_sqrt[i] = degree[i] > 0 ? 1.0 / std::sqrt(degree[i]) : 0.0;

    // L_sym = I - D^-1/2 W D^-1/2, dense; corpus scale keeps this cheap
    Eigen::MatrixXd lap = Eigen::MatrixXd(weights);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            lap(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt[i] * lap(i, j) * inv_sqrt[j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success)
        throw ManifoldError("spectral_init: eigensolver failed");

    // columns 1..n_components (skip the trivial eigenvector), scaled so the
    // largest coordinate magnitude is 10, plus seeded jitter
    if (n <= n_components)
        throw ManifoldError("spectral_init: need n > n_components");
    Eigen::MatrixXd coords = solver.eigenvectors().block(0, 1, n, n_components);
    double max_abs = coords.cwiseAbs().maxCoeff();
    if (max_abs > 0) coords *= 10.0 / max_abs;
    rng::Xoshiro256 gen(seed, /*stream=*/0xC0FFEE);
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        for (Eigen::Index j = 0; j < coords.cols(); ++j) {
            coords(i, j) += gen.uniform(-1e-4, 1e-4);
        }
    }
    return coords;
}

Eigen::MatrixXd random_init(Eigen::Index n, int n_components, std::uint64_t seed) {
    rng::Xoshiro256 gen(seed, /*stream=*/0xD1CE);
    Eigen::MatrixXd coords(n, n_components);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < n_components; ++j) coords(i, j) = gen.uniform(-10.0, 10.0);
    return coords;
}

struct EdgeList {
    std::vector<int> heads;
    std::vector<int> tails;
    std::vector<double> epochs_per_sample;
};

EdgeList build_edges(const Eigen::SparseMatrix<double>& weights) {
    EdgeList edges;
    double max_w = 0;
    for (int col = 0; col < weights.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(weights, col); it; ++it) {
            max_w = std::max(max_w, it.value());
        }
    }
    // column-major iteration gives a deterministic edge order
    for (int col = 0; col < weights.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(weights, col); it; ++it) {
            if (it.value() <= 0) continue;
            edges.heads.push_back(static_cast<int>(it.row()));
            edges.tails.push_back(col);
            edges.epochs_per_sample.push_back(max_w / it.value());
        }
    }
    return edges;
}

void run_epoch_range(Eigen::MatrixXd& coords, const EdgeList& edges,
                     std::vector<double>& next_sample,
                     std::vector<double>& next_negative, double a, double b,
                     double alpha, int negative_sample_rate, int epoch,
                     std::size_t edge_begin, std::size_t edge_end,
                     rng::Xoshiro256 gen) {
    const auto n = coords.rows();
    const auto dim = coords.cols();
    const double epoch_f = static_cast<double>(epoch);
    for (std::size_t e = edge_begin; e < edge_end; ++e) {
        if (next_sample[e] > epoch_f) continue;
        const int i = edges.heads[e];
        const int j = edges.tails[e];

        double d2 = 0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            double diff = coords(i, d) - coords(j, d);
            d2 += diff * diff;
        }
        if (d2 > 0) {
            double grad_coeff = (-2.0 * a * b * std::pow(d2, b - 1.0)) /
                                (a * std::pow(d2, b) + 1.0);
            for (Eigen::Index d = 0; d < dim; ++d) {
                double g = clip(grad_coeff * (coords(i, d) - coords(j, d)));
                coords(i, d) += g * alpha;
                coords(j, d) -= g * alpha;
            }
        }
        next_sample[e] += edges.epochs_per_sample[e];

        if (negative_sample_rate <= 0) continue;
        double eps_neg = edges.epochs_per_sample[e] /
                         static_cast<double>(negative_sample_rate);
        int n_neg = static_cast<int>((epoch_f - next_negative[e]) / eps_neg);
        for (int p = 0; p < n_neg; ++p) {
            int k = static_cast<int>(gen.below(static_cast<std::uint32_t>(n)));
            if (k == i) continue;
            double nd2 = 0;
            for (Eigen::Index d = 0; d < dim; ++d) {
                double diff = coords(i, d) - coords(k, d);
                nd2 += diff * diff;
            }
            if (nd2 > 0) {
                double grad_coeff =
                    (2.0 * b) / ((0.001 + nd2) * (a * std::pow(nd2, b) + 1.0));
                for (Eigen::Index d = 0; d < dim; ++d) {
                    double g = clip(grad_coeff * (coords(i, d) - coords(k, d)));
                    coords(i, d) += g * alpha;
                }
            } else if (k != j) {
                // coincident negative: fixed kick apart
                for (Eigen::Index d = 0; d < dim; ++d) coords(i, d) += kClip * alpha;
            }
        }
        next_negative[e] += n_neg * eps_neg;
    }
}

}  // namespace

Projection optimize_layout(const FuzzySimplicialSet& fss, const ProjectionConfig& cfg) {
    const auto n = fss.weights.rows();
    Projection proj;
    proj.config = cfg;
    if (n == 0) {
        proj.coords.resize(0, cfg.n_components);
        return proj;
    }
    if (n == 1) {
        proj.coords = Eigen::MatrixXd::Zero(1, cfg.n_components);
        return proj;
    }

    Eigen::MatrixXd coords;
    if (n > cfg.n_components + 1) {
        try {
            coords = spectral_init(fss.weights, cfg.n_components, cfg.seed);
        } catch (const ManifoldError&) {
            coords = random_init(n, cfg.n_components, cfg.seed);
        }
    } else {
        coords = random_init(n, cfg.n_components, cfg.seed);
    }

    CurveParams curve = fit_ab(cfg.min_dist, cfg.spread);
    EdgeList edges = build_edges(fss.weights);
    const auto n_edges = edges.heads.size();
    std::vector<double> next_sample(edges.epochs_per_sample);
    std::vector<double> next_negative(n_edges, 0.0);

    const int threads = std::max(1, cfg.parallel_threads);
    for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        double alpha = cfg.learning_rate *
                       (1.0 - static_cast<double>(epoch) / static_cast<double>(cfg.n_epochs));
        if (threads == 1 || n_edges < 2 * static_cast<std::size_t>(threads)) {
            run_epoch_range(coords, edges, next_sample, next_negative, curve.a, curve.b,
                            alpha, cfg.negative_sample_rate, epoch, 0, n_edges,
                            rng::Xoshiro256(cfg.seed, static_cast<std::uint64_t>(epoch)));
        } else {
            // Unsynchronized parallel updates: races on coords are benign
            // for SGD but break bitwise determinism.
            std::vector<std::thread> pool;
            std::size_t chunk = (n_edges + threads - 1) / static_cast<std::size_t>(threads);
            for (int t = 0; t < threads; ++t) {
                std::size_t begin = static_cast<std::size_t>(t) * chunk;
                std::size_t end = std::min(n_edges, begin + chunk);
                if (begin >= end) break;
                pool.emplace_back([&, begin, end, t] {
                    run_epoch_range(coords, edges, next_sample, next_negative, curve.a,
                                    curve.b, alpha, cfg.negative_sample_rate, epoch, begin,
                                    end,
                                    rng::Xoshiro256(cfg.seed,
                                                    (static_cast<std::uint64_t>(epoch) << 16) ^
                                                        static_cast<std::uint64_t>(t)));
                });
            }
            for (auto& th : pool) th.join();
        }
    }
    proj.coords = std::move(coords);
    return proj;
}

Projection project(const Eigen::MatrixXd& points, const ProjectionConfig& cfg) {
    if (cfg.n_components < 1) throw ManifoldError("project: n_components must be >= 1");
    if (cfg.n_neighbors < 2 || cfg.n_neighbors >= points.rows())
        throw ManifoldError("project: require 2 <= n_neighbors < n_points");
    NeighborGraph graph = knn_graph(points, cfg.n_neighbors, cfg.metric);
    FuzzySimplicialSet fss = fuzzy_simplicial_set(graph, cfg.n_neighbors);
    return optimize_layout(fss, cfg);
}

Projection project(const embedding::EmbeddingMatrix& matrix, const ProjectionConfig& cfg) {
    return project(matrix.rows, cfg);
}

// ---------------------------------------------------------------------------
// Persistence

void save_projection_csv(const Projection& p, const std::vector<std::string>& doc_ids,
                         const std::string& path) {
    if (static_cast<Eigen::Index>(doc_ids.size()) != p.coords.rows())
        throw ManifoldError("save_projection_csv: doc_ids/rows mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifoldError("cannot write " + path);
    std::vector<std::string> header = {"doc_id"};
    for (Eigen::Index c = 0; c < p.coords.cols(); ++c)
        header.push_back("c" + std::to_string(c));
    out << csv::format_row(header);
    for (Eigen::Index r = 0; r < p.coords.rows(); ++r) {
        std::vector<std::string> row = {doc_ids[static_cast<std::size_t>(r)]};
        for (Eigen::Index c = 0; c < p.coords.cols(); ++c)
            row.push_back(strings::format_double(p.coords(r, c)));
        out << csv::format_row(row);
    }
}

Eigen::MatrixXd load_projection_csv(const std::string& path,
                                    std::vector<std::string>* doc_ids) {
    auto rows = csv::parse_file(path);
    if (rows.empty()) throw ManifoldError("empty projection csv " + path);
    const auto cols = rows.front().size();
    if (cols < 2) throw ManifoldError("projection csv has no coordinate columns");
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(rows.size() - 1),
                           static_cast<Eigen::Index>(cols - 1));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw ManifoldError("ragged projection csv at row " + std::to_string(r));
        if (doc_ids) doc_ids->push_back(rows[r][0]);
        for (std::size_t c = 1; c < cols; ++c)
            coords(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) =
                std::stod(rows[r][c]);
    }
    return coords;
}

}  // namespace litscape::manifold
