#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "litscape/embedding.hpp"

namespace litscape::manifold {

struct ManifoldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Metric { cosine, euclidean };

std::string_view metric_name(Metric m);
Metric metric_from_name(std::string_view name);

struct ProjectionConfig {
    int n_neighbors = 10;
    int n_components = 10;
    double min_dist = 0.0;
    double spread = 1.0;
    Metric metric = Metric::cosine;
    std::uint64_t seed = 42;
    int n_epochs = 500;
    double learning_rate = 1.0;
    int negative_sample_rate = 5;
    // Hogwild-style threaded layout; forfeits bit-reproducibility and is
    // excluded from acceptance runs.
    int parallel_threads = 1;
};

struct NeighborGraph {
    Eigen::MatrixXi indices;    // n x k, ascending by distance per row
    Eigen::MatrixXd distances;  // n x k, self excluded
};

// Symmetric weighted neighbor graph; entries in (0, 1], zero diagonal.
struct FuzzySimplicialSet {
    Eigen::SparseMatrix<double> weights;
    // Points whose bandwidth search hit the clamp bounds [1e-5, 1e5].
    std::vector<int> clamped_points;
    // Per-point |sum - log2(k)| after the bandwidth search.
    Eigen::VectorXd sigma_residuals;
};

struct CurveParams {
    double a = 0;
    double b = 0;
    double fit_residual = 0;  // mean squared error over the fit grid
};

struct Projection {
    Eigen::MatrixXd coords;  // n x n_components
    ProjectionConfig config;
};

// Exact k nearest neighbors by full pairwise distances; ties broken by
// lower index. Requires n >= k + 1.
NeighborGraph knn_graph(const Eigen::MatrixXd& points, int k, Metric metric);

// Local-connectivity smoothing: per point, rho = nearest distance and
// sigma solved so sum_j exp(-max(0, d_ij - rho)/sigma) = log2(k), then
// directed weights are symmetrized with w1 + w2 - w1*w2.
FuzzySimplicialSet fuzzy_simplicial_set(const NeighborGraph& graph, int k);

// Least-squares fit of 1/(1 + a d^(2b)) to the min_dist/spread envelope
// over d in [0, 3*spread].
CurveParams fit_ab(double min_dist, double spread = 1.0);

// Stochastic attraction/repulsion layout; spectral initialization with a
// seeded uniform fallback. Bit-reproducible for a fixed seed when
// parallel_threads == 1.
Projection optimize_layout(const FuzzySimplicialSet& fss, const ProjectionConfig& cfg);

// knn_graph -> fuzzy_simplicial_set -> fit_ab -> optimize_layout.
Projection project(const embedding::EmbeddingMatrix& matrix, const ProjectionConfig& cfg);
Projection project(const Eigen::MatrixXd& points, const ProjectionConfig& cfg);

// Projection persisted as CSV: doc_id, c0..c{k-1}.
void save_projection_csv(const Projection& p, const std::vector<std::string>& doc_ids,
                         const std::string& path);
Eigen::MatrixXd load_projection_csv(const std::string& path,
                                    std::vector<std::string>* doc_ids = nullptr);

}  // namespace litscape::manifold
