#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace litscape::densclust {

struct DensclustError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Selection { leaf, excess_of_mass };

struct ClusterConfig {
    int min_cluster_size = 15;
    int min_samples = 1;
    // metric is euclidean; the clustering input is a UMAP projection,
    // which lives in euclidean space
    Selection selection = Selection::leaf;
};

// Condensed cluster tree. Point children have child < n (their index);
// cluster children have child >= n. The root cluster has id n.
struct CondensedTree {
    struct Row {
        int parent;
        int child;
        double lambda;  // 1/distance at the event, capped at kLambdaCap
        int child_size;
    };
    int n_points = 0;
    std::vector<Row> rows;

    std::string to_json() const;
};

// Distance 0 maps to this finite lambda so orderings survive duplicates.
constexpr double kLambdaCap = 1e12;

struct ClusterAssignment {
    std::vector<int> labels;           // -1 = noise
    std::vector<double> probabilities; // in [0, 1]; 0 for noise

    int cluster_count() const;
};

// core(x) = distance from x to its min_samples-th nearest other point.
Eigen::VectorXd core_distances(const Eigen::MatrixXd& points, int min_samples);

double mutual_reachability(double d_ab, double core_a, double core_b);

// Prim MST over mutual-reachability weights, single-linkage dendrogram
// (edges ascending, ties by lower vertex pair), condensed by
// min_cluster_size.
CondensedTree build_hierarchy(const Eigen::MatrixXd& points, const ClusterConfig& cfg);

// Leaves of the condensed cluster tree become clusters, numbered by first
// member index. The root is never selected: when no split survives
// min_cluster_size, every point is noise. probability = lambda_point /
// lambda_max within the cluster.
ClusterAssignment select_leaf_clusters(const CondensedTree& tree);

ClusterAssignment cluster(const Eigen::MatrixXd& points, const ClusterConfig& cfg);

// Per cluster: member indices sorted by probability descending (ties by
// lower index), truncated to k.
std::vector<std::vector<int>> top_members(const ClusterAssignment& assignment, int k = 15);

// Assignment persisted as CSV: doc_id, label, probability.
void save_assignment_csv(const ClusterAssignment& a, const std::vector<std::string>& doc_ids,
                         const std::string& path);
ClusterAssignment load_assignment_csv(const std::string& path,
                                      std::vector<std::string>* doc_ids = nullptr);

}  // namespace litscape::densclust
