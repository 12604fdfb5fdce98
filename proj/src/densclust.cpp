#include "litscape/densclust.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include <nlohmann/json.hpp>

#include "litscape/util/csv.hpp"
#include "litscape/util/strings.hpp"

namespace litscape::densclust {

int ClusterAssignment::cluster_count() const {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    return max_label + 1;
}

Eigen::VectorXd core_distances(const Eigen::MatrixXd& points, int min_samples) {
    const auto n = points.rows();
    if (min_samples < 1 || min_samples >= n)
        throw DensclustError("core_distances: require 1 <= min_samples <= n-1");
    Eigen::VectorXd cores(n);
    std::vector<double> dists(static_cast<std::size_t>(n) - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t at = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            dists[at++] = (points.row(i) - points.row(j)).norm();
        }
        std::nth_element(dists.begin(), dists.begin() + (min_samples - 1), dists.end());
        cores[i] = dists[static_cast<std::size_t>(min_samples - 1)];
    }
    return cores;
}

double mutual_reachability(double d_ab, double core_a, double core_b) {
    return std::max({d_ab, core_a, core_b});
}

namespace {

inline double lambda_of(double dist) {
    if (dist <= 0.0) return kLambdaCap;
    return std::min(1.0 / dist, kLambdaCap);
}

struct MstEdge {
    int u, v;  // normalized u < v
    double w;
};

std::vector<MstEdge> prim_mst(const Eigen::MatrixXd& points, const Eigen::VectorXd& cores) {
    const auto n = points.rows();
    std::vector<bool> in_tree(static_cast<std::size_t>(n), false);
    std::vector<double> best(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<int> best_from(static_cast<std::size_t>(n), -1);
    std::vector<MstEdge> edges;
    edges.reserve(static_cast<std::size_t>(n) - 1);

    int current = 0;
    in_tree[0] = true;
    for (Eigen::Index step = 1; step < n; ++step) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (in_tree[static_cast<std::size_t>(j)]) continue;
            double d = (points.row(current) - points.row(j)).norm();
            double w = mutual_reachability(d, cores[current], cores[j]);
            if (w < best[static_cast<std::size_t>(j)]) {
                best[static_cast<std::size_t>(j)] = w;
                best_from[static_cast<std::size_t>(j)] = current;
            }
        }
        int pick = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (in_tree[static_cast<std::size_t>(j)]) continue;
            if (pick < 0 || best[static_cast<std::size_t>(j)] < best[static_cast<std::size_t>(pick)])
                pick = static_cast<int>(j);  // ties keep the lower index
        }
        int from = best_from[static_cast<std::size_t>(pick)];
        edges.push_back({std::min(from, pick), std::max(from, pick),
                         best[static_cast<std::size_t>(pick)]});
        in_tree[static_cast<std::size_t>(pick)] = true;
        current = pick;
    }
    return edges;
}

struct DendrogramNode {
    int left = -1;   // node id; < n means point
    int right = -1;
    double dist = 0;
    int size = 1;
};

// Single-linkage over sorted MST edges; returns 2n-1 nodes, root last.
std::vector<DendrogramNode> single_linkage(std::vector<MstEdge> edges, int n) {
    std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
        if (a.w != b.w) return a.w < b.w;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    std::vector<DendrogramNode> nodes(static_cast<std::size_t>(2 * n - 1));
    std::vector<int> component(static_cast<std::size_t>(n));
    std::iota(component.begin(), component.end(), 0);
    // flat union-find over point indices, tracking each set's current node
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };

    int next_id = n;
    for (const auto& e : edges) {
        int ru = find(e.u);
        int rv = find(e.v);
        DendrogramNode node;
        node.left = component[static_cast<std::size_t>(ru)];
        node.right = component[static_cast<std::size_t>(rv)];
        node.dist = e.w;
        node.size = (node.left < n ? 1 : nodes[static_cast<std::size_t>(node.left)].size) +
                    (node.right < n ? 1 : nodes[static_cast<std::size_t>(node.right)].size);
        nodes[static_cast<std::size_t>(next_id)] = node;
        parent[static_cast<std::size_t>(rv)] = ru;
        component[static_cast<std::size_t>(ru)] = next_id;
        ++next_id;
    }
    return nodes;
}

int subtree_size(const std::vector<DendrogramNode>& nodes, int id, int n) {
    return id < n ? 1 : nodes[static_cast<std::size_t>(id)].size;
}

void collect_points(const std::vector<DendrogramNode>& nodes, int id, int n,
                    std::vector<int>& out) {
    if (id < n) {
        out.push_back(id);
        return;
    }
    collect_points(nodes, nodes[static_cast<std::size_t>(id)].left, n, out);
    collect_points(nodes, nodes[static_cast<std::size_t>(id)].right, n, out);
}

}  // namespace

CondensedTree build_hierarchy(const Eigen::MatrixXd& points, const ClusterConfig& cfg) {
    const auto n = static_cast<int>(points.rows());
    if (cfg.min_cluster_size < 2)
        throw DensclustError("build_hierarchy: min_cluster_size must be >= 2");
    if (n < cfg.min_cluster_size)
        throw DensclustError("build_hierarchy: n < min_cluster_size");

    Eigen::VectorXd cores = core_distances(points, cfg.min_samples);
    auto dendrogram = single_linkage(prim_mst(points, cores), n);

    CondensedTree tree;
    tree.n_points = n;
    const int mcs = cfg.min_cluster_size;
    const int root_dendro = 2 * n - 2;

    // Walk the dendrogram top-down, relabeling surviving clusters. A side
    // smaller than min_cluster_size sheds its points at the split's
    // lambda; the surviving side keeps the parent's cluster id.
    int next_cluster = n;
    std::vector<std::pair<int, int>> stack;  // (dendrogram node, cluster id)
    stack.emplace_back(root_dendro, next_cluster++);
    while (!stack.empty()) {
        auto [node_id, cluster_id] = stack.back();
        stack.pop_back();

        int current = node_id;
        while (true) {
            // min_cluster_size >= 2 keeps every surviving side internal
            if (current < n)
                throw DensclustError("internal: condense walk reached a bare point");
            const auto& node = dendrogram[static_cast<std::size_t>(current)];
            double lambda = lambda_of(node.dist);
            int ls = subtree_size(dendrogram, node.left, n);
            int rs = subtree_size(dendrogram, node.right, n);
            if (ls >= mcs && rs >= mcs) {
                int left_cluster = next_cluster++;
                tree.rows.push_back({cluster_id, left_cluster, lambda, ls});
                int right_cluster = next_cluster++;
                tree.rows.push_back({cluster_id, right_cluster, lambda, rs});
                stack.emplace_back(node.left, left_cluster);
                stack.emplace_back(node.right, right_cluster);
                break;
            }
            if (ls < mcs && rs < mcs) {
                std::vector<int> pts;
                collect_points(dendrogram, node.left, n, pts);
                collect_points(dendrogram, node.right, n, pts);
                std::sort(pts.begin(), pts.end());
                for (int p : pts) tree.rows.push_back({cluster_id, p, lambda, 1});
                break;
            }
            int shed_side = ls < mcs ? node.left : node.right;
            int keep_side = ls < mcs ? node.right : node.left;
            std::vector<int> pts;
            collect_points(dendrogram, shed_side, n, pts);
            std::sort(pts.begin(), pts.end());
            for (int p : pts) tree.rows.push_back({cluster_id, p, lambda, 1});
            current = keep_side;
        }
    }
    return tree;
}

ClusterAssignment select_leaf_clusters(const CondensedTree& tree) {
    const int n = tree.n_points;
    ClusterAssignment assignment;
    assignment.labels.assign(static_cast<std::size_t>(n), -1);
    assignment.probabilities.assign(static_cast<std::size_t>(n), 0.0);

    // leaves: cluster ids that are parents of points only; root excluded
    std::map<int, bool> has_cluster_child;  // cluster id -> any cluster child
    has_cluster_child[n] = false;
    for (const auto& row : tree.rows) {
        if (row.child >= n) {
            has_cluster_child[row.parent] = true;
            has_cluster_child[row.child] = false;
        } else {
            if (!has_cluster_child.count(row.parent)) has_cluster_child[row.parent] = false;
        }
    }

    struct Leaf {
        int first_point = std::numeric_limits<int>::max();
        std::vector<std::pair<int, double>> members;  // (point, lambda)
        double lambda_max = 0;
    };
    std::map<int, Leaf> leaves;
    for (const auto& [cid, has_child] : has_cluster_child) {
        if (cid == n && tree.rows.empty()) continue;
        if (!has_child && cid != n) leaves[cid] = {};
    }
    // root is selectable never; with no surviving split there are no leaves
    for (const auto& row : tree.rows) {
        if (row.child >= n) continue;
        auto it = leaves.find(row.parent);
        if (it == leaves.end()) continue;
        it->second.members.emplace_back(row.child, row.lambda);
        it->second.first_point = std::min(it->second.first_point, row.child);
        it->second.lambda_max = std::max(it->second.lambda_max, row.lambda);
    }

    std::vector<const Leaf*> ordered;
    std::vector<int> leaf_ids;
    for (auto& [cid, leaf] : leaves) {
        ordered.push_back(&leaf);
        leaf_ids.push_back(cid);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const Leaf* a, const Leaf* b) { return a->first_point < b->first_point; });

    for (std::size_t label = 0; label < ordered.size(); ++label) {
        const Leaf& leaf = *ordered[label];
        for (auto [point, lambda] : leaf.members) {
            assignment.labels[static_cast<std::size_t>(point)] = static_cast<int>(label);
            double p = leaf.lambda_max > 0 ? lambda / leaf.lambda_max : 1.0;
            assignment.probabilities[static_cast<std::size_t>(point)] =
                std::clamp(p, 0.0, 1.0);
        }
    }
    return assignment;
}

ClusterAssignment cluster(const Eigen::MatrixXd& points, const ClusterConfig& cfg) {
    if (cfg.selection == Selection::excess_of_mass)
        throw DensclustError("excess_of_mass selection is reserved but not implemented");
    return select_leaf_clusters(build_hierarchy(points, cfg));
}

std::vector<std::vector<int>> top_members(const ClusterAssignment& assignment, int k) {
    int clusters = assignment.cluster_count();
    std::vector<std::vector<int>> out(static_cast<std::size_t>(clusters));
    for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
        int label = assignment.labels[i];
        if (label >= 0) out[static_cast<std::size_t>(label)].push_back(static_cast<int>(i));
    }
    for (auto& members : out) {
        std::sort(members.begin(), members.end(), [&](int a, int b) {
            double pa = assignment.probabilities[static_cast<std::size_t>(a)];
            double pb = assignment.probabilities[static_cast<std::size_t>(b)];
            if (pa != pb) return pa > pb;
            return a < b;
        });
        if (k >= 0 && members.size() > static_cast<std::size_t>(k))
            members.resize(static_cast<std::size_t>(k));
    }
    return out;
}

std::string CondensedTree::to_json() const {
    nlohmann::ordered_json j;
    j["n_points"] = n_points;
    auto& rows_json = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        rows_json.push_back({{"parent", row.parent},
                             {"child", row.child},
                             {"lambda", row.lambda},
                             {"child_size", row.child_size}});
    }
    return j.dump(2) + "\n";
}

void save_assignment_csv(const ClusterAssignment& a, const std::vector<std::string>& doc_ids,
                         const std::string& path) {
    if (doc_ids.size() != a.labels.size())
        throw DensclustError("save_assignment_csv: doc_ids/labels mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DensclustError("cannot write " + path);
    out << csv::format_row({"doc_id", "label", "probability"});
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        out << csv::format_row({doc_ids[i], std::to_string(a.labels[i]),
                                strings::format_double(a.probabilities[i])});
    }
}

ClusterAssignment load_assignment_csv(const std::string& path,
                                      std::vector<std::string>* doc_ids) {
    auto rows = csv::parse_file(path);
    ClusterAssignment a;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() < 3) throw DensclustError("bad assignment csv row");
        if (doc_ids) doc_ids->push_back(rows[r][0]);
        a.labels.push_back(std::stoi(rows[r][1]));
        a.probabilities.push_back(std::stod(rows[r][2]));
    }
    return a;
}

}  // namespace litscape::densclust
