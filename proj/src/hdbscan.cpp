#include "sigforge/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sigforge/util.hpp"

namespace sigforge {
namespace {

// Guard for zero-distance merges (duplicate points): lambda = 1/dist is
// capped so stability sums stay finite.
constexpr double kLambdaCap = 1e12;

double to_lambda(double dist) { return dist > 1.0 / kLambdaCap ? 1.0 / dist : kLambdaCap; }

struct MstEdge {
    int u, v;
    double w;
};

// Dense Prim over the implicit mutual-reachability graph. Ties broken by
// smallest index so the tree is deterministic.
std::vector<MstEdge> mst_edges(const Eigen::MatrixXd& X, const Eigen::VectorXd& core) {
    const int n = static_cast<int>(X.rows());
    std::vector<char> in_tree(n, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<int> best_from(n, 0);
    std::vector<MstEdge> edges;
    edges.reserve(n - 1);

    in_tree[0] = 1;
    for (int j = 1; j < n; ++j) {
        const double d = (X.row(0) - X.row(j)).norm();
        best[j] = std::max({core(0), core(j), d});
        best_from[j] = 0;
    }
    for (int step = 1; step < n; ++step) {
        int pick = -1;
        for (int j = 0; j < n; ++j) {
            if (!in_tree[j] && (pick < 0 || best[j] < best[pick])) pick = j;
        }
        in_tree[pick] = 1;
        edges.push_back({best_from[pick], pick, best[pick]});
        for (int j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double d = (X.row(pick) - X.row(j)).norm();
            const double mrd = std::max({core(pick), core(j), d});
            if (mrd < best[j]) {
                best[j] = mrd;
                best_from[j] = pick;
            }
        }
    }
    return edges;
}

// Single-linkage dendrogram node. Leaves are 0..n-1, internal nodes follow.
struct DendroNode {
    int left = -1, right = -1;
    double dist = 0.0;
    int size = 1;
};

struct Dsu {
    std::vector<int> parent;
    std::vector<int> node;  // dendrogram node currently representing the set
    explicit Dsu(int n) : parent(n), node(n) {
        std::iota(parent.begin(), parent.end(), 0);
        std::iota(node.begin(), node.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
};

std::vector<DendroNode> build_dendrogram(int n, std::vector<MstEdge> edges) {
    std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
        if (a.w != b.w) return a.w < b.w;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    std::vector<DendroNode> nodes(2 * n - 1);
    Dsu dsu(n);
    int next = n;
    for (const MstEdge& e : edges) {
        const int ru = dsu.find(e.u), rv = dsu.find(e.v);
        DendroNode& parent = nodes[next];
        parent.left = dsu.node[ru];
        parent.right = dsu.node[rv];
        parent.dist = e.w;
        parent.size = nodes[parent.left].size + nodes[parent.right].size;
        dsu.parent[ru] = rv;
        dsu.node[rv] = next;
        ++next;
    }
    return nodes;
}

void collect_leaves(const std::vector<DendroNode>& dendro, int n, int root,
                    std::vector<int>& out) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node < n) {
            out.push_back(node);
        } else {
            stack.push_back(dendro[node].left);
            stack.push_back(dendro[node].right);
        }
    }
}

struct CondensedNode {
    int parent = -1;
    int anchor = -1;  // dendrogram node at birth; members live under it
    double birth = 0.0;
    double stability = 0.0;
    std::vector<int> children;
};

// Condense the dendrogram: splits where both sides reach min_cluster_size
// spawn child clusters; smaller splinters fall out as in-cluster noise and
// only contribute to the stability sum.
std::vector<CondensedNode> condense(const std::vector<DendroNode>& dendro, int n,
                                    int min_cluster_size) {
    std::vector<CondensedNode> cnodes;
    if (n < 2) return cnodes;
    const int root = 2 * n - 2;
    cnodes.push_back({-1, root, 0.0, 0.0, {}});

    // (dendrogram node to walk, condensed node it belongs to)
    std::vector<std::pair<int, int>> stack{{root, 0}};
    while (!stack.empty()) {
        auto [dn, cn] = stack.back();
        stack.pop_back();
        if (dn < n) continue;
        const DendroNode& node = dendro[dn];
        const double lambda = to_lambda(node.dist);
        const double birth = cnodes[cn].birth;
        const int ls = dendro[node.left].size;
        const int rs = dendro[node.right].size;
        const bool left_big = ls >= min_cluster_size;
        const bool right_big = rs >= min_cluster_size;
        if (left_big && right_big) {
            // Cluster dies, two children born. All remaining points exit here.
            cnodes[cn].stability += (ls + rs) * (lambda - birth);
            for (int child_dendro : {node.left, node.right}) {
                const int id = static_cast<int>(cnodes.size());
                cnodes.push_back({cn, child_dendro, lambda, 0.0, {}});
                cnodes[cn].children.push_back(id);
                stack.emplace_back(child_dendro, id);
            }
        } else if (left_big || right_big) {
            const int keep = left_big ? node.left : node.right;
            const int drop = left_big ? node.right : node.left;
            cnodes[cn].stability += dendro[drop].size * (lambda - birth);
            stack.emplace_back(keep, cn);
        } else {
            cnodes[cn].stability += (ls + rs) * (lambda - birth);
        }
    }
    return cnodes;
}

}  // namespace

HdbscanResult hdbscan(const Eigen::MatrixXd& points, int min_cluster_size,
                      int min_samples) {
    const int n = static_cast<int>(points.rows());
    if (min_cluster_size < 2) throw ArgumentError("min_cluster_size must be at least 2");
    if (min_samples < 1) throw ArgumentError("min_samples must be at least 1");

    HdbscanResult result;
    result.labels.assign(n, -1);
    if (n < 2) return result;

    // Core distance: k-th nearest neighbor with the point itself counted
    // first, so min_samples=2 means the nearest other point.
    const int k = std::min(std::max(min_samples - 1, 1), n - 1);
    Eigen::VectorXd core(n);
    std::vector<double> dists(n - 1);
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = 0; j < n; ++j) {
            if (j != i) dists[m++] = (points.row(i) - points.row(j)).norm();
        }
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        core(i) = dists[k - 1];
    }

    const auto dendro = build_dendrogram(n, mst_edges(points, core));
    auto cnodes = condense(dendro, n, min_cluster_size);
    if (cnodes.empty()) return result;

    // Excess-of-mass selection, bottom-up. Children were appended after
    // their parent, so reverse index order is a valid bottom-up sweep.
    // subtree[i] holds the best selectable stability mass under i.
    std::vector<double> subtree(cnodes.size(), 0.0);
    std::vector<char> selected(cnodes.size(), 0);
    for (int i = static_cast<int>(cnodes.size()) - 1; i >= 1; --i) {
        double child_sum = 0.0;
        for (int c : cnodes[i].children) child_sum += subtree[c];
        if (cnodes[i].children.empty() || cnodes[i].stability >= child_sum) {
            selected[i] = 1;
            subtree[i] = cnodes[i].stability;
        } else {
            subtree[i] = child_sum;
        }
    }
    // A selected ancestor absorbs its descendants' selections.
    std::vector<char> suppressed(cnodes.size(), 0);
    for (std::size_t i = 1; i < cnodes.size(); ++i) {
        if (suppressed[cnodes[i].parent] || (cnodes[i].parent > 0 && selected[cnodes[i].parent]))
            suppressed[i] = 1;
    }

    std::vector<std::vector<int>> clusters;
    for (std::size_t i = 1; i < cnodes.size(); ++i) {
        if (!selected[i] || suppressed[i]) continue;
        std::vector<int> members;
        collect_leaves(dendro, n, cnodes[i].anchor, members);
        std::sort(members.begin(), members.end());
        clusters.push_back(std::move(members));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (int p : clusters[c]) result.labels[p] = static_cast<int>(c);
    }
    result.clusters = std::move(clusters);
    return result;
}

}  // namespace sigforge
