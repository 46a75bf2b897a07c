#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sigforge {

// Density-based clustering over a Euclidean point set. Returns hard
// clusters; points in no cluster are noise (label -1).
//
// The implementation follows the condensed-tree formulation: mutual
// reachability distances, a single-linkage hierarchy from the minimum
// spanning tree, condensation by minimum cluster size, then
// excess-of-mass cluster selection. The root is never selectable, so a
// data set with no internal density structure yields zero clusters.
struct HdbscanResult {
    // Each cluster is a sorted list of point indices. Clusters are ordered
    // by their smallest member.
    std::vector<std::vector<int>> clusters;
    // Per-point cluster index, -1 for noise.
    std::vector<int> labels;
};

HdbscanResult hdbscan(const Eigen::MatrixXd& points, int min_cluster_size = 2,
                      int min_samples = 2);

}  // namespace sigforge
