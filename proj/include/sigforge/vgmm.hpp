// Variational Bayesian Gaussian mixture with diagonal covariances.
//
// The component count is effectively automatic: the fit starts from k_max
// components under a sparse symmetric Dirichlet prior, and components that
// end up with negligible expected weight or no hard-assigned points are
// pruned afterwards.
//
// Determinism contract: identical (points-as-a-set, k_max, seed) give an
// identical result. Points are canonically ordered internally, so callers
// may permute their input freely.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace sigforge {

struct MixtureResult {
    int k_effective = 0;
    Eigen::MatrixXd means;              // k_effective x d
    Eigen::MatrixXd variances;          // k_effective x d, diagonal covariances
    Eigen::VectorXd weights;            // k_effective, sums to 1
    Eigen::MatrixXd responsibilities;   // N x k_effective, rows sum to 1
    double bound = 0.0;                 // evidence lower bound at convergence
    int iterations = 0;
};

// Fits with kRestarts differently seeded initializations and returns every
// result ordered by bound, best first. Callers that only probe the best fit
// use vgmm_fit; the biclustering driver inspects the others when the best
// one yields nothing usable.
std::vector<MixtureResult> vgmm_fit_restarts(const Eigen::MatrixXd& points, int k_max,
                                             std::uint64_t seed);

MixtureResult vgmm_fit(const Eigen::MatrixXd& points, int k_max, std::uint64_t seed);

}  // namespace sigforge
