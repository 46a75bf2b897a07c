#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sigforge/corpus.hpp"
#include "sigforge/feature_filter.hpp"
#include "sigforge/vgmm.hpp"

namespace sigforge {

enum class Normalization { Scale, Bistochastic };

// Binary sample-by-feature occurrence matrix with zero rows/cols pruned.
// row_ids/col_ids map matrix-local indices back to sample ids and to
// positions in the caller's feature list.
struct OccurrenceMatrix {
    Eigen::MatrixXd cells;  // r x c, entries in {0,1}
    Eigen::VectorXd row_sums;
    Eigen::VectorXd col_sums;
    std::vector<std::uint32_t> row_ids;
    std::vector<std::size_t> col_ids;
    std::vector<std::uint32_t> dropped_samples;
    std::vector<std::size_t> dropped_features;

    int rows() const { return static_cast<int>(cells.rows()); }
    int cols() const { return static_cast<int>(cells.cols()); }
};

struct BistochasticResult {
    Eigen::MatrixXd matrix;
    bool converged = false;
    int iterations = 0;
};

// Joint embedding of samples (first row_block rows) and features (the rest).
struct SpectralEmbedding {
    Eigen::MatrixXd z;  // (r+c) x d
    int d = 0;
    int row_block = 0;
};

// Bicluster in matrix-local coordinates, as produced by extraction.
struct LocalBicluster {
    std::vector<int> rows;
    std::vector<int> cols;
};

// Bicluster mapped back to sample ids and feature-list positions.
struct Bicluster {
    std::vector<std::uint32_t> row_ids;
    std::vector<std::size_t> col_ids;
};

// Throws InsufficientSignal if fewer than 2 rows or 2 cols survive pruning.
OccurrenceMatrix build_matrix(const CorpusManifest& samples,
                              const std::vector<FeatureOccurrence>& features);

// (A_n)_ij = A_ij / sqrt(row_sum_i * col_sum_j).
Eigen::MatrixXd normalize_scale(const OccurrenceMatrix& m);

// Sinkhorn scaling toward row sums 1 and column sums r/c. Non-convergence
// within max_iter is flagged, not fatal.
BistochasticResult normalize_bistochastic(const OccurrenceMatrix& m, double tol = 1e-6,
                                          int max_iter = 1000);

// Spectral embedding: leading d+1 singular triplets of a_n with the trivial
// first pair discarded, scaled by the inverse square roots of m's degree
// sums. d = clamp(floor(log2(min(r,c)/2)), 1, min(r,c)-1).
SpectralEmbedding embed(const Eigen::MatrixXd& a_n, const OccurrenceMatrix& m);

// Soft-membership extraction: point j belongs to component i iff its
// responsibility exceeds 1/(k_effective+1). Components with fewer than two
// members on either side are dropped, then adaptive size floors
// r_min = min(5, largest row count), c_min = min(5, largest col count)
// are applied over the survivors.
std::vector<LocalBicluster> extract_biclusters(const MixtureResult& mix, int r, int c);

// Density-clustering fallback over the sample block of the embedding.
// A cluster's features are those present in strictly more than half of its
// samples; clusters below 2 rows or 2 cols are dropped.
std::vector<LocalBicluster> hdbscan_fallback(const SpectralEmbedding& embedding,
                                             const OccurrenceMatrix& m);

// Full pipeline: matrix, normalization, embedding, mixture fit (restarts in
// descending-bound order, first restart with surviving biclusters wins),
// then the density fallback if every restart comes up empty.
// Deterministic given (inputs, seed).
std::vector<Bicluster> bicluster(const CorpusManifest& samples,
                                 const std::vector<FeatureOccurrence>& features,
                                 Normalization normalization, std::uint64_t seed);

}  // namespace sigforge
