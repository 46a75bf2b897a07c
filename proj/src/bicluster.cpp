#include "sigforge/bicluster.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "sigforge/hdbscan.hpp"
#include "sigforge/util.hpp"

namespace sigforge {

OccurrenceMatrix build_matrix(const CorpusManifest& samples,
                              const std::vector<FeatureOccurrence>& features) {
    const std::size_t n_samples = samples.samples.size();
    for (const auto& f : features) {
        if (f.file_set.size() != n_samples)
            throw ArgumentError("feature file_set size does not match sample count");
    }

    std::vector<std::size_t> live_cols;
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (features[j].file_set.any()) live_cols.push_back(j);
    }
    std::vector<std::uint32_t> live_rows;
    for (std::size_t i = 0; i < n_samples; ++i) {
        bool hit = false;
        for (std::size_t j : live_cols) {
            if (features[j].file_set.test(i)) {
                hit = true;
                break;
            }
        }
        if (hit) live_rows.push_back(static_cast<std::uint32_t>(i));
    }

    OccurrenceMatrix m;
    m.row_ids = live_rows;
    m.col_ids = live_cols;
    for (std::size_t i = 0; i < n_samples; ++i) {
        if (!std::binary_search(live_rows.begin(), live_rows.end(),
                                static_cast<std::uint32_t>(i)))
            m.dropped_samples.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (!features[j].file_set.any()) m.dropped_features.push_back(j);
    }

    const int r = static_cast<int>(live_rows.size());
    const int c = static_cast<int>(live_cols.size());
    if (r < 2 || c < 2)
        throw InsufficientSignal("occurrence matrix degenerates to " + std::to_string(r) +
                                 "x" + std::to_string(c) + ", need at least 2x2");

    m.cells = Eigen::MatrixXd::Zero(r, c);
    for (int j = 0; j < c; ++j) {
        const FileSet& fs = features[live_cols[j]].file_set;
        for (int i = 0; i < r; ++i) {
            if (fs.test(live_rows[i])) m.cells(i, j) = 1.0;
        }
    }
    m.row_sums = m.cells.rowwise().sum();
    m.col_sums = m.cells.colwise().sum();
    return m;
}

Eigen::MatrixXd normalize_scale(const OccurrenceMatrix& m) {
    for (int i = 0; i < m.rows(); ++i)
        if (m.row_sums(i) <= 0) throw NumericalError("zero row sum in scale normalization");
    for (int j = 0; j < m.cols(); ++j)
        if (m.col_sums(j) <= 0) throw NumericalError("zero col sum in scale normalization");
    const Eigen::VectorXd ri = m.row_sums.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd ci = m.col_sums.cwiseSqrt().cwiseInverse();
    return ri.asDiagonal() * m.cells * ci.asDiagonal();
}

BistochasticResult normalize_bistochastic(const OccurrenceMatrix& m, double tol,
                                          int max_iter) {
    const int r = m.rows(), c = m.cols();
    const double row_target = 1.0;
    const double col_target = static_cast<double>(r) / c;

    BistochasticResult out;
    out.matrix = m.cells;
    for (int iter = 1; iter <= max_iter; ++iter) {
        out.iterations = iter;
        for (int i = 0; i < r; ++i) out.matrix.row(i) *= row_target / out.matrix.row(i).sum();
        for (int j = 0; j < c; ++j) out.matrix.col(j) *= col_target / out.matrix.col(j).sum();
        double dev = 0.0;
        for (int i = 0; i < r; ++i)
            dev = std::max(dev, std::abs(out.matrix.row(i).sum() - row_target));
        for (int j = 0; j < c; ++j)
            dev = std::max(dev, std::abs(out.matrix.col(j).sum() - col_target));
        if (dev < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

SpectralEmbedding embed(const Eigen::MatrixXd& a_n, const OccurrenceMatrix& m) {
    if (!a_n.allFinite()) throw NumericalError("non-finite entries in normalized matrix");
    const int r = m.rows(), c = m.cols();
    const int min_rc = std::min(r, c);
    int d = static_cast<int>(std::floor(std::log2(min_rc / 2.0)));
    d = std::clamp(d, 1, min_rc - 1);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a_n, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("SVD did not converge on a " + std::to_string(r) + "x" +
                             std::to_string(c) + " matrix");

    // Leading pair carries the trivial constant structure; keep the next d.
    Eigen::MatrixXd u = svd.matrixU().middleCols(1, d);
    Eigen::MatrixXd v = svd.matrixV().middleCols(1, d);

    // Singular vectors for numerically zero singular values are an
    // arbitrary null-space basis, not data, so those directions must not
    // reach the clustering stage. Zeroing them is not enough: a constant
    // coordinate biases the mixture fit toward pooling everything into
    // one component (shared degenerate dims reward large counts). Drop
    // the columns instead. If every kept direction is degenerate (a
    // uniform matrix), keep one zero column so all points embed to a
    // single coincident location.
    const double sigma_floor = 1e-9 * svd.singularValues()(0);
    int kept = 0;
    for (int t = 0; t < d; ++t) {
        if (svd.singularValues()(t + 1) > sigma_floor) {
            u.col(kept) = u.col(t);
            v.col(kept) = v.col(t);
            ++kept;
        }
    }
    if (kept == 0) {
        u.col(0).setZero();
        v.col(0).setZero();
        kept = 1;
    }
    u.conservativeResize(Eigen::NoChange, kept);
    v.conservativeResize(Eigen::NoChange, kept);
    d = kept;

    // Singular vectors have arbitrary sign; fix each pair so downstream
    // clustering is reproducible across runs and permutations.
    for (int t = 0; t < d; ++t) {
        const double s = u.col(t).array().cube().sum() + v.col(t).array().cube().sum();
        if (s < 0) {
            u.col(t) = -u.col(t);
            v.col(t) = -v.col(t);
        }
    }

    SpectralEmbedding e;
    e.d = d;
    e.row_block = r;
    e.z.resize(r + c, d);
    const Eigen::VectorXd ri = m.row_sums.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd ci = m.col_sums.cwiseSqrt().cwiseInverse();
    e.z.topRows(r) = ri.asDiagonal() * u;
    e.z.bottomRows(c) = ci.asDiagonal() * v;
    return e;
}

std::vector<LocalBicluster> extract_biclusters(const MixtureResult& mix, int r, int c) {
    if (mix.k_effective < 1) throw ArgumentError("mixture has no components");
    if (mix.responsibilities.rows() != r + c)
        throw ArgumentError("mixture size does not match r+c");

    const double threshold = 1.0 / (mix.k_effective + 1);
    std::vector<LocalBicluster> candidates;
    for (int k = 0; k < mix.k_effective; ++k) {
        LocalBicluster b;
        for (int j = 0; j < r + c; ++j) {
            if (mix.responsibilities(j, k) > threshold) {
                if (j < r)
                    b.rows.push_back(j);
                else
                    b.cols.push_back(j - r);
            }
        }
        if (b.rows.size() >= 2 && b.cols.size() >= 2) candidates.push_back(std::move(b));
    }
    if (candidates.empty()) return candidates;

    std::size_t max_rows = 0, max_cols = 0;
    for (const auto& b : candidates) {
        max_rows = std::max(max_rows, b.rows.size());
        max_cols = std::max(max_cols, b.cols.size());
    }
    const std::size_t r_min = std::min<std::size_t>(5, max_rows);
    const std::size_t c_min = std::min<std::size_t>(5, max_cols);

    std::vector<LocalBicluster> out;
    for (auto& b : candidates) {
        if (b.rows.size() >= r_min && b.cols.size() >= c_min) out.push_back(std::move(b));
    }
    return out;
}

std::vector<LocalBicluster> hdbscan_fallback(const SpectralEmbedding& embedding,
                                             const OccurrenceMatrix& m) {
    const int r = m.rows(), c = m.cols();
    std::vector<LocalBicluster> out;
    if (r < 2) return out;

    const HdbscanResult clustering = hdbscan(embedding.z.topRows(r), 2, 2);
    for (const auto& cluster : clustering.clusters) {
        LocalBicluster b;
        b.rows = cluster;
        for (int j = 0; j < c; ++j) {
            int present = 0;
            for (int i : cluster) present += m.cells(i, j) > 0.5 ? 1 : 0;
            if (2 * present > static_cast<int>(cluster.size())) b.cols.push_back(j);
        }
        if (b.rows.size() >= 2 && b.cols.size() >= 2) out.push_back(std::move(b));
    }
    return out;
}

std::vector<Bicluster> bicluster(const CorpusManifest& samples,
                                 const std::vector<FeatureOccurrence>& features,
                                 Normalization normalization, std::uint64_t seed) {
    const OccurrenceMatrix m = build_matrix(samples, features);
    Eigen::MatrixXd a_n;
    if (normalization == Normalization::Scale) {
        a_n = normalize_scale(m);
    } else {
        a_n = normalize_bistochastic(m).matrix;
    }
    const SpectralEmbedding e = embed(a_n, m);

    const int r = m.rows(), c = m.cols();
    const int k_max = std::min(20, (r + c) / 2);
    const auto fits = vgmm_fit_restarts(e.z, k_max, seed);

    std::vector<LocalBicluster> local;
    for (const auto& fit : fits) {
        local = extract_biclusters(fit, r, c);
        if (!local.empty()) break;
    }

    if (local.empty()) {
        local = hdbscan_fallback(e, m);
    } else {
        // Component membership reflects embedding proximity, not cell
        // density, so an extracted bicluster can drag in columns that are
        // mostly empty over its rows: one-file noise columns riding along
        // with a dense block, or, on unstructured input, the whole matrix
        // as a single covering component. Keep a column only where it is
        // actually dense over the bicluster's rows; a candidate left with
        // fewer than two columns was geometry, not structure. The mixture
        // did produce an answer, so a refinement rejecting everything is
        // the honest "nothing found" result, not a trigger for the
        // density fallback.
        constexpr double kMinColumnFill = 0.8;
        std::vector<LocalBicluster> dense;
        for (auto& b : local) {
            std::vector<int> cols;
            for (int j : b.cols) {
                double ones = 0.0;
                for (int i : b.rows) ones += m.cells(i, j);
                if (ones >= kMinColumnFill * static_cast<double>(b.rows.size()))
                    cols.push_back(j);
            }
            if (cols.size() < 2) continue;
            b.cols = std::move(cols);
            dense.push_back(std::move(b));
        }
        local = std::move(dense);
    }

    std::vector<Bicluster> out;
    out.reserve(local.size());
    for (const auto& b : local) {
        Bicluster mapped;
        mapped.row_ids.reserve(b.rows.size());
        mapped.col_ids.reserve(b.cols.size());
        for (int i : b.rows) mapped.row_ids.push_back(m.row_ids[i]);
        for (int j : b.cols) mapped.col_ids.push_back(m.col_ids[j]);
        out.push_back(std::move(mapped));
    }
    return out;
}

}  // namespace sigforge
