#include "sigforge/vgmm.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigforge/util.hpp"

namespace sigforge {
namespace {

constexpr int kRestarts = 3;
constexpr int kMaxIterations = 200;
constexpr double kBoundTolerance = 1e-5;
constexpr double kLn2Pi = 1.8378770664093454836;

using Eigen::MatrixXd;
using Eigen::VectorXd;

double digamma(double x) { return boost::math::digamma(x); }

// Gaussian-Gamma prior, one Gamma rate per dimension (diagonal model).
struct Prior {
    double alpha0 = 0;  // symmetric Dirichlet concentration
    double beta0 = 1.0; // mean-precision coupling
    double a0 = 1.0;    // Gamma shape
    VectorXd m0;        // data mean
    VectorXd b0;        // Gamma rate, from per-dimension data variance
};

// Posterior state for all k_max components.
struct Posterior {
    VectorXd alpha;  // K
    VectorXd beta;   // K
    MatrixXd m;      // K x D
    VectorXd a;      // K
    MatrixXd b;      // K x D
};

struct Fit {
    Posterior post;
    MatrixXd resp;  // N x K
    double bound = -std::numeric_limits<double>::infinity();
    int iterations = 0;
};

// Points sorted lexicographically by coordinates; ties are harmless because
// tied points are identical and therefore interchangeable. This is what
// makes the whole fit equivariant under caller-side permutations.
std::vector<int> canonical_order(const MatrixXd& X) {
    std::vector<int> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&X](int i, int j) {
        for (int d = 0; d < X.cols(); ++d) {
            if (X(i, d) != X(j, d)) return X(i, d) < X(j, d);
        }
        return false;
    });
    return order;
}

// k-means++ seeding followed by a hard assignment to the chosen centers.
MatrixXd init_responsibilities(const MatrixXd& X, int K, SplitMix64& rng) {
    const int N = static_cast<int>(X.rows());
    std::vector<int> centers;
    centers.reserve(K);
    centers.push_back(static_cast<int>(rng.below(N)));
    VectorXd d2 = (X.rowwise() - X.row(centers[0])).rowwise().squaredNorm();
    while (static_cast<int>(centers.size()) < K) {
        const double total = d2.sum();
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.below(N));
        } else {
            const double target = rng.next_unit() * total;
            double acc = 0.0;
            pick = N - 1;
            for (int i = 0; i < N; ++i) {
                acc += d2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(pick);
        d2 = d2.cwiseMin((X.rowwise() - X.row(pick)).rowwise().squaredNorm());
    }

    MatrixXd resp = MatrixXd::Zero(N, K);
    for (int i = 0; i < N; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            const double d = (X.row(i) - X.row(centers[k])).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        resp(i, best) = 1.0;
    }
    return resp;
}

Posterior update_posterior(const MatrixXd& X, const MatrixXd& resp, const Prior& prior) {
    const int K = static_cast<int>(resp.cols());
    const int D = static_cast<int>(X.cols());
    Posterior post;
    post.alpha.resize(K);
    post.beta.resize(K);
    post.m.resize(K, D);
    post.a.resize(K);
    post.b.resize(K, D);

    const VectorXd Nk = resp.colwise().sum();
    for (int k = 0; k < K; ++k) {
        const double nk = Nk(k);
        post.alpha(k) = prior.alpha0 + nk;
        post.beta(k) = prior.beta0 + nk;
        post.a(k) = prior.a0 + 0.5 * nk;

        VectorXd xbar = prior.m0;
        VectorXd scatter = VectorXd::Zero(D);
        if (nk > 0.0) {
            xbar = (resp.col(k).transpose() * X).transpose() / nk;
            // N_k * S_k per dimension
            scatter = (resp.col(k).asDiagonal() * (X.rowwise() - xbar.transpose()))
                          .array()
                          .square()
                          .colwise()
                          .sum();
        }
        post.m.row(k) =
            ((prior.beta0 * prior.m0 + nk * xbar) / post.beta(k)).transpose();
        const VectorXd dm = xbar - prior.m0;
        post.b.row(k) = (prior.b0 + 0.5 * scatter +
                         0.5 * (prior.beta0 * nk / post.beta(k)) * dm.array().square().matrix())
                            .transpose();
    }
    return post;
}

// One E-step. Returns the new responsibilities and the sum of per-point
// log-normalizers, which is the data part of the evidence bound.
double e_step(const MatrixXd& X, const Posterior& post, MatrixXd& resp_out) {
    const int N = static_cast<int>(X.rows());
    const int K = static_cast<int>(post.alpha.size());
    const int D = static_cast<int>(X.cols());

    const double psi_alpha_hat = digamma(post.alpha.sum());
    MatrixXd log_rho(N, K);
    for (int k = 0; k < K; ++k) {
        const double e_log_pi = digamma(post.alpha(k)) - psi_alpha_hat;
        double e_log_lambda = 0.0;
        for (int d = 0; d < D; ++d)
            e_log_lambda += digamma(post.a(k)) - std::log(post.b(k, d));
        const double constant =
            e_log_pi + 0.5 * (e_log_lambda - D * kLn2Pi - D / post.beta(k));
        const VectorXd e_lambda = post.a(k) / post.b.row(k).array();
        const VectorXd quad =
            ((X.rowwise() - post.m.row(k)).array().square().matrix()) * e_lambda;
        log_rho.col(k) = VectorXd::Constant(N, constant) - 0.5 * quad;
    }

    double lse_sum = 0.0;
    resp_out.resize(N, K);
    for (int i = 0; i < N; ++i) {
        const double mx = log_rho.row(i).maxCoeff();
        const double lse = mx + std::log((log_rho.row(i).array() - mx).exp().sum());
        lse_sum += lse;
        resp_out.row(i) = (log_rho.row(i).array() - lse).exp();
    }
    return lse_sum;
}

double kl_dirichlet(const VectorXd& alpha, double alpha0) {
    const int K = static_cast<int>(alpha.size());
    const double alpha_hat = alpha.sum();
    const double psi_hat = digamma(alpha_hat);
    double kl = std::lgamma(alpha_hat) - std::lgamma(K * alpha0) + K * std::lgamma(alpha0);
    for (int k = 0; k < K; ++k)
        kl += -std::lgamma(alpha(k)) + (alpha(k) - alpha0) * (digamma(alpha(k)) - psi_hat);
    return kl;
}

double kl_normal_gamma(const Posterior& post, const Prior& prior) {
    const int K = static_cast<int>(post.alpha.size());
    const int D = static_cast<int>(post.m.cols());
    double kl = 0.0;
    for (int k = 0; k < K; ++k) {
        for (int d = 0; d < D; ++d) {
            const double a1 = post.a(k), b1 = post.b(k, d);
            const double a0 = prior.a0, b0 = prior.b0(d);
            // Gamma part (shape/rate parameterization).
            kl += (a1 - a0) * digamma(a1) - std::lgamma(a1) + std::lgamma(a0) +
                  a0 * (std::log(b1) - std::log(b0)) + a1 * (b0 - b1) / b1;
            // Conditional-normal part, expectation over q(lambda).
            const double dm = post.m(k, d) - prior.m0(d);
            kl += 0.5 * (std::log(post.beta(k) / prior.beta0) + prior.beta0 / post.beta(k) -
                         1.0 + prior.beta0 * dm * dm * a1 / b1);
        }
    }
    return kl;
}

// Coordinate ascent from the given starting responsibilities until the
// bound stops moving.
Fit converge(const MatrixXd& X, const Prior& prior, MatrixXd resp) {
    Fit fit;
    fit.resp = std::move(resp);
    double prev_bound = -std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        fit.post = update_posterior(X, fit.resp, prior);
        MatrixXd new_resp;
        const double lse_sum = e_step(X, fit.post, new_resp);
        fit.resp = std::move(new_resp);
        fit.bound = lse_sum - kl_dirichlet(fit.post.alpha, prior.alpha0) -
                    kl_normal_gamma(fit.post, prior);
        fit.iterations = iter;
        if (std::abs(fit.bound - prev_bound) < kBoundTolerance) break;
        prev_bound = fit.bound;
    }
    return fit;
}

Fit fit_once(const MatrixXd& X, int K, const Prior& prior, SplitMix64& rng) {
    Fit fit = converge(X, prior, init_responsibilities(X, K, rng));

    // Coordinate ascent alone cannot drain redundant components that split
    // one true cluster between them: each keeps enough mass that the other
    // never empties, a well-known local optimum of mean-field mixtures.
    // Escape by proposing merges of the most correlated responsibility
    // columns and keeping any merge whose refit improves the bound.
    for (;;) {
        const VectorXd mass = fit.resp.colwise().sum();
        VectorXd norm(K);
        for (int k = 0; k < K; ++k) norm(k) = fit.resp.col(k).norm();

        struct Candidate {
            double overlap;
            int j, k;
        };
        std::vector<Candidate> cands;
        for (int j = 0; j < K; ++j) {
            if (mass(j) < 1e-3) continue;
            for (int k = j + 1; k < K; ++k) {
                if (mass(k) < 1e-3) continue;
                cands.push_back({fit.resp.col(j).dot(fit.resp.col(k)) / (norm(j) * norm(k)),
                                 j, k});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.overlap != b.overlap) return a.overlap > b.overlap;
            if (a.j != b.j) return a.j < b.j;
            return a.k < b.k;
        });

        bool accepted = false;
        const int tries = std::min<int>(static_cast<int>(cands.size()), 3);
        for (int t = 0; t < tries; ++t) {
            MatrixXd merged = fit.resp;
            merged.col(cands[t].j) += merged.col(cands[t].k);
            merged.col(cands[t].k).setZero();
            Fit trial = converge(X, prior, std::move(merged));
            if (trial.bound > fit.bound + kBoundTolerance) {
                trial.iterations += fit.iterations;
                fit = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return fit;
}

// Prune weak/empty components and repackage with renormalized
// responsibilities. The weakest-anything guard keeps at least one component.
MixtureResult package(const MatrixXd& X, const Fit& fit, int k_max) {
    const int N = static_cast<int>(X.rows());
    const int K = static_cast<int>(fit.post.alpha.size());
    const double alpha_hat = fit.post.alpha.sum();

    std::vector<int> hard_counts(K, 0);
    for (int i = 0; i < N; ++i) {
        int best = 0;
        for (int k = 1; k < K; ++k)
            if (fit.resp(i, k) > fit.resp(i, best)) best = k;
        ++hard_counts[best];
    }

    const double weight_floor = 1.0 / (10.0 * k_max);
    std::vector<int> survivors;
    for (int k = 0; k < K; ++k) {
        const double weight = fit.post.alpha(k) / alpha_hat;
        if (weight >= weight_floor && hard_counts[k] > 0) survivors.push_back(k);
    }
    if (survivors.empty()) {
        int best = 0;
        for (int k = 1; k < K; ++k)
            if (fit.post.alpha(k) > fit.post.alpha(best)) best = k;
        survivors.push_back(best);
    }

    const int S = static_cast<int>(survivors.size());
    const int D = static_cast<int>(X.cols());
    MixtureResult result;
    result.k_effective = S;
    result.bound = fit.bound;
    result.iterations = fit.iterations;
    result.means.resize(S, D);
    result.variances.resize(S, D);
    result.weights.resize(S);
    result.responsibilities.resize(N, S);

    double weight_sum = 0.0;
    for (int s = 0; s < S; ++s) {
        const int k = survivors[s];
        result.means.row(s) = fit.post.m.row(k);
        result.variances.row(s) = fit.post.b.row(k) / fit.post.a(k);
        result.weights(s) = fit.post.alpha(k) / alpha_hat;
        weight_sum += result.weights(s);
        result.responsibilities.col(s) = fit.resp.col(k);
    }
    result.weights /= weight_sum;
    for (int i = 0; i < N; ++i) {
        const double row_sum = result.responsibilities.row(i).sum();
        if (row_sum > 0.0) {
            result.responsibilities.row(i) /= row_sum;
        } else {
            // Dominant component pruned and the rest numerically zero here:
            // fall back to the closest surviving mean.
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int s = 0; s < S; ++s) {
                const double d = (X.row(i) - result.means.row(s)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = s;
                }
            }
            result.responsibilities.row(i).setZero();
            result.responsibilities(i, best) = 1.0;
        }
    }
    return result;
}

}  // namespace

std::vector<MixtureResult> vgmm_fit_restarts(const MatrixXd& points, int k_max,
                                             std::uint64_t seed) {
    if (points.rows() < 2) throw ArgumentError("mixture fit needs at least 2 points");
    if (points.cols() < 1) throw ArgumentError("mixture fit needs at least 1 dimension");
    if (k_max < 1) throw ArgumentError("k_max must be at least 1");

    const int N = static_cast<int>(points.rows());
    const int D = static_cast<int>(points.cols());
    const int K = std::min(k_max, N);

    const std::vector<int> order = canonical_order(points);
    MatrixXd X(N, D);
    for (int i = 0; i < N; ++i) X.row(i) = points.row(order[i]);

    Prior prior;
    prior.alpha0 = 1.0 / k_max;
    prior.beta0 = 1.0;
    prior.a0 = 1.0;
    prior.m0 = X.colwise().mean();
    prior.b0.resize(D);
    for (int d = 0; d < D; ++d) {
        const double var = (X.col(d).array() - prior.m0(d)).square().mean();
        prior.b0(d) = prior.a0 * std::max(var, 1e-6);
    }

    std::vector<MixtureResult> results;
    results.reserve(kRestarts);
    for (int restart = 0; restart < kRestarts; ++restart) {
        SplitMix64 rng(SplitMix64(seed + 0x9E37ULL * restart).next());
        const Fit fit = fit_once(X, K, prior, rng);
        results.push_back(package(X, fit, k_max));
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const MixtureResult& a, const MixtureResult& b) {
                         return a.bound > b.bound;
                     });

    // Undo the canonical ordering so responsibilities line up with the
    // caller's point order.
    for (auto& r : results) {
        MatrixXd resp(N, r.k_effective);
        for (int i = 0; i < N; ++i) resp.row(order[i]) = r.responsibilities.row(i);
        r.responsibilities = std::move(resp);
    }
    return results;
}

MixtureResult vgmm_fit(const MatrixXd& points, int k_max, std::uint64_t seed) {
    return vgmm_fit_restarts(points, k_max, seed).front();
}

}  // namespace sigforge
