#pragma once

#include <span>
#include <utility>
#include <vector>

#include "demobandit/expert.hpp"

namespace demobandit {

struct GaussianPosterior {
    Vector mean;
    Matrix covariance;

    int dim() const { return static_cast<int>(mean.size()); }

    static GaussianPosterior from_prior(const PriorSpec& prior) {
        return GaussianPosterior{prior.mean, prior.covariance};
    }

    Matrix cholesky() const {
        Eigen::LLT<Matrix> llt(covariance);
        if (llt.info() != Eigen::Success)
            throw NumericalError("posterior covariance is not positive-definite");
        return llt.matrixL();
    }
};

using Observation = std::pair<Vector, double>;  // (action vector, reward)

// Unit-noise linear-Gaussian conjugate update:
//   cov' = (cov^-1 + sum a a^T)^-1,  mean' = cov' (cov^-1 mean + sum r a).
inline GaussianPosterior conjugate_update(const GaussianPosterior& post,
                                          std::span<const Observation> observations) {
    Eigen::LLT<Matrix> llt(post.covariance);
    if (llt.info() != Eigen::Success)
        throw NumericalError("conjugate_update: singular covariance");
    const int d = post.dim();
    Matrix precision = llt.solve(Matrix::Identity(d, d));
    Vector info = precision * post.mean;
    for (const auto& [a, r] : observations) {
        if (a.size() != d) throw ConfigError("conjugate_update: observation dimension mismatch");
        precision.noalias() += a * a.transpose();
        info.noalias() += r * a;
    }
    Eigen::LLT<Matrix> llt2(precision);
    if (llt2.info() != Eigen::Success)
        throw NumericalError("conjugate_update: updated precision not positive-definite");
    GaussianPosterior out;
    out.covariance = llt2.solve(Matrix::Identity(d, d));
    // Symmetrize away the solve's rounding skew.
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    out.mean = llt2.solve(info);
    return out;
}

inline GaussianPosterior conjugate_update(const GaussianPosterior& post,
                                          const std::vector<Observation>& observations) {
    return conjugate_update(post, std::span<const Observation>(observations));
}

// mean + L z with L the Cholesky factor, z standard normal.
inline Vector sample_gaussian(const GaussianPosterior& post, RngStream& rng) {
    const Matrix chol = post.cholesky();
    Vector z(post.dim());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return post.mean + chol * z;
}

struct GridSpec {
    double lo = -4.0;
    double hi = 4.0;
    int resolution = 201;  // points per dimension

    double cell_width() const { return (hi - lo) / (resolution - 1); }

    void validate() const {
        if (resolution < 3) throw ConfigError("grid resolution must be >= 3");
        if (!(hi > lo)) throw ConfigError("grid bounds must satisfy lo < hi");
    }
};

// Brute-force discretized posterior over R^2. Cell (i, j) sits at
// (lo + i*w, lo + j*w) and carries an unnormalized log density.
struct GridPosterior {
    GridSpec spec;
    Eigen::ArrayXd log_weights;  // resolution^2, index i*resolution + j

    int cells() const { return static_cast<int>(log_weights.size()); }

    Eigen::Vector2d cell_center(int flat_index) const {
        const int res = spec.resolution;
        const double w = spec.cell_width();
        return {spec.lo + (flat_index / res) * w, spec.lo + (flat_index % res) * w};
    }

    // Normalized categorical weights via max-subtraction.
    Eigen::ArrayXd normalized() const {
        const double m = log_weights.maxCoeff();
        if (!std::isfinite(m)) throw NumericalError("grid posterior is degenerate");
        Eigen::ArrayXd p = (log_weights - m).exp();
        p /= p.sum();
        return p;
    }

    Eigen::Vector2d mean() const {
        const Eigen::ArrayXd p = normalized();
        Eigen::Vector2d m = Eigen::Vector2d::Zero();
        for (int c = 0; c < cells(); ++c) m += p(c) * cell_center(c);
        return m;
    }

    Eigen::Matrix2d covariance() const {
        const Eigen::ArrayXd p = normalized();
        const Eigen::Vector2d m = mean();
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        for (int c = 0; c < cells(); ++c) {
            const Eigen::Vector2d x = cell_center(c) - m;
            cov += p(c) * x * x.transpose();
        }
        return cov;
    }
};

namespace detail {

// Fixed seed for the shared vartheta marginalization draws; shared draws
// keep the likelihood surface smooth across grid points and rebuilds.
inline constexpr std::uint64_t kGridMarginalSeed = 0x6772696464726177ULL;
inline constexpr int kGridMarginalDraws = 64;

}  // namespace detail

// Full informed posterior on a d = 2 grid: prior x action likelihood x
// reward likelihoods. The action likelihood marginalizes vartheta by
// Monte Carlo when inv_lambda > 0 and is the exact softmax otherwise.
inline GridPosterior grid_posterior(const PriorSpec& prior, const OfflineDataset& offline,
                                    std::span<const Observation> online, const Competence& comp,
                                    const ActionSet& actions, const GridSpec& spec = {}) {
    if (prior.dim() != 2 || actions.dim() != 2)
        throw ConfigError("grid posterior supports d = 2 only");
    spec.validate();
    comp.validate();
    prior.validate();

    const int res = spec.resolution;
    const double w = spec.cell_width();
    const int K = actions.num_actions();

    Eigen::LLT<Matrix> prior_llt(prior.covariance);
    const Matrix prior_precision = prior_llt.solve(Matrix::Identity(2, 2));
    const double prior_logdet =
        2.0 * Matrix(prior_llt.matrixL()).diagonal().array().log().sum();
    const double prior_const = -std::log(2.0 * std::numbers::pi) - 0.5 * prior_logdet;

    std::vector<Eigen::Vector2d> zdraws;
    if (comp.inv_lambda > 0.0 && offline.size() > 0) {
        RngStream zrng(detail::kGridMarginalSeed);
        zdraws.resize(detail::kGridMarginalDraws);
        for (auto& z : zdraws) z = {zrng.normal(), zrng.normal()};
    }

    // Per-arm reward aggregates: sum over observations of (r - <a, theta>)^2
    // expands to c_a <a,th>^2 - 2 s_a <a,th> + const.
    Vector count = Vector::Zero(K), rsum = Vector::Zero(K);
    double rsq = 0.0;
    auto accumulate = [&](int idx, double r) {
        count(idx) += 1.0;
        rsum(idx) += r;
        rsq += r * r;
    };
    for (const auto& [a, r] : offline.pairs) {
        if (a < 0 || a >= K) throw ConfigError("grid posterior: offline action out of range");
        accumulate(a, r);
    }
    for (const auto& [avec, r] : online) {
        int idx = -1;
        for (int k = 0; k < K; ++k)
            if ((actions.vectors.col(k) - avec).norm() <= 1e-12) {
                idx = k;
                break;
            }
        if (idx < 0) throw ConfigError("grid posterior: online action not in the action set");
        accumulate(idx, r);
    }
    const double n_obs = count.sum();
    const double reward_const =
        -0.5 * rsq - 0.5 * n_obs * std::log(2.0 * std::numbers::pi);

    // Offline action counts for the action-likelihood sum.
    Eigen::VectorXi action_count = Eigen::VectorXi::Zero(K);
    for (const auto& [a, r] : offline.pairs) action_count(a) += 1;

    GridPosterior gp;
    gp.spec = spec;
    gp.log_weights.resize(res * res);

    Vector logits(K), probs(K), mix(K), dots(K);
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            const Eigen::Vector2d theta(spec.lo + i * w, spec.lo + j * w);
            const Eigen::Vector2d centered = theta - prior.mean;
            double lw = prior_const - 0.5 * centered.dot(prior_precision * centered);

            // Reward likelihood (offline + online).
            dots.noalias() = actions.vectors.transpose() * theta;
            for (int k = 0; k < K; ++k)
                lw += -0.5 * count(k) * dots(k) * dots(k) + rsum(k) * dots(k);
            lw += reward_const;

            // Action likelihood.
            if (offline.size() > 0 && comp.beta > 0.0) {
                if (comp.inv_lambda == 0.0) {
                    logits = comp.beta * dots;
                    const double m = logits.maxCoeff();
                    const double lse = m + std::log((logits.array() - m).exp().sum());
                    for (int k = 0; k < K; ++k)
                        if (action_count(k) > 0)
                            lw += action_count(k) * (logits(k) - lse);
                } else {
                    mix.setZero();
                    for (const auto& z : zdraws) {
                        const Eigen::Vector2d vt = theta + comp.inv_lambda * z;
                        logits = comp.beta * (actions.vectors.transpose() * vt);
                        const double m = logits.maxCoeff();
                        probs = (logits.array() - m).exp();
                        mix += probs / probs.sum();
                    }
                    mix /= static_cast<double>(zdraws.size());
                    for (int k = 0; k < K; ++k)
                        if (action_count(k) > 0) lw += action_count(k) * std::log(mix(k));
                }
            } else if (offline.size() > 0) {
                lw += offline.size() * std::log(1.0 / K);  // beta = 0: uniform policy
            }

            gp.log_weights(i * res + j) = lw;
        }
    }
    return gp;
}

inline GridPosterior grid_posterior(const PriorSpec& prior, const OfflineDataset& offline,
                                    const std::vector<Observation>& online,
                                    const Competence& comp, const ActionSet& actions,
                                    const GridSpec& spec = {}) {
    return grid_posterior(prior, offline, std::span<const Observation>(online), comp, actions,
                          spec);
}

// Draw a cell from the normalized weights; returns the cell center.
inline Vector sample_grid(const GridPosterior& gp, RngStream& rng) {
    const Eigen::ArrayXd p = gp.normalized();
    const std::size_t c =
        rng.categorical(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
    return gp.cell_center(static_cast<int>(c));
}

}  // namespace demobandit
