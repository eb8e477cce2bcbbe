#pragma once

#include <cmath>
#include <string>

#include "demobandit/expert.hpp"

namespace demobandit {

enum class BetaMethod { MLE, Entropy };

inline std::string to_string(BetaMethod m) {
    return m == BetaMethod::MLE ? "mle" : "entropy";
}

struct BetaEstimate {
    double beta_hat = 0.0;
    BetaMethod method = BetaMethod::MLE;
    double diagnostic = 0.0;  // NLL at the optimum (MLE) or empirical entropy
};

// (ridge I + sum a a^T)^-1 sum r a; the expert-knowledge point estimate.
inline Vector ridge_least_squares(const OfflineDataset& offline, const ActionSet& actions,
                                  double ridge) {
    if (ridge <= 0.0) throw ConfigError("ridge must be > 0");
    const int d = actions.dim();
    Matrix gram = ridge * Matrix::Identity(d, d);
    Vector moment = Vector::Zero(d);
    for (const auto& [a, r] : offline.pairs) {
        if (a < 0 || a >= actions.num_actions())
            throw ConfigError("ridge_least_squares: action index out of range");
        const auto vec = actions.action(a);
        gram.noalias() += vec * vec.transpose();
        moment.noalias() += r * vec;
    }
    return gram.llt().solve(moment);
}

namespace detail {

// Offline-action NLL at deliberateness beta, with vartheta plugged in:
//   sum_n [ lse_b(beta b^T vt) - beta A_n^T vt ].
inline double beta_nll(const OfflineDataset& offline, const ActionSet& actions,
                       const Vector& vt, double beta) {
    const Vector logits = beta * (actions.vectors.transpose() * vt);
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    double nll = 0.0;
    for (const auto& [a, r] : offline.pairs) nll += lse - logits(a);
    return nll;
}

}  // namespace detail

// Golden-section minimization of the (convex) offline NLL over [0, beta_max],
// absolute tolerance 1e-4; the result snaps to an endpoint when the search
// lands within tolerance of one.
inline BetaEstimate estimate_beta_mle(const OfflineDataset& offline, const ActionSet& actions,
                                      double ridge, double beta_max) {
    if (offline.size() < 1) throw ConfigError("estimate_beta_mle: empty dataset");
    if (beta_max <= 0.0) throw ConfigError("estimate_beta_mle: beta_max must be > 0");
    const Vector vt = ridge_least_squares(offline, actions, ridge);
    auto nll = [&](double beta) { return detail::beta_nll(offline, actions, vt, beta); };

    constexpr double kTol = 1e-4;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = beta_max;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = nll(x1), f2 = nll(x2);
    while (hi - lo > kTol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = nll(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = nll(x2);
        }
    }
    double beta_hat = 0.5 * (lo + hi);
    double f_hat = nll(beta_hat);
    // Convexity makes endpoint comparisons sound: an endpoint value at or
    // below the interior candidate means the minimum sits at that endpoint
    // (numerically flat tails otherwise strand the search mid-interval).
    if (nll(beta_max) <= f_hat) {
        beta_hat = beta_max;
        f_hat = nll(beta_max);
    } else if (nll(0.0) < f_hat) {
        beta_hat = 0.0;
        f_hat = nll(0.0);
    }
    return BetaEstimate{beta_hat, BetaMethod::MLE, f_hat};
}

// c0 / H(empirical action distribution), capped at beta_max; H = 0 maps to
// beta_max. Natural-log entropy; reward values never enter.
inline BetaEstimate estimate_beta_entropy(const OfflineDataset& offline, int K, double c0,
                                          double beta_max) {
    if (offline.size() < 1) throw ConfigError("estimate_beta_entropy: empty dataset");
    if (c0 <= 0.0) throw ConfigError("estimate_beta_entropy: c0 must be > 0");
    if (K < 1) throw ConfigError("estimate_beta_entropy: K must be >= 1");
    Vector counts = Vector::Zero(K);
    for (const auto& [a, r] : offline.pairs) {
        if (a < 0 || a >= K) throw ConfigError("estimate_beta_entropy: action out of range");
        counts(a) += 1.0;
    }
    const double n = counts.sum();
    double entropy = 0.0;
    for (int k = 0; k < K; ++k) {
        const double p = counts(k) / n;
        if (p > 0.0) entropy -= p * std::log(p);
    }
    const double beta_hat = entropy == 0.0 ? beta_max : std::min(c0 / entropy, beta_max);
    return BetaEstimate{beta_hat, BetaMethod::Entropy, entropy};
}

}  // namespace demobandit
