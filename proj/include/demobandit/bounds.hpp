#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "demobandit/expert.hpp"

namespace demobandit {

struct BoundInputs {
    int K = 2;
    int T = 1;
    int N = 0;
    double beta = 1.0;        // > 0
    double inv_lambda = 0.0;  // 0 encodes lambda = infinity

    void validate() const {
        if (K < 2) throw ConfigError("bounds: K must be >= 2");
        if (T < 1) throw ConfigError("bounds: T must be >= 1");
        if (N < 0) throw ConfigError("bounds: N must be >= 0");
        if (!(beta > 0.0)) throw ConfigError("bounds: beta must be > 0");
        if (inv_lambda < 0.0) throw ConfigError("bounds: inv_lambda must be >= 0");
    }
};

struct BoundReport {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double main_term = 0.0;
    double remainder_term = 0.0;
    double total_bound = 0.0;
    // alpha1 >= 1 invalidates the binomial-tail term in f1; a dominating
    // finite surrogate (T) replaces it and the report is marked loose.
    bool loose_regime = false;
    // K >= log2(T) is the regime the f1/f2 derivation assumes.
    bool k_condition_violated = false;
};

// Distinct action indices appearing in the offline data, sorted ascending.
inline std::vector<int> informative_set(const OfflineDataset& offline) {
    std::vector<int> out;
    out.reserve(offline.pairs.size());
    for (const auto& [a, r] : offline.pairs) out.push_back(a);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Expected reward range of K unit-variance arms: 2 sqrt(2 ln K).
inline double reward_range_bound(int K) {
    if (K < 2) throw ConfigError("reward_range_bound: K must be >= 2");
    return 2.0 * std::sqrt(2.0 * std::log(static_cast<double>(K)));
}

// Closed-form regret-bound quantities. Natural logarithms throughout.
inline BoundReport compute_bounds(const BoundInputs& in) {
    in.validate();
    const double K = in.K, T = in.T, N = in.N;
    BoundReport rep;
    rep.k_condition_violated = K < std::log2(T);

    // alpha1: price for deliberateness. beta <= 1/T makes log(T beta)
    // non-positive; the bound is vacuous there and alpha1 pins to K.
    if (in.beta * T <= 1.0) {
        rep.alpha1 = K;
    } else {
        rep.alpha1 = K * std::min(std::log(T * in.beta) / in.beta, 1.0);
    }

    // alpha2: price for imperfect knowledge; 1 at lambda = infinity.
    rep.alpha2 = std::exp(in.beta * std::sqrt(2.0 * std::log(T * K)) * in.inv_lambda);

    double tail_term;
    if (rep.alpha1 < 1.0) {
        tail_term = std::log(T) / std::log(1.0 / rep.alpha1);
    } else {
        tail_term = T;
        rep.loose_regime = true;
    }
    const double denom = rep.alpha2 * (1.0 + rep.alpha1 + tail_term + K / (T * in.beta));
    rep.f1 = 3.0 / T + std::pow(1.0 - 1.0 / denom, N);
    rep.f1 = std::clamp(rep.f1, 0.0, 1.0);

    rep.f2 = std::min(rep.alpha1 + 1.0 + rep.alpha2 * K * N / (T * in.beta) + 1.0 / T, K);

    // Entropy factor with the conventions f1 = 0 -> 0 and f1 = 1 -> log K.
    const double miss_entropy = rep.f1 <= 0.0 ? 0.0 : rep.f1 * std::log(K / rep.f1);
    rep.main_term = std::sqrt(T * rep.f2 * (std::log(rep.f2) + miss_entropy));
    const double range = reward_range_bound(in.K);
    rep.remainder_term = range * T * rep.f1 + 2.0 * range;
    rep.total_bound = rep.main_term + rep.remainder_term;
    return rep;
}

}  // namespace demobandit
