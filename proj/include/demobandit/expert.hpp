#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "demobandit/bandit.hpp"

namespace demobandit {

// Expert quality: deliberateness beta and inverse knowledgeability 1/lambda.
// inv_lambda = 0 encodes lambda = infinity (perfect knowledge of theta).
struct Competence {
    double beta = 0.0;
    double inv_lambda = 0.0;

    void validate() const {
        if (beta < 0.0 || !std::isfinite(beta)) throw ConfigError("beta must be >= 0");
        if (inv_lambda < 0.0 || !std::isfinite(inv_lambda))
            throw ConfigError("inv_lambda must be >= 0");
    }
};

struct ExpertKnowledge {
    Vector vartheta;
};

enum class ExpertPolicy { Softmax, EpsilonGreedy };

inline std::string to_string(ExpertPolicy p) {
    return p == ExpertPolicy::Softmax ? "softmax" : "epsilon_greedy";
}

struct DatasetMeta {
    Competence competence;
    ExpertPolicy policy = ExpertPolicy::Softmax;
    std::uint64_t env_seed = 0;
    ActionSet actions;                  // snapshot of the generating action set
    std::optional<Vector> vartheta;     // expert knowledge actually drawn
};

// N demonstration (action index, reward) pairs plus generation metadata.
struct OfflineDataset {
    std::vector<std::pair<int, double>> pairs;
    std::optional<DatasetMeta> meta;

    int size() const { return static_cast<int>(pairs.size()); }
};

// vartheta = theta + (1/lambda) z, z ~ N(0, I); exact copy when inv_lambda = 0.
inline ExpertKnowledge sample_expert_knowledge(const Environment& env, const Competence& comp,
                                               RngStream& rng) {
    comp.validate();
    if (comp.inv_lambda == 0.0) return ExpertKnowledge{env.theta};
    Vector v = env.theta;
    for (int i = 0; i < v.size(); ++i) v(i) += comp.inv_lambda * rng.normal();
    return ExpertKnowledge{std::move(v)};
}

// softmax(beta * a^T vartheta) over the action set, log-space stabilized.
inline Vector softmax_action_probs(const ExpertKnowledge& knowledge, double beta,
                                   const ActionSet& actions) {
    if (beta < 0.0) throw ConfigError("softmax beta must be >= 0");
    Vector logits = beta * (actions.vectors.transpose() * knowledge.vartheta);
    const double max_logit = logits.maxCoeff();
    Vector probs = (logits.array() - max_logit).exp();
    probs /= probs.sum();
    return probs;
}

// beta + (1-beta)/K on the argmax of a^T vartheta (lowest-index tie-break),
// (1-beta)/K elsewhere.
inline Vector epsilon_greedy_action_probs(const ExpertKnowledge& knowledge, double beta,
                                          const ActionSet& actions) {
    if (beta < 0.0 || beta > 1.0)
        throw ConfigError("epsilon-greedy beta must lie in [0, 1]");
    const int K = actions.num_actions();
    Vector values = actions.vectors.transpose() * knowledge.vartheta;
    int best = 0;
    for (int i = 1; i < K; ++i)
        if (values(i) > values(best)) best = i;
    Vector probs = Vector::Constant(K, (1.0 - beta) / K);
    probs(best) += beta;
    return probs;
}

// Samples vartheta once, then N i.i.d. actions from the chosen policy with a
// fresh reward pull each. Bit-reproducible for a given stream.
inline OfflineDataset generate_demonstrations(const Environment& env, const Competence& comp,
                                              ExpertPolicy policy, int N, RngStream& rng) {
    if (N < 0) throw ConfigError("N must be >= 0");
    ExpertKnowledge knowledge = sample_expert_knowledge(env, comp, rng);
    const Vector probs = policy == ExpertPolicy::Softmax
                             ? softmax_action_probs(knowledge, comp.beta, env.actions)
                             : epsilon_greedy_action_probs(knowledge, comp.beta, env.actions);

    OfflineDataset ds;
    ds.pairs.reserve(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const int a = static_cast<int>(
            rng.categorical(std::span<const double>(probs.data(), probs.size())));
        ds.pairs.emplace_back(a, pull(env, a, rng));
    }
    ds.meta = DatasetMeta{comp, policy, 0, env.actions, knowledge.vartheta};
    return ds;
}

}  // namespace demobandit
