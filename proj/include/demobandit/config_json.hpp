#pragma once

#include <json.hpp>

#include "demobandit/experiment.hpp"

namespace demobandit {

namespace detail {

using nlohmann::json;

inline ActionSetKind parse_action_kind(const std::string& s) {
    if (s == "basis") return ActionSetKind::Basis;
    if (s == "unit_sphere") return ActionSetKind::UnitSphere;
    throw ConfigError("config: unknown action-set kind '" + s + "'");
}

inline ExpertPolicy parse_policy(const std::string& s) {
    if (s == "softmax") return ExpertPolicy::Softmax;
    if (s == "epsilon_greedy") return ExpertPolicy::EpsilonGreedy;
    throw ConfigError("config: unknown expert policy '" + s + "'");
}

inline AgentKind parse_agent_kind(const std::string& s) {
    if (s == "uninformed") return AgentKind::Uninformed;
    if (s == "partially_informed") return AgentKind::PartiallyInformed;
    if (s == "informed") return AgentKind::Informed;
    if (s == "grid") return AgentKind::Grid;
    throw ConfigError("config: unknown agent kind '" + s + "'");
}

inline PriorSpec parse_prior(const json& j, int d) {
    PriorSpec prior = PriorSpec::standard(d);
    if (j.contains("mean")) {
        const auto& m = j.at("mean");
        if (static_cast<int>(m.size()) != d)
            throw ConfigError("config: prior mean has wrong dimension");
        for (int i = 0; i < d; ++i) prior.mean(i) = m.at(i).get<double>();
    }
    if (j.contains("covariance")) {
        const auto& c = j.at("covariance");
        if (static_cast<int>(c.size()) != d)
            throw ConfigError("config: prior covariance has wrong dimension");
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(c.at(i).size()) != d)
                throw ConfigError("config: prior covariance row " + std::to_string(i) +
                                  " has wrong length");
            for (int k = 0; k < d; ++k) prior.covariance(i, k) = c.at(i).at(k).get<double>();
        }
    }
    prior.validate();
    return prior;
}

inline SolverSettings parse_solver(const json& j) {
    SolverSettings s;
    s.tol = j.value("tol", s.tol);
    s.max_iters = j.value("max_iters", s.max_iters);
    s.init_step = j.value("init_step", s.init_step);
    s.armijo_c = j.value("armijo_c", s.armijo_c);
    if (j.contains("vartheta_perturbation")) {
        const std::string v = j.at("vartheta_perturbation").get<std::string>();
        if (v == "inv_lambda_sq")
            s.vartheta_perturbation = VarthetaPerturbation::VarianceInvLambdaSq;
        else if (v == "inv_lambda")
            s.vartheta_perturbation = VarthetaPerturbation::VarianceInvLambda;
        else
            throw ConfigError("config: unknown vartheta_perturbation '" + v + "'");
    }
    return s;
}

inline GridSpec parse_grid(const json& j) {
    GridSpec g;
    g.lo = j.value("lo", g.lo);
    g.hi = j.value("hi", g.hi);
    g.resolution = j.value("resolution", g.resolution);
    g.validate();
    return g;
}

}  // namespace detail

// JSON mirror of ExperimentConfig. beta_alg accepts a number or one of
// "true" | "mle" | "entropy"; inv_lambda_alg accepts a number or "true".
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    using detail::json;
    try {
        ExperimentConfig cfg;
        const json& env = j.at("env");
        cfg.env.kind = detail::parse_action_kind(env.at("kind").get<std::string>());
        cfg.env.K = env.at("K").get<int>();
        cfg.env.d = cfg.env.kind == ActionSetKind::Basis ? cfg.env.K
                                                         : env.at("d").get<int>();
        if (env.contains("d") && env.at("d").get<int>() != cfg.env.d)
            throw ConfigError("config: basis action set requires d = K");
        if (env.contains("prior")) cfg.env.prior = detail::parse_prior(env.at("prior"), cfg.env.d);

        const json& expert = j.at("expert");
        cfg.expert.policy = detail::parse_policy(expert.at("policy_kind").get<std::string>());
        cfg.expert.beta_true = expert.at("beta_true").get<double>();
        cfg.expert.inv_lambda_true = expert.at("inv_lambda_true").get<double>();
        cfg.expert.N = expert.at("N").get<int>();

        cfg.T = j.at("T").get<int>();
        cfg.runs = j.at("runs").get<int>();
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        cfg.c0 = j.value("c0", cfg.c0);
        cfg.ridge = j.value("ridge", cfg.ridge);
        cfg.beta_max = j.value("beta_max", cfg.beta_max);

        for (const json& a : j.value("agents", json::array())) {
            AgentSpecConfig spec;
            spec.kind = detail::parse_agent_kind(a.at("kind").get<std::string>());
            spec.label = a.value("label", to_string(spec.kind));
            if (a.contains("beta_alg")) {
                const json& b = a.at("beta_alg");
                if (b.is_number()) {
                    spec.beta_source = BetaSource::Numeric;
                    spec.beta_value = b.get<double>();
                } else {
                    const std::string s = b.get<std::string>();
                    if (s == "true") spec.beta_source = BetaSource::True;
                    else if (s == "mle") spec.beta_source = BetaSource::MLE;
                    else if (s == "entropy") spec.beta_source = BetaSource::Entropy;
                    else throw ConfigError("config: unknown beta_alg '" + s + "'");
                }
            }
            if (a.contains("inv_lambda_alg")) {
                const json& l = a.at("inv_lambda_alg");
                if (l.is_number()) {
                    spec.lambda_source = LambdaSource::Numeric;
                    spec.inv_lambda_value = l.get<double>();
                } else if (l.get<std::string>() == "true") {
                    spec.lambda_source = LambdaSource::True;
                } else {
                    throw ConfigError("config: inv_lambda_alg must be a number or \"true\"");
                }
            }
            if (a.contains("solver")) spec.settings.solver = detail::parse_solver(a.at("solver"));
            if (a.contains("grid")) spec.settings.grid = detail::parse_grid(a.at("grid"));
            cfg.agents.push_back(std::move(spec));
        }
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_experiment_config(j);
}

}  // namespace demobandit
