#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "demobandit/agents.hpp"
#include "demobandit/competence.hpp"
#include "demobandit/dataset_io.hpp"

namespace demobandit {

enum class BetaSource { Numeric, True, MLE, Entropy };
enum class LambdaSource { Numeric, True };

struct AgentSpecConfig {
    AgentKind kind = AgentKind::Uninformed;
    std::string label;
    BetaSource beta_source = BetaSource::True;
    double beta_value = 0.0;  // used when beta_source == Numeric
    LambdaSource lambda_source = LambdaSource::True;
    double inv_lambda_value = 0.0;  // used when lambda_source == Numeric
    AgentSettings settings;
};

struct EnvConfig {
    ActionSetKind kind = ActionSetKind::Basis;
    int K = 2;
    int d = 2;
    std::optional<PriorSpec> prior;  // defaults to N(0, I_d)

    PriorSpec resolved_prior() const {
        return prior ? *prior : PriorSpec::standard(d);
    }
};

struct ExpertConfig {
    ExpertPolicy policy = ExpertPolicy::Softmax;
    double beta_true = 0.0;
    double inv_lambda_true = 0.0;
    int N = 0;
};

struct ExperimentConfig {
    EnvConfig env;
    ExpertConfig expert;
    std::vector<AgentSpecConfig> agents;
    int T = 1;
    int runs = 1;
    std::uint64_t master_seed = 0;
    double c0 = 1.0;
    double ridge = 1.0;
    double beta_max = 100.0;

    void validate() const {
        if (T < 1) throw ConfigError("config: T must be >= 1");
        if (runs < 1) throw ConfigError("config: runs must be >= 1");
        if (env.K < 2) throw ConfigError("config: K must be >= 2");
        if (env.kind == ActionSetKind::Basis && env.K != env.d)
            throw ConfigError("config: basis action set requires K = d");
        if (expert.N < 0) throw ConfigError("config: N must be >= 0");
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (agents[i].label.empty()) throw ConfigError("config: agent label missing");
            for (std::size_t j = i + 1; j < agents.size(); ++j)
                if (agents[i].label == agents[j].label)
                    throw ConfigError("config: duplicate agent label '" + agents[i].label + "'");
        }
    }
};

struct RegretTrace {
    std::vector<double> cumulative;  // length T, non-decreasing
    std::uint64_t run_seed = 0;      // seed of the run's environment stream
    std::string agent_label;
    long solver_nonconverged = 0;
};

struct AgentAggregate {
    std::string label;
    std::vector<double> mean;     // length T
    std::vector<double> stderr_;  // sample std / sqrt(runs), pointwise
    std::vector<double> finals;   // per-run final cumulative regret, run order
    double final_mean = 0.0;
    double final_stderr = 0.0;
    long solver_nonconverged = 0;
};

struct AggregateResult {
    std::vector<AgentAggregate> agents;
    int T = 0;
    int runs = 0;
};

namespace detail {

// Competence the agent is constructed with: true, misspecified numeric, or
// estimated from the offline data.
inline Competence resolve_competence(const ExperimentConfig& cfg, const AgentSpecConfig& agent,
                                     const OfflineDataset& offline, const ActionSet& actions) {
    Competence comp;
    switch (agent.beta_source) {
        case BetaSource::Numeric: comp.beta = agent.beta_value; break;
        case BetaSource::True: comp.beta = cfg.expert.beta_true; break;
        case BetaSource::MLE:
            comp.beta =
                estimate_beta_mle(offline, actions, cfg.ridge, cfg.beta_max).beta_hat;
            break;
        case BetaSource::Entropy:
            comp.beta =
                estimate_beta_entropy(offline, cfg.env.K, cfg.c0, cfg.beta_max).beta_hat;
            break;
    }
    comp.inv_lambda = agent.lambda_source == LambdaSource::Numeric
                          ? agent.inv_lambda_value
                          : cfg.expert.inv_lambda_true;
    return comp;
}

}  // namespace detail

// One agent, one run index. Environment and offline data derive from
// (master_seed, run_index) alone, so every agent sees the identical
// (theta, D0) pair while acting on its own private streams.
inline RegretTrace run_episode(const ExperimentConfig& cfg, const AgentSpecConfig& agent_spec,
                               int run_index) {
    cfg.validate();
    const PriorSpec prior = cfg.env.resolved_prior();

    RngStream env_rng = derive_stream(cfg.master_seed, run_index, "env");
    const std::uint64_t env_seed = env_rng.seed();
    const Environment env =
        sample_environment(prior, {cfg.env.kind, cfg.env.K, cfg.env.d}, env_rng);

    RngStream expert_rng = derive_stream(cfg.master_seed, run_index, "expert");
    const Competence true_comp{cfg.expert.beta_true, cfg.expert.inv_lambda_true};
    OfflineDataset offline =
        generate_demonstrations(env, true_comp, cfg.expert.policy, cfg.expert.N, expert_rng);
    if (offline.meta) offline.meta->env_seed = env_seed;

    const Competence agent_comp =
        detail::resolve_competence(cfg, agent_spec, offline, env.actions);
    Agent agent(agent_spec.kind, std::move(offline), prior, agent_comp, env.actions,
                agent_spec.settings);

    RngStream agent_rng = derive_stream(cfg.master_seed, run_index, "agent:" + agent_spec.label);

    RegretTrace trace;
    trace.run_seed = env_seed;
    trace.agent_label = agent_spec.label;
    trace.cumulative.reserve(cfg.T);
    double cum = 0.0;
    for (int t = 0; t < cfg.T; ++t) {
        int a = 0;
        try {
            a = agent.act(agent_rng);
            const double r = pull(env, a, agent_rng);
            agent.observe(a, r);
        } catch (const std::exception& e) {
            throw NumericalError("run " + std::to_string(run_index) + ", t=" +
                                 std::to_string(t + 1) + ", agent '" + agent_spec.label +
                                 "': " + e.what());
        }
        cum += instant_regret(env, a);
        trace.cumulative.push_back(cum);
    }
    trace.solver_nonconverged = agent.solver_nonconverged();
    return trace;
}

// Worker cap: DEMOBANDIT_THREADS when set, else hardware concurrency.
inline int resolve_thread_count(int runs) {
    int threads = 0;
    if (const char* env = std::getenv("DEMOBANDIT_THREADS")) {
        threads = std::atoi(env);
        if (threads < 1) throw ConfigError("DEMOBANDIT_THREADS must be a positive integer");
    } else {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads < 1) threads = 1;
    }
    return std::min(threads, std::max(runs, 1));
}

// runs x agents episodes, parallel over run indices. Aggregation happens
// after all runs complete, in run-index order, so the output is identical
// for any worker count.
inline AggregateResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.agents.empty()) throw ConfigError("config: no agents listed");
    const int runs = cfg.runs;
    const int n_agents = static_cast<int>(cfg.agents.size());

    // traces[agent][run]
    std::vector<std::vector<RegretTrace>> traces(n_agents, std::vector<RegretTrace>(runs));
    std::atomic<int> next_run{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const int run = next_run.fetch_add(1);
            if (run >= runs) return;
            try {
                for (int a = 0; a < n_agents; ++a)
                    traces[a][run] = run_episode(cfg, cfg.agents[a], run);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_threads = resolve_thread_count(runs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    AggregateResult result;
    result.T = cfg.T;
    result.runs = runs;
    for (int a = 0; a < n_agents; ++a) {
        AgentAggregate agg;
        agg.label = cfg.agents[a].label;
        agg.mean.assign(cfg.T, 0.0);
        agg.stderr_.assign(cfg.T, 0.0);
        agg.finals.reserve(runs);
        for (int run = 0; run < runs; ++run) {
            agg.solver_nonconverged += traces[a][run].solver_nonconverged;
            agg.finals.push_back(traces[a][run].cumulative.back());
            for (int t = 0; t < cfg.T; ++t) agg.mean[t] += traces[a][run].cumulative[t];
        }
        for (int t = 0; t < cfg.T; ++t) agg.mean[t] /= runs;
        if (runs > 1) {
            for (int t = 0; t < cfg.T; ++t) {
                double ss = 0.0;
                for (int run = 0; run < runs; ++run) {
                    const double d = traces[a][run].cumulative[t] - agg.mean[t];
                    ss += d * d;
                }
                agg.stderr_[t] = std::sqrt(ss / (runs - 1)) / std::sqrt(double(runs));
            }
        }
        agg.final_mean = agg.mean.back();
        agg.final_stderr = agg.stderr_.back();
        result.agents.push_back(std::move(agg));
    }
    return result;
}

// Columns `t,<agent>_mean,<agent>_stderr` per agent, one row per timestep.
inline void write_csv(const AggregateResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "t";
    for (const auto& agg : result.agents)
        out << "," << agg.label << "_mean," << agg.label << "_stderr";
    out << "\n";
    char buf[64];
    for (int t = 0; result.agents.size() > 0 && t < result.T; ++t) {
        out << (t + 1);
        for (const auto& agg : result.agents) {
            std::snprintf(buf, sizeof(buf), "%.12g", agg.mean[t]);
            out << "," << buf;
            std::snprintf(buf, sizeof(buf), "%.12g", agg.stderr_[t]);
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace demobandit
