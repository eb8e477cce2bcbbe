// demobandit command-line front end.
//
//   simulate       run a configured experiment, write regret curves to CSV
//   bounds         evaluate the closed-form regret-bound quantities
//   estimate-beta  estimate expert deliberateness from a dataset file
//   gen-demos      generate an offline demonstration dataset file
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "demobandit/config_json.hpp"
#include "demobandit/demobandit.hpp"

namespace {

using namespace demobandit;

double parse_lambda(const std::string& s) {
    if (s == "inf" || s == "infinity") return 0.0;
    const double lambda = std::stod(s);
    if (!(lambda > 0.0)) throw ConfigError("--lambda must be positive or 'inf'");
    return 1.0 / lambda;
}

void print_report(const BoundInputs& in, const BoundReport& rep) {
    std::printf("K               %d\n", in.K);
    std::printf("T               %d\n", in.T);
    std::printf("N               %d\n", in.N);
    std::printf("beta            %.10g\n", in.beta);
    std::printf("inv_lambda      %.10g\n", in.inv_lambda);
    std::printf("alpha1          %.10g\n", rep.alpha1);
    std::printf("alpha2          %.10g\n", rep.alpha2);
    std::printf("f1              %.10g\n", rep.f1);
    std::printf("f2              %.10g\n", rep.f2);
    std::printf("main_term       %.10g\n", rep.main_term);
    std::printf("remainder_term  %.10g\n", rep.remainder_term);
    std::printf("total_bound     %.10g\n", rep.total_bound);
    std::printf("reward_range    %.10g\n", reward_range_bound(in.K));
    if (rep.loose_regime)
        std::printf("note            loose regime: alpha1 >= 1, tail term replaced by T\n");
    if (rep.k_condition_violated)
        std::printf("warning         K < log2(T); the f1/f2 derivation assumes K >= log2(T)\n");
}

struct Sweep {
    std::string key;
    double lo = 0.0, hi = 0.0;
    int steps = 0;
};

Sweep parse_sweep(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep expects key=lo:hi:steps");
    Sweep sw;
    sw.key = s.substr(0, eq);
    const std::string rest = s.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = rest.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("--sweep expects key=lo:hi:steps");
    sw.lo = std::stod(rest.substr(0, c1));
    sw.hi = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    sw.steps = std::stoi(rest.substr(c2 + 1));
    if (sw.steps < 2) throw ConfigError("--sweep needs at least 2 steps");
    return sw;
}

BoundInputs apply_sweep_value(BoundInputs in, const std::string& key, double value) {
    if (key == "K") in.K = static_cast<int>(value);
    else if (key == "T") in.T = static_cast<int>(value);
    else if (key == "N") in.N = static_cast<int>(value);
    else if (key == "beta") in.beta = value;
    else if (key == "lambda") in.inv_lambda = value > 0.0 ? 1.0 / value : 0.0;
    else if (key == "inv_lambda") in.inv_lambda = value;
    else throw ConfigError("--sweep key must be one of K,T,N,beta,lambda,inv_lambda");
    return in;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const AggregateResult result = run_experiment(cfg);
    write_csv(result, out_path);
    for (const auto& agg : result.agents) {
        std::printf("%-24s final regret %10.4f +- %.4f", agg.label.c_str(), agg.final_mean,
                    agg.final_stderr);
        if (agg.solver_nonconverged > 0)
            std::printf("  [%ld non-converged solves]", agg.solver_nonconverged);
        std::printf("\n");
    }
    std::printf("wrote %s (%d timesteps, %d runs)\n", out_path.c_str(), result.T, result.runs);
    return 0;
}

int cmd_bounds(const BoundInputs& base, const std::string& sweep_arg,
               const std::string& out_path) {
    if (sweep_arg.empty()) {
        print_report(base, compute_bounds(base));
        return 0;
    }
    const Sweep sw = parse_sweep(sweep_arg);
    std::FILE* out = out_path.empty() ? stdout : std::fopen(out_path.c_str(), "w");
    if (!out) throw ParseError(out_path + ": cannot open for writing");
    std::fprintf(out, "%s,alpha1,alpha2,f1,f2,main_term,remainder_term,total_bound\n",
                 sw.key.c_str());
    for (int i = 0; i < sw.steps; ++i) {
        const double v = sw.lo + (sw.hi - sw.lo) * i / (sw.steps - 1);
        const BoundInputs in = apply_sweep_value(base, sw.key, v);
        const BoundReport rep = compute_bounds(in);
        std::fprintf(out, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", v, rep.alpha1,
                     rep.alpha2, rep.f1, rep.f2, rep.main_term, rep.remainder_term,
                     rep.total_bound);
    }
    if (out != stdout) {
        std::fclose(out);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_estimate_beta(const std::string& data_path, const std::string& method, double c0,
                      double ridge, double beta_max) {
    const OfflineDataset ds = read_dataset(data_path);
    if (!ds.meta) throw ConfigError(data_path + ": dataset lacks the K/kind header needed here");
    BetaEstimate est;
    if (method == "mle") {
        est = estimate_beta_mle(ds, ds.meta->actions, ridge, beta_max);
        std::printf("method      mle\n");
        std::printf("beta_hat    %.10g\n", est.beta_hat);
        std::printf("nll         %.10g\n", est.diagnostic);
    } else if (method == "entropy") {
        est = estimate_beta_entropy(ds, ds.meta->actions.num_actions(), c0, beta_max);
        std::printf("method      entropy\n");
        std::printf("beta_hat    %.10g\n", est.beta_hat);
        std::printf("entropy     %.10g\n", est.diagnostic);
    } else {
        throw ConfigError("--method must be 'mle' or 'entropy'");
    }
    std::printf("n_records   %d\n", ds.size());
    return 0;
}

int cmd_gen_demos(const std::string& config_path, const std::string& out_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    RngStream env_rng = derive_stream(cfg.master_seed, 0, "env");
    const std::uint64_t env_seed = env_rng.seed();
    const Environment env = sample_environment(cfg.env.resolved_prior(),
                                               {cfg.env.kind, cfg.env.K, cfg.env.d}, env_rng);
    RngStream expert_rng = derive_stream(cfg.master_seed, 0, "expert");
    OfflineDataset ds =
        generate_demonstrations(env, {cfg.expert.beta_true, cfg.expert.inv_lambda_true},
                                cfg.expert.policy, cfg.expert.N, expert_rng);
    if (ds.meta) ds.meta->env_seed = env_seed;
    write_dataset(ds, out_path);
    std::printf("wrote %s (%d records, K=%d)\n", out_path.c_str(), ds.size(), cfg.env.K);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thompson-sampling bandit simulator with expert demonstration data"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    auto* simulate = app.add_subcommand("simulate", "Run an experiment and write regret CSV");
    simulate->add_option("--config", config_path, "JSON experiment config")->required();
    simulate->add_option("--out", out_path, "output CSV path")->required();

    BoundInputs bin;
    std::string lambda_arg = "inf", sweep_arg, bounds_out;
    auto* bounds = app.add_subcommand("bounds", "Evaluate regret-bound quantities");
    bounds->add_option("--K", bin.K, "number of actions")->required();
    bounds->add_option("--T", bin.T, "horizon")->required();
    bounds->add_option("--N", bin.N, "offline dataset size")->required();
    bounds->add_option("--beta", bin.beta, "deliberateness")->required();
    bounds->add_option("--lambda", lambda_arg, "knowledgeability (number or 'inf')");
    bounds->add_option("--sweep", sweep_arg, "key=lo:hi:steps over K,T,N,beta,lambda");
    bounds->add_option("--out", bounds_out, "CSV path for sweep output");

    std::string data_path, method;
    double c0 = 1.0, ridge = 1.0, beta_max = 100.0;
    auto* estimate = app.add_subcommand("estimate-beta", "Estimate deliberateness from a dataset");
    estimate->add_option("--data", data_path, "dataset file")->required();
    estimate->add_option("--method", method, "mle or entropy")->required();
    estimate->add_option("--c0", c0, "entropy-method constant");
    estimate->add_option("--ridge", ridge, "ridge constant for the LS estimate");
    estimate->add_option("--beta-max", beta_max, "estimate cap");

    std::string gd_config, gd_out;
    auto* gen = app.add_subcommand("gen-demos", "Generate an offline demonstration dataset");
    gen->add_option("--config", gd_config, "JSON experiment config")->required();
    gen->add_option("--out", gd_out, "dataset output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*simulate) return cmd_simulate(config_path, out_path);
        if (*bounds) {
            bin.inv_lambda = parse_lambda(lambda_arg);
            return cmd_bounds(bin, sweep_arg, bounds_out);
        }
        if (*estimate) return cmd_estimate_beta(data_path, method, c0, ridge, beta_max);
        if (*gen) return cmd_gen_demos(gd_config, gd_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
