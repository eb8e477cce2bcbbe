#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "demobandit/bootstrap.hpp"
#include "demobandit/posterior.hpp"

namespace demobandit {

enum class AgentKind { Uninformed, PartiallyInformed, Informed, Grid };

inline std::string to_string(AgentKind k) {
    switch (k) {
        case AgentKind::Uninformed: return "uninformed";
        case AgentKind::PartiallyInformed: return "partially_informed";
        case AgentKind::Informed: return "informed";
        case AgentKind::Grid: return "grid";
    }
    return "?";
}

struct AgentSettings {
    SolverSettings solver;
    GridSpec grid;
};

// The four Thompson-sampling variants behind one act/observe interface.
//
//   Uninformed          conjugate posterior from the prior alone
//   PartiallyInformed   conjugate posterior fed the offline rewards
//   Informed            perturbed-MAP surrogate sample each round
//   Grid                brute-force d = 2 posterior, sampled by cell
class Agent {
public:
    Agent(AgentKind kind, OfflineDataset offline, const PriorSpec& prior, const Competence& comp,
          const ActionSet& actions, AgentSettings settings = {})
        : kind_(kind),
          actions_(actions),
          prior_(prior),
          comp_(comp),
          settings_(settings),
          offline_(std::move(offline)) {
        prior_.validate();
        actions_.validate();
        comp_.validate();
        for (const auto& [a, r] : offline_.pairs)
            if (a < 0 || a >= actions_.num_actions())
                throw ConfigError("agent: offline action index out of range");

        switch (kind_) {
            case AgentKind::Uninformed:
                posterior_ = GaussianPosterior::from_prior(prior_);
                break;
            case AgentKind::PartiallyInformed: {
                std::vector<Observation> obs;
                obs.reserve(offline_.pairs.size());
                for (const auto& [a, r] : offline_.pairs)
                    obs.emplace_back(actions_.action(a), r);
                posterior_ = conjugate_update(GaussianPosterior::from_prior(prior_), obs);
                break;
            }
            case AgentKind::Informed:
                warm_theta_ = Vector::Zero(actions_.dim());
                warm_vartheta_ = Vector::Zero(actions_.dim());
                break;
            case AgentKind::Grid:
                if (actions_.dim() != 2) throw ConfigError("grid agent supports d = 2 only");
                break;
        }
    }

    AgentKind kind() const { return kind_; }
    int online_count() const { return static_cast<int>(online_.size()); }
    const Competence& competence() const { return comp_; }

    // Conjugate variants only.
    const GaussianPosterior& posterior() const {
        if (!posterior_) throw ConfigError("agent holds no Gaussian posterior");
        return *posterior_;
    }

    int act(RngStream& rng) {
        switch (kind_) {
            case AgentKind::Uninformed:
            case AgentKind::PartiallyInformed:
                return argmax_action(actions_, sample_gaussian(*posterior_, rng));
            case AgentKind::Informed: {
                const PerturbationSet perturb = sample_perturbations(
                    offline_.size(), online_count(), actions_.dim(), prior_, comp_, rng,
                    settings_.solver.vartheta_perturbation);
                const LossSpec spec(actions_, offline_.pairs, online_, comp_, prior_, perturb);
                MinimizeResult res =
                    minimize(spec, warm_theta_, warm_vartheta_, settings_.solver);
                warm_theta_ = res.theta;
                warm_vartheta_ = res.vartheta;
                last_diagnostics_ = res.diagnostics;
                if (!res.diagnostics.converged) ++nonconverged_;
                return argmax_action(actions_, res.theta);
            }
            case AgentKind::Grid: {
                ensure_grid();
                GridPosterior combined{settings_.grid, grid_offline_ + grid_online_};
                return argmax_action(actions_, sample_grid(combined, rng));
            }
        }
        throw ConfigError("agent: unknown kind");
    }

    void observe(int action_index, double reward) {
        if (action_index < 0 || action_index >= actions_.num_actions())
            throw std::out_of_range("observe: action index out of range");
        switch (kind_) {
            case AgentKind::Uninformed:
            case AgentKind::PartiallyInformed: {
                const Observation obs{actions_.action(action_index), reward};
                posterior_ = conjugate_update(*posterior_, std::span<const Observation>(&obs, 1));
                break;
            }
            case AgentKind::Informed:
                online_.emplace_back(action_index, reward);
                break;
            case AgentKind::Grid:
                online_.emplace_back(action_index, reward);
                if (grid_built_) {
                    const auto dots = grid_dots_.col(action_index).array();
                    grid_online_ += -0.5 * (reward - dots).square() -
                                    0.5 * std::log(2.0 * std::numbers::pi);
                }
                break;
        }
    }

    // Combined grid log-weights over all data seen so far (grid agent only);
    // matches a from-scratch grid_posterior rebuild within accumulation noise.
    Eigen::ArrayXd grid_log_weights() {
        if (kind_ != AgentKind::Grid) throw ConfigError("not a grid agent");
        ensure_grid();
        return grid_offline_ + grid_online_;
    }

    const std::optional<SolverDiagnostics>& last_diagnostics() const { return last_diagnostics_; }
    long solver_nonconverged() const { return nonconverged_; }

private:
    void ensure_grid() {
        if (grid_built_) return;
        // Fold any history observed before the first act into the base grid.
        std::vector<Observation> online_obs;
        online_obs.reserve(online_.size());
        for (const auto& [a, r] : online_) online_obs.emplace_back(actions_.action(a), r);
        const GridPosterior base =
            grid_posterior(prior_, offline_, online_obs, comp_, actions_, settings_.grid);
        grid_offline_ = base.log_weights;
        grid_online_ = Eigen::ArrayXd::Zero(base.log_weights.size());
        grid_dots_.resize(base.log_weights.size(), actions_.num_actions());
        GridPosterior probe{settings_.grid, grid_offline_};
        for (int c = 0; c < grid_dots_.rows(); ++c) {
            const Eigen::Vector2d center = probe.cell_center(c);
            for (int k = 0; k < actions_.num_actions(); ++k)
                grid_dots_(c, k) = actions_.action(k).dot(center);
        }
        grid_built_ = true;
    }

    AgentKind kind_;
    ActionSet actions_;
    PriorSpec prior_;
    Competence comp_;
    AgentSettings settings_;
    OfflineDataset offline_;
    std::vector<std::pair<int, double>> online_;

    std::optional<GaussianPosterior> posterior_;  // conjugate variants

    Vector warm_theta_, warm_vartheta_;  // informed: previous round's solution
    std::optional<SolverDiagnostics> last_diagnostics_;
    long nonconverged_ = 0;

    bool grid_built_ = false;
    Eigen::ArrayXd grid_offline_;  // prior + offline terms (+ pre-build history)
    Eigen::ArrayXd grid_online_;   // incrementally accumulated online terms
    Matrix grid_dots_;             // cells x K action dot products
};

}  // namespace demobandit
