#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "demobandit/expert.hpp"

namespace demobandit {

// Variance convention for the vartheta prior perturbation. The working
// choice matches the vartheta | theta prior N(theta, I/lambda^2); the
// alternative uses variance 1/lambda and exists for sensitivity checks.
enum class VarthetaPerturbation { VarianceInvLambdaSq, VarianceInvLambda };

// One round's resampled randomness for the perturbed MAP loss.
struct PerturbationSet {
    Eigen::ArrayXd w;           // N bootstrap weights, Exp(1), > 0
    Eigen::ArrayXd xi_offline;  // N reward perturbations, N(0,1)
    Eigen::ArrayXd xi_online;   // t reward perturbations, N(0,1)
    Vector theta0_tilde;        // prior draw, N(mean0, Sigma0)
    Vector vartheta_tilde;      // coupling draw; zero when inv_lambda = 0
};

// Draw order: w, xi_offline, xi_online, theta0_tilde, vartheta_tilde.
inline PerturbationSet sample_perturbations(
    int N, int t, int d, const PriorSpec& prior, const Competence& comp, RngStream& rng,
    VarthetaPerturbation vp = VarthetaPerturbation::VarianceInvLambdaSq) {
    if (N < 0 || t < 0) throw ConfigError("sample_perturbations: N, t must be >= 0");
    comp.validate();
    PerturbationSet p;
    p.w.resize(N);
    for (int n = 0; n < N; ++n) p.w(n) = rng.exponential();
    p.xi_offline.resize(N);
    for (int n = 0; n < N; ++n) p.xi_offline(n) = rng.normal();
    p.xi_online.resize(t);
    for (int i = 0; i < t; ++i) p.xi_online(i) = rng.normal();

    const Matrix chol = prior.cholesky();
    Vector z(d);
    for (int i = 0; i < d; ++i) z(i) = rng.normal();
    p.theta0_tilde = prior.mean + chol * z;

    if (comp.inv_lambda == 0.0) {
        p.vartheta_tilde = Vector::Zero(d);
    } else {
        const double sd = vp == VarthetaPerturbation::VarianceInvLambdaSq
                              ? comp.inv_lambda
                              : std::sqrt(comp.inv_lambda);
        p.vartheta_tilde.resize(d);
        for (int i = 0; i < d; ++i) p.vartheta_tilde(i) = sd * rng.normal();
    }
    return p;
}

// Assembled objective L~1 + L~2 + L~3 over (theta, vartheta). Observation
// terms are aggregated per action index, so evaluations cost O(K d)
// independent of N and t. When inv_lambda = 0 the vartheta variable is
// eliminated (vartheta == theta) and the coupling term drops.
class LossSpec {
public:
    LossSpec(const ActionSet& actions, std::span<const std::pair<int, double>> offline,
             std::span<const std::pair<int, double>> online, const Competence& comp,
             const PriorSpec& prior, const PerturbationSet& perturb)
        : actions_(actions), comp_(comp), perturb_(perturb) {
        comp_.validate();
        const int K = actions_.num_actions();
        const int N = static_cast<int>(offline.size());
        const int t = static_cast<int>(online.size());
        if (perturb.w.size() != N || perturb.xi_offline.size() != N ||
            perturb.xi_online.size() != t)
            throw ConfigError("LossSpec: perturbation sizes disagree with data sizes");

        Eigen::LLT<Matrix> llt(prior.covariance);
        if (llt.info() != Eigen::Success)
            throw NumericalError("LossSpec: prior covariance not positive-definite");
        prior_precision_ = llt.solve(Matrix::Identity(prior.dim(), prior.dim()));

        reward_count_ = Vector::Zero(K);
        reward_target_ = Vector::Zero(K);
        weighted_action_count_ = Vector::Zero(K);
        for (int n = 0; n < N; ++n) {
            const auto [a, r] = offline[n];
            if (a < 0 || a >= K) throw ConfigError("LossSpec: offline action out of range");
            const double y = r + perturb.xi_offline(n);
            reward_count_(a) += 1.0;
            reward_target_(a) += y;
            target_sq_ += y * y;
            weighted_action_count_(a) += perturb.w(n);
        }
        for (int i = 0; i < t; ++i) {
            const auto [a, r] = online[i];
            if (a < 0 || a >= K) throw ConfigError("LossSpec: online action out of range");
            const double y = r + perturb.xi_online(i);
            reward_count_(a) += 1.0;
            reward_target_(a) += y;
            target_sq_ += y * y;
        }
        total_weight_ = perturb.w.sum();
        lam_sq_ = comp_.inv_lambda > 0.0 ? 1.0 / (comp_.inv_lambda * comp_.inv_lambda) : 0.0;
    }

    const ActionSet& actions() const { return actions_; }
    const Competence& competence() const { return comp_; }
    const PerturbationSet& perturbations() const { return perturb_; }
    bool vartheta_eliminated() const { return comp_.inv_lambda == 0.0; }
    int dim() const { return actions_.dim(); }

    double loss(const Vector& theta, const Vector& vartheta) const {
        const Vector& vt = vartheta_eliminated() ? theta : vartheta;
        double value = action_loss(vt) + reward_loss(theta);
        const Vector dp = theta - perturb_.theta0_tilde;
        value += dp.dot(prior_precision_ * dp);
        if (!vartheta_eliminated()) {
            const Vector dc = vartheta - theta - perturb_.vartheta_tilde;
            value += lam_sq_ * dc.squaredNorm();
        }
        return value;
    }

    // (grad_theta, grad_vartheta); the vartheta slot is zero in the
    // eliminated regime where the chain rule folds into grad_theta.
    std::pair<Vector, Vector> gradient(const Vector& theta, const Vector& vartheta) const {
        const Vector& vt = vartheta_eliminated() ? theta : vartheta;
        Vector g_action = action_loss_gradient(vt);
        Vector g_theta = reward_loss_gradient(theta);
        g_theta.noalias() += 2.0 * (prior_precision_ * (theta - perturb_.theta0_tilde));
        if (vartheta_eliminated())
            return {g_theta + g_action, Vector::Zero(dim())};
        const Vector dc = vartheta - theta - perturb_.vartheta_tilde;
        g_theta.noalias() -= 2.0 * lam_sq_ * dc;
        return {std::move(g_theta), (g_action + 2.0 * lam_sq_ * dc).eval()};
    }

private:
    // L~1 = 2 sum_n w_n (lse(beta vt) - beta vt^T A_n), via per-arm weights.
    double action_loss(const Vector& vt) const {
        if (total_weight_ == 0.0) return 0.0;
        const Vector logits = comp_.beta * (actions_.vectors.transpose() * vt);
        const double m = logits.maxCoeff();
        const double lse = m + std::log((logits.array() - m).exp().sum());
        return 2.0 * (total_weight_ * lse - weighted_action_count_.dot(logits));
    }

    Vector action_loss_gradient(const Vector& vt) const {
        if (total_weight_ == 0.0 || comp_.beta == 0.0) return Vector::Zero(dim());
        const Vector logits = comp_.beta * (actions_.vectors.transpose() * vt);
        const double m = logits.maxCoeff();
        Vector probs = (logits.array() - m).exp();
        probs /= probs.sum();
        return 2.0 * comp_.beta *
               (actions_.vectors * (total_weight_ * probs - weighted_action_count_));
    }

    // L~2 = sum (y - theta^T a)^2 over offline and online observations.
    double reward_loss(const Vector& theta) const {
        const Vector dots = actions_.vectors.transpose() * theta;
        double value = target_sq_;
        for (int k = 0; k < reward_count_.size(); ++k)
            value += reward_count_(k) * dots(k) * dots(k) - 2.0 * reward_target_(k) * dots(k);
        return value;
    }

    Vector reward_loss_gradient(const Vector& theta) const {
        const Vector dots = actions_.vectors.transpose() * theta;
        return 2.0 * (actions_.vectors *
                      (reward_count_.asDiagonal() * dots - reward_target_));
    }

    const ActionSet& actions_;
    Competence comp_;
    const PerturbationSet& perturb_;
    Matrix prior_precision_;
    Vector reward_count_;           // per-arm observation counts
    Vector reward_target_;          // per-arm sums of perturbed rewards
    Vector weighted_action_count_;  // per-arm sums of bootstrap weights
    double target_sq_ = 0.0;
    double total_weight_ = 0.0;
    double lam_sq_ = 0.0;
};

inline double perturbed_loss(const Vector& theta, const Vector& vartheta, const LossSpec& spec) {
    return spec.loss(theta, vartheta);
}

inline std::pair<Vector, Vector> perturbed_loss_gradient(const Vector& theta,
                                                         const Vector& vartheta,
                                                         const LossSpec& spec) {
    return spec.gradient(theta, vartheta);
}

struct SolverSettings {
    double tol = 1e-6;       // joint gradient norm target
    int max_iters = 5000;
    double init_step = 1.0;
    double armijo_c = 1e-4;
    // Armijo reference window (SPG style): the sufficient-decrease test
    // compares against the max loss over this many recent iterates. 1 is
    // the classical monotone rule; larger windows let Barzilai-Borwein
    // steps through and keep iteration counts flat in the horizon.
    int armijo_window = 10;
    VarthetaPerturbation vartheta_perturbation = VarthetaPerturbation::VarianceInvLambdaSq;
};

struct SolverDiagnostics {
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    double loss = 0.0;
};

struct MinimizeResult {
    Vector theta;
    Vector vartheta;
    SolverDiagnostics diagnostics;
};

// Gradient descent with Armijo halving backtracking. Trial steps start from
// the Barzilai-Borwein length after the first iteration, which keeps the
// iteration count flat as the reward quadratic sharpens over a run.
inline MinimizeResult minimize(const LossSpec& spec, Vector theta0, Vector vartheta0,
                               const SolverSettings& settings = {}) {
    if (settings.tol <= 0.0) throw ConfigError("minimize: tol must be > 0");
    if (settings.armijo_window < 1) throw ConfigError("minimize: armijo_window must be >= 1");
    const int d = spec.dim();
    const bool eliminated = spec.vartheta_eliminated();
    const int n = eliminated ? d : 2 * d;

    auto pack = [&](const Vector& th, const Vector& vt) {
        Vector x(n);
        x.head(d) = th;
        if (!eliminated) x.tail(d) = vt;
        return x;
    };
    auto theta_of = [&](const Vector& x) { return x.head(d).eval(); };
    auto vartheta_of = [&](const Vector& x) {
        return eliminated ? x.head(d).eval() : x.tail(d).eval();
    };
    auto eval_loss = [&](const Vector& x) { return spec.loss(theta_of(x), vartheta_of(x)); };
    auto eval_grad = [&](const Vector& x) {
        auto [gt, gv] = spec.gradient(theta_of(x), vartheta_of(x));
        Vector g(n);
        g.head(d) = gt;
        if (!eliminated) g.tail(d) = gv;
        return g;
    };

    Vector x = pack(theta0, vartheta0);
    double fx = eval_loss(x);
    if (!std::isfinite(fx))
        throw NumericalError("minimize: non-finite loss at the initial point");
    Vector g = eval_grad(x);

    Vector best_x = x;
    double best_f = fx, best_gnorm = g.norm();
    Vector prev_x, prev_g;
    bool have_prev = false;
    std::vector<double> recent_f;  // Armijo reference window

    SolverDiagnostics diag;
    for (int iter = 0; iter < settings.max_iters; ++iter) {
        const double gnorm = g.norm();
        if (gnorm < best_gnorm) {
            best_gnorm = gnorm;
            best_f = fx;
            best_x = x;
        }
        if (gnorm <= settings.tol) {
            diag.converged = true;
            diag.iterations = iter;
            diag.grad_norm = gnorm;
            diag.loss = fx;
            return {theta_of(x), vartheta_of(x), diag};
        }

        double step = settings.init_step;
        if (have_prev) {
            const Vector s = x - prev_x;
            const Vector y = g - prev_g;
            const double sy = s.dot(y);
            if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, 1e-12, 1e8);
        }

        recent_f.push_back(fx);
        if (static_cast<int>(recent_f.size()) > settings.armijo_window)
            recent_f.erase(recent_f.begin());
        const double f_ref = *std::max_element(recent_f.begin(), recent_f.end());

        const double slope = -gnorm * gnorm;  // directional derivative along -g
        Vector x_new;
        double f_new = 0.0;
        bool accepted = false;
        for (int backtrack = 0; backtrack < 64; ++backtrack) {
            x_new = x - step * g;
            f_new = eval_loss(x_new);
            if (std::isfinite(f_new) && f_new <= f_ref + settings.armijo_c * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: report the best iterate

        prev_x = std::move(x);
        prev_g = std::move(g);
        have_prev = true;
        x = std::move(x_new);
        fx = f_new;
        if (!std::isfinite(fx))
            throw NumericalError("minimize: non-finite loss at iterate " + std::to_string(iter));
        g = eval_grad(x);
    }

    const double gnorm = g.norm();
    if (gnorm < best_gnorm) {
        best_gnorm = gnorm;
        best_f = fx;
        best_x = x;
    }
    diag.converged = best_gnorm <= settings.tol;
    diag.iterations = settings.max_iters;
    diag.grad_norm = best_gnorm;
    diag.loss = best_f;
    return {theta_of(best_x), vartheta_of(best_x), diag};
}

}  // namespace demobandit
