#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "demobandit/errors.hpp"
#include "demobandit/rng.hpp"

namespace demobandit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ActionSetKind { Basis, UnitSphere };

inline std::string to_string(ActionSetKind k) {
    return k == ActionSetKind::Basis ? "basis" : "unit_sphere";
}

// K feature vectors in R^d, one per column.
struct ActionSet {
    Matrix vectors;  // d x K
    ActionSetKind kind = ActionSetKind::Basis;

    int num_actions() const { return static_cast<int>(vectors.cols()); }
    int dim() const { return static_cast<int>(vectors.rows()); }
    Eigen::Ref<const Vector> action(int i) const { return vectors.col(i); }

    static ActionSet basis(int K) {
        if (K < 2) throw ConfigError("action set needs K >= 2");
        ActionSet s;
        s.kind = ActionSetKind::Basis;
        s.vectors = Matrix::Identity(K, K);
        return s;
    }

    static ActionSet unit_sphere(Matrix vecs) {
        ActionSet s;
        s.kind = ActionSetKind::UnitSphere;
        s.vectors = std::move(vecs);
        s.validate();
        return s;
    }

    void validate() const {
        if (num_actions() < 2) throw ConfigError("action set needs K >= 2");
        if (kind == ActionSetKind::Basis) {
            if (num_actions() != dim())
                throw ConfigError("basis action set requires K = d");
            if (!vectors.isIdentity(1e-12))
                throw ConfigError("basis action set must hold standard basis vectors");
        } else {
            for (int i = 0; i < num_actions(); ++i) {
                if (std::abs(vectors.col(i).norm() - 1.0) > 1e-12)
                    throw ConfigError("unit-sphere action " + std::to_string(i) +
                                      " is not unit norm");
            }
        }
    }
};

struct PriorSpec {
    Vector mean;
    Matrix covariance;

    int dim() const { return static_cast<int>(mean.size()); }

    static PriorSpec standard(int d) {
        return PriorSpec{Vector::Zero(d), Matrix::Identity(d, d)};
    }

    // Symmetric within 1e-12 and positive-definite (Cholesky succeeds).
    void validate() const {
        if (mean.size() != covariance.rows() || covariance.rows() != covariance.cols())
            throw ConfigError("prior mean/covariance dimensions disagree");
        if (!covariance.isApprox(covariance.transpose(), 1e-12))
            throw ConfigError("prior covariance is not symmetric");
        Eigen::LLT<Matrix> llt(covariance);
        if (llt.info() != Eigen::Success)
            throw ConfigError("prior covariance is not positive-definite");
    }

    Matrix cholesky() const {
        Eigen::LLT<Matrix> llt(covariance);
        if (llt.info() != Eigen::Success)
            throw NumericalError("Cholesky factorization of prior covariance failed");
        return llt.matrixL();
    }
};

// Ground truth for one episode: latent theta, the action set, unit noise.
struct Environment {
    Vector theta;
    ActionSet actions;
    double noise_std = 1.0;
};

struct ActionConfig {
    ActionSetKind kind = ActionSetKind::Basis;
    int K = 2;
    int d = 2;
};

// Draw order is fixed: theta first (d normals through the prior Cholesky),
// then K*d normals for unit-sphere directions.
inline Environment sample_environment(const PriorSpec& prior, const ActionConfig& cfg,
                                      RngStream& rng) {
    prior.validate();
    if (cfg.K < 2) throw ConfigError("K must be >= 2");
    if (cfg.d < 1) throw ConfigError("d must be >= 1");
    if (cfg.kind == ActionSetKind::Basis && cfg.K != cfg.d)
        throw ConfigError("basis action set requires K = d");
    if (prior.dim() != cfg.d) throw ConfigError("prior dimension does not match d");

    const Matrix chol = prior.cholesky();
    Vector z(cfg.d);
    for (int i = 0; i < cfg.d; ++i) z(i) = rng.normal();
    Environment env;
    env.theta = prior.mean + chol * z;

    if (cfg.kind == ActionSetKind::Basis) {
        env.actions = ActionSet::basis(cfg.K);
    } else {
        Matrix vecs(cfg.d, cfg.K);
        for (int k = 0; k < cfg.K; ++k) {
            for (int i = 0; i < cfg.d; ++i) vecs(i, k) = rng.normal();
            vecs.col(k).normalize();
        }
        env.actions = ActionSet::unit_sphere(std::move(vecs));
    }
    return env;
}

// Observed reward <a, theta> + N(0,1) noise, fresh draw per call.
inline double pull(const Environment& env, int action_index, RngStream& rng) {
    if (action_index < 0 || action_index >= env.actions.num_actions())
        throw std::out_of_range("pull: action index out of range");
    return env.actions.action(action_index).dot(env.theta) + env.noise_std * rng.normal();
}

// Argmax of <a, theta> over an action set; ties broken by lowest index.
inline int argmax_action(const ActionSet& actions, const Vector& theta) {
    int best = 0;
    double best_value = actions.action(0).dot(theta);
    for (int i = 1; i < actions.num_actions(); ++i) {
        const double v = actions.action(i).dot(theta);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    return best;
}

inline int optimal_action(const Environment& env) {
    return argmax_action(env.actions, env.theta);
}

// Expected-reward regret <A*, theta> - <a, theta>; zero at the optimum.
inline double instant_regret(const Environment& env, int action_index) {
    if (action_index < 0 || action_index >= env.actions.num_actions())
        throw std::out_of_range("instant_regret: action index out of range");
    const double best = env.actions.action(optimal_action(env)).dot(env.theta);
    return best - env.actions.action(action_index).dot(env.theta);
}

}  // namespace demobandit
