#include "demobandit/bandit.hpp"

#include <vector>

#include "test_util.hpp"

using namespace demobandit;

namespace {

Environment make_env(Vector theta, ActionSet actions) {
    return Environment{std::move(theta), std::move(actions)};
}

}  // namespace

TEST_CASE("sample_environment basis and unit-sphere shapes", "[bandit]") {
    RngStream rng(1);
    const PriorSpec prior = PriorSpec::standard(5);

    const Environment basis = sample_environment(prior, {ActionSetKind::Basis, 5, 5}, rng);
    REQUIRE(basis.theta.size() == 5);
    REQUIRE(basis.actions.num_actions() == 5);
    for (int i = 0; i < 5; ++i)
        REQUIRE(basis.actions.action(i).isApprox(Vector::Unit(5, i)));

    const Environment sphere =
        sample_environment(prior, {ActionSetKind::UnitSphere, 20, 5}, rng);
    REQUIRE(sphere.actions.num_actions() == 20);
    REQUIRE(sphere.actions.dim() == 5);
    for (int k = 0; k < 20; ++k)
        REQUIRE(std::abs(sphere.actions.action(k).norm() - 1.0) <= 1e-12);
}

TEST_CASE("sample_environment rejects bad configs", "[bandit]") {
    RngStream rng(2);
    PriorSpec zero = PriorSpec::standard(3);
    zero.covariance.setZero();
    REQUIRE_THROWS_AS(sample_environment(zero, {ActionSetKind::Basis, 3, 3}, rng), ConfigError);
    REQUIRE_THROWS_AS(
        sample_environment(PriorSpec::standard(3), {ActionSetKind::Basis, 4, 3}, rng),
        ConfigError);
    REQUIRE_THROWS_AS(
        sample_environment(PriorSpec::standard(3), {ActionSetKind::UnitSphere, 1, 3}, rng),
        ConfigError);
}

TEST_CASE("same seed gives bit-identical environments", "[bandit]") {
    const PriorSpec prior = PriorSpec::standard(4);
    RngStream r1(99), r2(99);
    const Environment e1 = sample_environment(prior, {ActionSetKind::UnitSphere, 7, 4}, r1);
    const Environment e2 = sample_environment(prior, {ActionSetKind::UnitSphere, 7, 4}, r2);
    REQUIRE(testutil::bitwise_equal(e1.theta, e2.theta));
    REQUIRE(testutil::bitwise_equal(e1.actions.vectors, e2.actions.vectors));
}

TEST_CASE("pull is unbiased", "[bandit]") {
    const int M = 100000;
    const double tol = 4.0 / std::sqrt(double(M));

    SECTION("zero parameter") {
        Environment env = make_env(Vector::Zero(3), ActionSet::basis(3));
        RngStream rng(5);
        std::vector<double> xs(M);
        for (auto& x : xs) x = pull(env, 1, rng);
        REQUIRE(std::abs(testutil::mean(xs)) < 0.02);
    }
    SECTION("basis arm with unit mean") {
        Environment env = make_env(Vector::Unit(3, 0), ActionSet::basis(3));
        RngStream rng(6);
        std::vector<double> xs(M);
        for (auto& x : xs) x = pull(env, 0, rng);
        REQUIRE(std::abs(testutil::mean(xs) - 1.0) < 0.02);
    }
    SECTION("general inner product") {
        Vector theta(2);
        theta << 0.3, -0.2;
        Matrix vecs(2, 2);
        vecs << 0.6, 1.0, 0.8, 0.0;
        Environment env = make_env(theta, ActionSet::unit_sphere(vecs));
        RngStream rng(7);
        std::vector<double> xs(M);
        for (auto& x : xs) x = pull(env, 0, rng);
        REQUIRE(std::abs(testutil::mean(xs) - 0.02) < tol);
    }
}

TEST_CASE("pull rejects out-of-range index", "[bandit]") {
    Environment env = make_env(Vector::Zero(2), ActionSet::basis(2));
    RngStream rng(8);
    REQUIRE_THROWS_AS(pull(env, 2, rng), std::out_of_range);
    REQUIRE_THROWS_AS(pull(env, -1, rng), std::out_of_range);
}

TEST_CASE("optimal_action picks the argmax with lowest-index ties", "[bandit]") {
    Vector theta(3);
    theta << 3, 1, 2;
    REQUIRE(optimal_action(make_env(theta, ActionSet::basis(3))) == 0);
    REQUIRE(optimal_action(make_env(Vector::Zero(3), ActionSet::basis(3))) == 0);

    Matrix vecs(2, 2);
    vecs << 0.6, 1.0, 0.8, 0.0;
    Vector t2(2);
    t2 << 1, 0;
    REQUIRE(optimal_action(make_env(t2, ActionSet::unit_sphere(vecs))) == 1);
}

TEST_CASE("instant_regret values", "[bandit]") {
    Vector theta(3);
    theta << 3, 1, 2;
    Environment env = make_env(theta, ActionSet::basis(3));
    REQUIRE(instant_regret(env, optimal_action(env)) == 0.0);
    REQUIRE(instant_regret(env, 1) == Catch::Approx(2.0));
    REQUIRE(instant_regret(env, 2) == Catch::Approx(1.0));
}

TEST_CASE("instant_regret is nonnegative, zero only at maximizers", "[bandit]") {
    RngStream rng(10);
    for (int rep = 0; rep < 50; ++rep) {
        const Environment env =
            sample_environment(PriorSpec::standard(3), {ActionSetKind::UnitSphere, 6, 3}, rng);
        const int best = optimal_action(env);
        const double best_value = env.actions.action(best).dot(env.theta);
        for (int a = 0; a < 6; ++a) {
            const double r = instant_regret(env, a);
            REQUIRE(r >= 0.0);
            const bool maximal = env.actions.action(a).dot(env.theta) == best_value;
            REQUIRE((r == 0.0) == maximal);
        }
    }
}
