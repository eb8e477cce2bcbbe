#include "demobandit/competence.hpp"

#include <vector>

#include "test_util.hpp"

using namespace demobandit;

namespace {

OfflineDataset make_dataset(std::vector<std::pair<int, double>> pairs) {
    OfflineDataset ds;
    ds.pairs = std::move(pairs);
    return ds;
}

OfflineDataset softmax_dataset(const Vector& theta, double beta, int N, std::uint64_t seed) {
    Environment env;
    env.theta = theta;
    env.actions = ActionSet::basis(static_cast<int>(theta.size()));
    RngStream rng(seed);
    return generate_demonstrations(env, {beta, 0.0}, ExpertPolicy::Softmax, N, rng);
}

}  // namespace

TEST_CASE("ridge least squares closed forms", "[competence]") {
    const ActionSet actions = ActionSet::basis(2);
    REQUIRE(ridge_least_squares(make_dataset({}), actions, 1.0).isZero(0.0));

    const Vector one = ridge_least_squares(make_dataset({{0, 1.0}}), actions, 1.0);
    REQUIRE(one(0) == Catch::Approx(0.5));
    REQUIRE(one(1) == Catch::Approx(0.0).margin(1e-15));

    const Vector three =
        ridge_least_squares(make_dataset({{0, 1.0}, {0, 1.0}, {0, 1.0}}), actions, 1.0);
    REQUIRE(three(0) == Catch::Approx(0.75));
    REQUIRE_THROWS_AS(ridge_least_squares(make_dataset({}), actions, 0.0), ConfigError);
}

TEST_CASE("MLE beta estimation", "[competence]") {
    SECTION("uniform data pushes beta to zero") {
        const Vector theta = Vector::LinSpaced(5, 2.0, -2.0);
        const OfflineDataset ds = softmax_dataset(theta, 0.0, 10000, 21);
        const BetaEstimate est = estimate_beta_mle(ds, ActionSet::basis(5), 1.0, 100.0);
        REQUIRE(est.beta_hat <= 0.1);
    }
    SECTION("recovers beta = 2 from well-separated arms") {
        Vector theta(5);
        theta << 2, 1, 0, -1, -2;
        const OfflineDataset ds = softmax_dataset(theta, 2.0, 10000, 22);
        const BetaEstimate est = estimate_beta_mle(ds, ActionSet::basis(5), 1.0, 100.0);
        REQUIRE(est.beta_hat >= 1.4);
        REQUIRE(est.beta_hat <= 2.6);
        REQUIRE(est.method == BetaMethod::MLE);
    }
    SECTION("single repeated action clips to beta_max") {
        const OfflineDataset ds = make_dataset({{2, 1.0}, {2, 0.5}, {2, 1.5}});
        const BetaEstimate est = estimate_beta_mle(ds, ActionSet::basis(4), 1.0, 100.0);
        REQUIRE(est.beta_hat == 100.0);
    }
    SECTION("empty dataset is rejected") {
        REQUIRE_THROWS_AS(estimate_beta_mle(make_dataset({}), ActionSet::basis(3), 1.0, 100.0),
                          ConfigError);
    }
}

TEST_CASE("MLE objective is convex in beta", "[competence]") {
    RngStream rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        Vector theta(4);
        for (int i = 0; i < 4; ++i) theta(i) = rng.normal();
        const OfflineDataset ds = softmax_dataset(theta, 2.0 * rng.uniform01(), 50,
                                                  1000 + static_cast<std::uint64_t>(rep));
        const ActionSet actions = ActionSet::basis(4);
        const Vector vt = ridge_least_squares(ds, actions, 1.0);
        auto nll = [&](double beta) { return detail::beta_nll(ds, actions, vt, beta); };
        const double b1 = 10.0 * rng.uniform01(), b2 = 10.0 * rng.uniform01();
        REQUIRE(nll(0.5 * (b1 + b2)) <= 0.5 * (nll(b1) + nll(b2)) + 1e-9);
    }
}

TEST_CASE("entropy beta estimation", "[competence]") {
    SECTION("uniform distribution over five arms") {
        OfflineDataset ds;
        for (int k = 0; k < 5; ++k)
            for (int i = 0; i < 7; ++i) ds.pairs.emplace_back(k, 0.0);
        const BetaEstimate est = estimate_beta_entropy(ds, 5, 1.0, 100.0);
        REQUIRE(est.diagnostic == Catch::Approx(std::log(5.0)));
        REQUIRE(est.beta_hat == Catch::Approx(1.0 / std::log(5.0)));
    }
    SECTION("zero entropy caps at beta_max") {
        const OfflineDataset ds = make_dataset({{1, 0.3}, {1, -0.4}, {1, 2.0}});
        const BetaEstimate est = estimate_beta_entropy(ds, 4, 1.0, 100.0);
        REQUIRE(est.beta_hat == 100.0);
        REQUIRE(est.diagnostic == 0.0);
    }
    SECTION("two balanced arms give 1/log 2") {
        const OfflineDataset ds = make_dataset({{0, 1.0}, {1, 0.0}, {0, 2.0}, {1, 3.0}});
        const BetaEstimate est = estimate_beta_entropy(ds, 2, 1.0, 100.0);
        REQUIRE(est.beta_hat == Catch::Approx(1.0 / std::log(2.0)));
    }
    SECTION("rewards never matter") {
        OfflineDataset a = make_dataset({{0, 1.0}, {1, -5.0}, {2, 0.0}});
        OfflineDataset b = make_dataset({{0, 9.9}, {1, 0.1}, {2, -3.2}});
        REQUIRE(estimate_beta_entropy(a, 3, 1.0, 100.0).beta_hat ==
                estimate_beta_entropy(b, 3, 1.0, 100.0).beta_hat);
    }
    SECTION("empty dataset is rejected") {
        REQUIRE_THROWS_AS(estimate_beta_entropy(make_dataset({}), 3, 1.0, 100.0), ConfigError);
    }
}

TEST_CASE("entropy estimate grows with concentration", "[competence]") {
    // Majorization ladder: each distribution is more concentrated than the
    // previous one, so beta_hat must be non-decreasing.
    const std::vector<std::vector<int>> counts = {
        {4, 4, 4, 4}, {6, 4, 3, 3}, {8, 4, 2, 2}, {12, 2, 1, 1}, {16, 0, 0, 0}};
    double last = 0.0;
    for (const auto& c : counts) {
        OfflineDataset ds;
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < c[k]; ++i) ds.pairs.emplace_back(k, 0.0);
        const double est = estimate_beta_entropy(ds, 4, 1.0, 100.0).beta_hat;
        REQUIRE(est >= last);
        last = est;
    }
}
