#include "demobandit/agents.hpp"

#include <vector>

#include "test_util.hpp"

using namespace demobandit;

namespace {

OfflineDataset pairs_only(std::vector<std::pair<int, double>> pairs) {
    OfflineDataset ds;
    ds.pairs = std::move(pairs);
    return ds;
}

}  // namespace

TEST_CASE("uninformed agent ignores the offline data", "[agents]") {
    const ActionSet actions = ActionSet::basis(3);
    const PriorSpec prior = PriorSpec::standard(3);
    Agent with_data(AgentKind::Uninformed, pairs_only({{0, 5.0}, {1, -2.0}}), prior, {2.0, 0.0},
                    actions);
    Agent without(AgentKind::Uninformed, OfflineDataset{}, prior, {2.0, 0.0}, actions);
    REQUIRE(with_data.posterior().mean.isZero(0.0));
    REQUIRE(testutil::bitwise_equal(with_data.posterior().covariance,
                                    without.posterior().covariance));
    RngStream r1(1), r2(1);
    for (int i = 0; i < 200; ++i) REQUIRE(with_data.act(r1) == without.act(r2));
}

TEST_CASE("partially-informed agent folds offline rewards conjugately", "[agents]") {
    const PriorSpec prior = PriorSpec::standard(5);
    const ActionSet actions = ActionSet::basis(5);

    Agent empty(AgentKind::PartiallyInformed, OfflineDataset{}, prior, {0.0, 0.0}, actions);
    REQUIRE(empty.posterior().mean.isZero(0.0));
    REQUIRE(empty.posterior().covariance.isApprox(prior.covariance, 1e-12));

    Agent informed(AgentKind::PartiallyInformed, pairs_only({{1, 2.0}, {1, 2.0}}), prior,
                   {0.0, 0.0}, actions);
    REQUIRE(informed.posterior().mean(1) == Catch::Approx(4.0 / 3.0));
    REQUIRE(informed.posterior().covariance(1, 1) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("degenerate posterior always plays the argmax", "[agents]") {
    Vector theta(4);
    theta << 0.1, 0.9, 0.3, -2.0;
    PriorSpec prior{theta, 1e-12 * Matrix::Identity(4, 4)};
    Agent agent(AgentKind::Uninformed, OfflineDataset{}, prior, {0.0, 0.0},
                ActionSet::basis(4));
    RngStream rng(2);
    int hits = 0;
    for (int i = 0; i < 10000; ++i) hits += agent.act(rng) == 1;
    REQUIRE(double(hits) / 10000 >= 0.999);
}

TEST_CASE("uninformed first action is uniform by symmetry", "[agents]") {
    const int K = 5;
    Agent agent(AgentKind::Uninformed, OfflineDataset{}, PriorSpec::standard(K), {0.0, 0.0},
                ActionSet::basis(K));
    RngStream rng(3);
    std::vector<int> counts(K, 0);
    const int M = 10000;
    for (int i = 0; i < M; ++i) counts[agent.act(rng)]++;
    const double se = std::sqrt((1.0 / K) * (1.0 - 1.0 / K) / M);
    for (int k = 0; k < K; ++k)
        REQUIRE(std::abs(double(counts[k]) / M - 1.0 / K) < 3 * se);
}

TEST_CASE("observe updates the conjugate state", "[agents]") {
    const PriorSpec prior = PriorSpec::standard(3);
    Agent agent(AgentKind::PartiallyInformed, OfflineDataset{}, prior, {0.0, 0.0},
                ActionSet::basis(3));
    const double before = agent.posterior().mean(2);
    agent.observe(2, 3.0);
    REQUIRE(agent.posterior().mean(2) > before);
    REQUIRE(agent.posterior().mean(2) == Catch::Approx(1.5));

    // Sequential observes match batch offline initialization.
    Agent seq(AgentKind::PartiallyInformed, OfflineDataset{}, prior, {0.0, 0.0},
              ActionSet::basis(3));
    seq.observe(0, 1.0);
    seq.observe(2, -0.5);
    seq.observe(0, 0.25);
    Agent batch(AgentKind::PartiallyInformed, pairs_only({{0, 1.0}, {2, -0.5}, {0, 0.25}}),
                prior, {0.0, 0.0}, ActionSet::basis(3));
    REQUIRE((seq.posterior().mean - batch.posterior().mean).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE((seq.posterior().covariance - batch.posterior().covariance)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
}

TEST_CASE("informed agent tracks history and surfaces diagnostics", "[agents]") {
    const ActionSet actions = ActionSet::basis(3);
    Agent agent(AgentKind::Informed, pairs_only({{0, 1.0}}), PriorSpec::standard(3),
                {5.0, 0.0}, actions);
    RngStream rng(4);
    REQUIRE(agent.online_count() == 0);
    const int a = agent.act(rng);
    REQUIRE(a >= 0);
    REQUIRE(a < 3);
    agent.observe(a, 0.5);
    REQUIRE(agent.online_count() == 1);
    agent.observe(0, -0.25);
    REQUIRE(agent.online_count() == 2);
    REQUIRE(agent.last_diagnostics().has_value());
    REQUIRE(agent.last_diagnostics()->converged);
    REQUIRE(agent.last_diagnostics()->grad_norm <= 1e-6);
}

TEST_CASE("informed agent at beta = 0 matches partially-informed choices", "[agents]") {
    // With beta = 0 the action likelihood is flat, so the bootstrap target
    // collapses to the reward-only posterior the conjugate agent samples.
    const ActionSet actions = ActionSet::basis(5);
    const PriorSpec prior = PriorSpec::standard(5);
    RngStream setup(5);
    Environment env = sample_environment(prior, {ActionSetKind::Basis, 5, 5}, setup);
    const OfflineDataset offline =
        generate_demonstrations(env, {3.0, 0.0}, ExpertPolicy::Softmax, 10, setup);

    Agent informed(AgentKind::Informed, offline, prior, {0.0, 0.0}, actions);
    Agent partial(AgentKind::PartiallyInformed, offline, prior, {0.0, 0.0}, actions);

    const int M = 1000;
    Vector p_informed = Vector::Zero(5), p_partial = Vector::Zero(5);
    RngStream r1(6), r2(7);
    for (int i = 0; i < M; ++i) {
        p_informed(informed.act(r1)) += 1.0;
        p_partial(partial.act(r2)) += 1.0;
    }
    p_informed /= M;
    p_partial /= M;
    REQUIRE(testutil::total_variation(p_informed, p_partial) < 0.1);
}

TEST_CASE("probability matching against the bivariate closed form", "[agents]") {
    const PriorSpec prior = PriorSpec::standard(2);
    Agent agent(AgentKind::Uninformed, OfflineDataset{}, prior, {0.0, 0.0},
                ActionSet::basis(2));
    RngStream data_rng(8);
    for (int i = 0; i < 30; ++i) agent.observe(0, 0.4 + data_rng.normal());
    for (int i = 0; i < 25; ++i) agent.observe(1, 0.1 + data_rng.normal());

    const GaussianPosterior& post = agent.posterior();
    const double mu = post.mean(0) - post.mean(1);
    const double sd = std::sqrt(post.covariance(0, 0) + post.covariance(1, 1) -
                                2.0 * post.covariance(0, 1));
    const double p_closed = testutil::phi(mu / sd);

    RngStream rng(9);
    const int M = 10000;
    int arm0 = 0;
    for (int i = 0; i < M; ++i) arm0 += agent.act(rng) == 0;
    REQUIRE(std::abs(double(arm0) / M - p_closed) < 0.02);
}

TEST_CASE("grid agent incremental weights match a full rebuild", "[agents]") {
    const ActionSet actions = ActionSet::basis(2);
    const PriorSpec prior = PriorSpec::standard(2);
    RngStream setup(10);
    Environment env = sample_environment(prior, {ActionSetKind::Basis, 2, 2}, setup);
    const OfflineDataset offline =
        generate_demonstrations(env, {4.0, 0.2}, ExpertPolicy::Softmax, 6, setup);

    AgentSettings settings;
    settings.grid = {-4.0, 4.0, 101};
    Agent agent(AgentKind::Grid, offline, prior, {4.0, 0.2}, actions, settings);

    RngStream rng(11);
    std::vector<Observation> online;
    for (int t = 0; t < 25; ++t) {
        const int a = agent.act(rng);
        const double r = pull(env, a, rng);
        agent.observe(a, r);
        online.emplace_back(actions.action(a), r);
    }
    const GridPosterior rebuilt =
        grid_posterior(prior, offline, online, {4.0, 0.2}, actions, settings.grid);
    REQUIRE((agent.grid_log_weights() - rebuilt.log_weights).abs().maxCoeff() < 1e-9);
}

TEST_CASE("grid agent requires d = 2", "[agents]") {
    REQUIRE_THROWS_AS(Agent(AgentKind::Grid, OfflineDataset{}, PriorSpec::standard(3),
                            {1.0, 0.0}, ActionSet::basis(3)),
                      ConfigError);
}

TEST_CASE("agents are deterministic given the stream", "[agents]") {
    const ActionSet actions = ActionSet::basis(2);
    const PriorSpec prior = PriorSpec::standard(2);
    RngStream setup(12);
    Environment env = sample_environment(prior, {ActionSetKind::Basis, 2, 2}, setup);
    const OfflineDataset offline =
        generate_demonstrations(env, {2.0, 0.1}, ExpertPolicy::Softmax, 5, setup);

    for (AgentKind kind : {AgentKind::Uninformed, AgentKind::PartiallyInformed,
                           AgentKind::Informed, AgentKind::Grid}) {
        AgentSettings settings;
        settings.grid = {-4.0, 4.0, 61};
        Agent a1(kind, offline, prior, {2.0, 0.1}, actions, settings);
        Agent a2(kind, offline, prior, {2.0, 0.1}, actions, settings);
        RngStream r1(13), r2(13);
        for (int t = 0; t < 15; ++t) {
            const int act1 = a1.act(r1);
            const int act2 = a2.act(r2);
            REQUIRE(act1 == act2);
            a1.observe(act1, 0.1 * t);
            a2.observe(act2, 0.1 * t);
        }
    }
}
