#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ehwsn/flow.hpp"
#include "test_util.hpp"

using namespace ehwsn;
using testutil::make_chain;
using testutil::make_star;

namespace {

HarvestingAllocation uniform(int v_count, double mu, double cap) {
    HarvestingAllocation a;
    a.mu.assign(v_count - 1, mu);
    a.cap.assign(v_count - 1, cap);
    return a;
}

std::vector<double> sensor_rates(int v_count, double rate) {
    std::vector<double> r(v_count, rate);
    r.back() = 0.0;
    return r;
}

} // namespace

TEST_CASE("single sensor closed form: alpha=1, N=1") {
    const auto t = make_chain({1.0, 0.0}, 0.0);
    const auto s = solve_flow(t, uniform(2, 1.0, 1.0));
    CHECK(s.theta[0] == 1.0);
    CHECK(s.node_loss[0] == 0.5);
    CHECK(s.theta[1] == 0.5);
    CHECK(s.network_loss == 0.5);
    CHECK(s.node_loss[1] == 0.0);
}

TEST_CASE("abundant harvesting leaves only channel loss") {
    const double q = 0.1;
    const auto t = make_chain({0.7, 0.0}, q);
    const auto s = solve_flow(t, uniform(2, 1e12, 10.0));
    CHECK(s.network_loss == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("three-node chain with supercapacitor-scale parameters") {
    const double q = 1e-5;
    const auto t = make_chain({0.0233, 0.0233, 0.0}, q);
    const auto s = solve_flow(t, uniform(3, 0.2326, 2283.0));
    CHECK(s.node_loss[0] == 0.0); // alpha ~ 10, p underflows
    CHECK(s.node_loss[1] == 0.0); // alpha ~ 5
    // hand-evaluated sweep: theta_sink = (1-q)*(lambda2 + (1-q)*lambda1)
    const double expected_pl = 1.0 - ((1.0 - q) * (1.0 - q) + (1.0 - q)) / 2.0;
    CHECK(s.network_loss == doctest::Approx(expected_pl).epsilon(1e-12));
    CHECK(expected_pl == doctest::Approx(1.5e-5).epsilon(1e-3));
}

TEST_CASE("theta lower-bounded by generation, fixed point reproduced") {
    GenerationConfig cfg;
    cfg.node_count = 25;
    cfg.rng_seed = 5;
    auto t = generate_network(cfg, sensor_rates(25, 0.02));
    t.channel_loss = 0.01;
    const auto a = uniform(25, 0.05, 20.0);
    const auto s = solve_flow(t, a);
    for (int v = 0; v < t.node_count; ++v)
        CHECK(s.theta[v] >= t.generation_rates[v]);
    // substitute (theta, p) back into the balance equation
    for (int v = 0; v < t.node_count; ++v) {
        double rhs = t.generation_rates[v];
        for (int i = 0; i < t.node_count; ++i)
            rhs += (1.0 - t.channel_loss) * t.route_fraction(v, i) * s.theta[i] *
                   (1.0 - s.node_loss[i]);
        CHECK(s.theta[v] == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("sweep solution satisfies the dense matrix form") {
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        GenerationConfig cfg;
        cfg.node_count = 20;
        cfg.rng_seed = seed;
        auto t = generate_network(cfg, sensor_rates(20, 0.0233));
        t.channel_loss = 1e-5;
        const auto s = solve_flow(t, uniform(20, 0.05, 50.0));
        Eigen::VectorXd p(t.node_count);
        for (int v = 0; v < t.node_count; ++v)
            p(v) = s.node_loss[v];
        const Eigen::VectorXd dense = testutil::dense_theta(t, p);
        for (int v = 0; v < t.node_count; ++v)
            CHECK(s.theta[v] == doctest::Approx(dense(v)).epsilon(1e-10));
    }
}

TEST_CASE("network loss bounds and errors") {
    const auto t = make_chain({1.0, 1.0, 0.0}, 0.0);
    FlowSolution s;
    s.theta = {1.0, 2.0, 2.0};
    CHECK(network_loss(t, s) == 0.0);
    s.theta = {1.0, 2.0, 0.0};
    CHECK(network_loss(t, s) == 1.0);

    auto silent = make_chain({0.0, 0.0, 0.0}, 0.0);
    CHECK_THROWS_AS(network_loss(silent, s), DomainError);
}

TEST_CASE("equal-loss series: trivial cases and dense-inverse oracle") {
    const auto chain = make_chain({1.0, 1.0, 0.0}, 0.0);
    CHECK(theta_equal_loss(chain, 1.0) == std::vector<double>{1.0, 1.0, 0.0});
    CHECK(theta_equal_loss(chain, 0.0) == std::vector<double>{1.0, 2.0, 2.0});
    const auto half = theta_equal_loss(chain, 0.5);
    CHECK(half[0] == doctest::Approx(1.0));
    CHECK(half[1] == doctest::Approx(1.5));
    CHECK(half[2] == doctest::Approx(0.75));

    for (std::uint64_t seed : {21ULL, 22ULL}) {
        GenerationConfig cfg;
        cfg.node_count = 15;
        cfg.rng_seed = seed;
        auto t = generate_network(cfg, sensor_rates(15, 0.03));
        t.channel_loss = 0.02;
        for (double p : {0.0, 0.3, 0.9}) {
            const auto series = theta_equal_loss(t, p);
            const Eigen::VectorXd dense =
                testutil::dense_theta(t, Eigen::VectorXd::Constant(t.node_count, p));
            for (int v = 0; v < t.node_count; ++v)
                CHECK(series[v] == doctest::Approx(dense(v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("raising any harvest rate never raises the loss") {
    GenerationConfig cfg;
    cfg.node_count = 12;
    cfg.rng_seed = 3;
    auto t = generate_network(cfg, sensor_rates(12, 0.05));
    t.channel_loss = 1e-4;
    auto a = uniform(12, 0.04, 10.0);
    const double base = solve_flow(t, a).network_loss;
    for (int v = 0; v < t.sensor_count(); ++v) {
        auto b = a;
        b.mu[v] *= 2.0;
        CHECK(solve_flow(t, b).network_loss <= base + 1e-15);
    }
}

TEST_CASE("degenerate and invalid inputs") {
    // sensor with no generation and no upstream traffic carries p = 0
    auto t = make_star({0.0, 1.0, 0.0}, 0.0);
    const auto s = solve_flow(t, uniform(3, 0.5, 4.0));
    CHECK(s.theta[0] == 0.0);
    CHECK(s.node_loss[0] == 0.0);

    auto cyclic = make_chain({1.0, 1.0, 0.0}, 0.0);
    cyclic.set_route_fraction(2, 1, 0.0);
    cyclic.set_route_fraction(0, 1, 1.0);
    CHECK_THROWS_AS(solve_flow(cyclic, uniform(3, 1.0, 2.0)), CyclicRoutingError);

    auto bad = uniform(3, 1.0, 2.0);
    bad.mu[0] = 0.0;
    CHECK_THROWS_AS(solve_flow(t, bad), DomainError);
    bad = uniform(3, 1.0, 0.5);
    CHECK_THROWS_AS(solve_flow(t, bad), DomainError);
}
