// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits with the number of failed criteria.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "ehwsn/flow.hpp"
#include "ehwsn/queueing.hpp"
#include "ehwsn/simulator.hpp"
#include "test_util.hpp"

using namespace ehwsn;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

NetworkTopology random_network(int v_count, std::uint64_t seed, double q,
                               const std::vector<double>& rates) {
    GenerationConfig cfg;
    cfg.node_count = v_count;
    cfg.rng_seed = seed;
    auto t = generate_network(cfg, rates);
    t.channel_loss = q;
    return t;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- criterion 1: analytic vs simulation over jittered random networks ----

void criterion_1() {
    const int networks = 50;
    const double q = 1e-5;
    std::mt19937_64 rng(2026);
    int checked = 0, agreed = 0;
    double worst = 0.0;
    for (int net = 0; net < networks; ++net) {
        const int v_count = 10 + static_cast<int>(uniform01(rng) * 91.0);
        const double lambda_typ = 0.4652 / v_count;
        std::vector<double> rates(v_count, 0.0);
        HarvestingAllocation a;
        for (int v = 0; v < v_count - 1; ++v) {
            auto jitter = [&] { return 0.5 + uniform01(rng); };
            rates[v] = lambda_typ * jitter();
            a.mu.push_back(0.2326 * jitter());
            a.cap.push_back(std::max(1.0, std::round(2283.0 * jitter())));
        }
        const auto t = random_network(v_count, 9000 + net, q, rates);
        const auto flow = solve_flow(t, a);
        if (flow.network_loss < 1e-3)
            continue;
        // Queues start full and the near-critical ones drain slowly, so warm
        // up well past the transient before counting.
        const auto sim =
            simulate(t, a, {2000000, 4000000, 77000 + static_cast<std::uint64_t>(net)});
        ++checked;
        const double diff = std::abs(sim.empirical_loss - flow.network_loss);
        const double tol = std::max(3.0 * sim.ci_halfwidth, 0.1 * flow.network_loss);
        if (diff <= tol)
            ++agreed;
        else
            worst = std::max(worst, diff / tol);
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "analytic vs simulation agreement on %d/%d networks with P_L >= 1e-3 "
                  "(of %d generated)%s",
                  agreed, checked, networks,
                  agreed == checked ? "" : (" worst excess x" + std::to_string(worst)).c_str());
    report(1, checked > 0 && agreed == checked, buf);
}

// ---- criteria 2 and 4: scheme ordering and almost-fair correctness over 100 random V=20 networks ----

struct Instance {
    double pl_uniform, pl_fair, pl_optimal;
    double f_residual_rel, mu_mean_rel_err, p_spread;
};

void criteria_2_4() {
    const int count = 100;
    const int v_count = 20;
    const double q = 1e-5;
    const double lambda = 0.4652 / v_count;
    std::mt19937_64 rng(515151);
    std::vector<Instance> inst;

    std::vector<double> rates(v_count, lambda);
    rates.back() = 0.0;
    for (int i = 0; i < count; ++i) {
        const auto t = random_network(v_count, 40000 + i, q, rates);
        // budgets log-uniform over the studied ranges
        const ResourceBudget b{std::exp(std::log(0.01) + uniform01(rng) * std::log(1000.0)),
                               std::exp(uniform01(rng) * std::log(10000.0))};
        const auto uni = uniform_allocation(v_count, b);
        const auto fair = almost_fair_allocation(t, b);
        OptimizerConfig opt;
        opt.seed = 600 + i;
        const auto best = optimal_allocation(t, b, opt);

        Instance x{};
        x.pl_uniform = solve_flow(t, uni).network_loss;
        const auto fair_flow = solve_flow(t, fair);
        x.pl_fair = fair_flow.network_loss;
        x.pl_optimal = solve_flow(t, best).network_loss;

        // almost-fair internals
        const double alpha = fair.mu[0] / fair_flow.theta[0];
        x.f_residual_rel =
            std::abs(f_alpha(alpha, t, b)) / (b.mu_avg * (v_count - 1));
        double mu_sum = 0.0;
        for (double m : fair.mu)
            mu_sum += m;
        x.mu_mean_rel_err = std::abs(mu_sum / (v_count - 1) - b.mu_avg) / b.mu_avg;
        double lo = 1.0, hi = 0.0;
        for (int v = 0; v < v_count - 1; ++v) {
            if (fair_flow.theta[v] <= 0.0)
                continue;
            lo = std::min(lo, fair_flow.node_loss[v]);
            hi = std::max(hi, fair_flow.node_loss[v]);
        }
        x.p_spread = hi - lo;
        inst.push_back(x);
    }

    // criterion 2
    int opt_le_fair = 0, fair_le_uniform = 0;
    for (const auto& x : inst) {
        if (x.pl_optimal <= x.pl_fair + 1e-12)
            ++opt_le_fair;
        if (x.pl_fair <= x.pl_uniform * (1.0 + 1e-12) + 1e-18)
            ++fair_le_uniform;
    }
    {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "scheme ordering: optimal<=fair in %d/%d, fair<=uniform in %d/%d "
                      "(need all, >=95%%)",
                      opt_le_fair, count, fair_le_uniform, count);
        report(2, opt_le_fair == count && fair_le_uniform * 100 >= 95 * count, buf);
    }

    // criterion 4
    bool ok4 = true;
    double worst_res = 0.0, worst_mu = 0.0, worst_spread = 0.0;
    for (const auto& x : inst) {
        worst_res = std::max(worst_res, x.f_residual_rel);
        worst_mu = std::max(worst_mu, x.mu_mean_rel_err);
        worst_spread = std::max(worst_spread, x.p_spread);
        if (x.f_residual_rel > 1e-10 || x.mu_mean_rel_err > 1e-8 || x.p_spread > 1e-6)
            ok4 = false;
    }
    {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "almost-fair correctness: worst |f(alpha)|/(mu(V-1))=%.2e "
                      "(<=1e-10), worst mean-mu error=%.2e (<=1e-8), worst p "
                      "spread=%.2e (<=1e-6)",
                      worst_res, worst_mu, worst_spread);
        report(4, ok4, buf);
    }
}

// ---- criterion 3: gap magnitudes in the studied operating regime ----
//
// The order-of-magnitude advantage of the optimal scheme shows where the
// harvest budget is comparable to the offered traffic. Budgets are therefore
// the micaz-solar typical values jittered +-50%, the same convention as the
// validation runs; the wide budget sweep stays with criterion 2.

void criterion_3() {
    const int count = 100;
    const int v_count = 20;
    const double q = 1e-5;
    std::mt19937_64 rng(626262);
    std::vector<double> rates(v_count, 0.4652 / v_count);
    rates.back() = 0.0;
    std::vector<double> gap_uo, gap_fo;
    for (int i = 0; i < count; ++i) {
        const auto t = random_network(v_count, 50000 + i, q, rates);
        const ResourceBudget b{0.2326 * (0.5 + uniform01(rng)),
                               2283.0 * (0.5 + uniform01(rng))};
        const auto uni = uniform_allocation(v_count, b);
        const auto fair = almost_fair_allocation(t, b);
        OptimizerConfig opt;
        opt.seed = 700 + i;
        const auto best = optimal_allocation(t, b, opt);
        const double plu = solve_flow(t, uni).network_loss;
        const double plf = solve_flow(t, fair).network_loss;
        const double plo = solve_flow(t, best).network_loss;
        const bool in_band = plu > 1e-12 && plu < 0.5 && plf > 1e-12 &&
                             plf < 0.5 && plo > 1e-12 && plo < 0.5;
        if (!in_band)
            continue;
        gap_uo.push_back(std::log10(plu) - std::log10(plo));
        gap_fo.push_back(std::log10(plf) - std::log10(plo));
    }
    if (gap_uo.empty()) {
        report(3, false, "no instances fell in the P_L band (1e-12, 0.5)");
        return;
    }
    const double m_uo = median(gap_uo);
    const double m_fo = median(gap_fo);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "gap magnitudes over %zu in-band instances: median "
                  "log10(uniform/optimal)=%.3f (need >=1.0), median "
                  "log10(fair/optimal)=%.3f (need <=0.5)",
                  gap_uo.size(), m_uo, m_fo);
    report(3, m_uo >= 1.0 && m_fo <= 0.5, buf);
}

// ---- criterion 5: queueing against the birth-death recursion ----

void criterion_5() {
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double alpha = k / 10.0;
        for (int n = 1; n <= 64; ++n) {
            double term = 1.0, sum = 1.0;
            for (int j = 1; j <= n; ++j) {
                term *= alpha;
                sum += term;
            }
            worst = std::max(worst, std::abs(blocking_probability(alpha, n) - 1.0 / sum));
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "queueing oracle: worst |p - birth-death| = %.2e (<=1e-12)", worst);
    report(5, worst <= 1e-12, buf);
}

// ---- criterion 6: equal-loss series vs dense inverse ----

void criterion_6() {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> rates(18, 0.03);
        rates.back() = 0.0;
        const auto t = random_network(18, 60000 + i, 1e-5, rates);
        for (double p : {0.0, 0.3, 0.9}) {
            const auto series = theta_equal_loss(t, p);
            const Eigen::VectorXd dense = testutil::dense_theta(
                t, Eigen::VectorXd::Constant(t.node_count, p));
            for (int v = 0; v < t.node_count; ++v) {
                const double denom = std::max(std::abs(dense(v)), 1e-300);
                worst = std::max(worst, std::abs(series[v] - dense(v)) / denom);
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "series identity: worst relative error vs dense inverse = %.2e "
                  "(<=1e-12)",
                  worst);
    report(6, worst <= 1e-12, buf);
}

// ---- criterion 7: two-node closed form, analytic and simulated ----

void criterion_7() {
    const auto t = testutil::make_chain({1.0, 0.0}, 0.0);
    HarvestingAllocation a;
    a.mu = {1.0};
    a.cap = {1.0};
    const auto flow = solve_flow(t, a);
    const auto sim = simulate(t, a, {1000000, -1, 7});
    const double diff = std::abs(sim.empirical_loss - 0.5);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "two-node closed form: analytic P_L=%.17g (need exactly 0.5), "
                  "|sim-0.5|=%.2e (<= 3ci=%.2e)",
                  flow.network_loss, diff, 3.0 * sim.ci_halfwidth);
    report(7, flow.network_loss == 0.5 && diff <= 3.0 * sim.ci_halfwidth, buf);
}

// ---- criterion 8: validation accepts generated, rejects cyclic ----

void criterion_8() {
    bool all_valid = true;
    for (int i = 0; i < 25; ++i) {
        std::vector<double> rates(12 + i, 0.02);
        rates.back() = 0.0;
        const auto t = random_network(12 + i, 80000 + i, 1e-5, rates);
        if (!validate_topology(t).empty())
            all_valid = false;
    }
    auto cyclic = testutil::make_chain({1.0, 1.0, 0.0}, 0.0);
    cyclic.set_route_fraction(2, 1, 0.0);
    cyclic.set_route_fraction(0, 1, 1.0);
    bool rejected = false;
    for (const auto& v : validate_topology(cyclic))
        if (v.code == "NotNilpotent")
            rejected = true;
    report(8, all_valid && rejected,
           "nilpotency: 25 generated topologies valid, hand-built cycle rejected");
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criteria_2_4();
    criterion_3();
    criterion_1();
    const auto secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    std::printf("%s (%d criteria failed, %.1f s)\n",
                failures == 0 ? "ALL CRITERIA PASSED" : "ACCEPTANCE FAILED",
                failures, secs);
    return failures;
}
