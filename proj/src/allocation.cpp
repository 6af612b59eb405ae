#include "ehwsn/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ehwsn/flow.hpp"
#include "ehwsn/queueing.hpp"

namespace ehwsn {

namespace {

// Per-node finite series sum_{n=0}^{V-1} ((1-q)*s)^n (R^n lambda)_v.
// Finite because the routing matrix is nilpotent.
std::vector<double> routed_series(const NetworkTopology& t, double s) {
    const int v_count = t.node_count;
    const double c = (1.0 - t.channel_loss) * s;
    std::vector<double> total = t.generation_rates;
    std::vector<double> term = t.generation_rates;
    std::vector<double> next(v_count);
    for (int n = 1; n < v_count; ++n) {
        for (int j = 0; j < v_count; ++j) {
            double acc = 0.0;
            for (int i = 0; i < v_count; ++i) {
                const double f = t.route_fraction(j, i);
                if (f > 0.0)
                    acc += f * term[i];
            }
            next[j] = c * acc;
        }
        term = next;
        for (int j = 0; j < v_count; ++j)
            total[j] += term[j];
    }
    return total;
}

double sensor_sum(const NetworkTopology& t, const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.begin() + t.sensor_count(), 0.0);
}

double objective(const NetworkTopology& t, const HarvestingAllocation& a) {
    return solve_flow(t, a).theta[t.sink()];
}

// Rescale to the exact target mean; entries stay positive.
void project_mu(std::vector<double>& mu, double target_mean, double mu_min) {
    for (double& m : mu)
        m = std::max(m, mu_min);
    const double mean = std::accumulate(mu.begin(), mu.end(), 0.0) / mu.size();
    const double scale = target_mean / mean;
    for (double& m : mu)
        m *= scale;
}

// Shift onto the exact target mean, water-filling the >= 1 bound.
void project_cap(std::vector<double>& cap, double target_mean) {
    const std::size_t k = cap.size();
    std::vector<bool> fixed(k, false);
    for (std::size_t pass = 0; pass <= k; ++pass) {
        double sum = std::accumulate(cap.begin(), cap.end(), 0.0);
        double delta = target_mean * static_cast<double>(k) - sum;
        const auto free_count =
            static_cast<double>(std::count(fixed.begin(), fixed.end(), false));
        if (std::abs(delta) < 1e-12 * std::max(1.0, target_mean) || free_count == 0.0)
            break;
        const double shift = delta / free_count;
        bool clipped = false;
        for (std::size_t i = 0; i < k; ++i) {
            if (fixed[i])
                continue;
            cap[i] += shift;
            if (cap[i] < 1.0) {
                cap[i] = 1.0;
                fixed[i] = true;
                clipped = true;
            }
        }
        if (!clipped)
            break;
    }
}

} // namespace

void ResourceBudget::check() const {
    if (!(mu_avg > 0.0) || !std::isfinite(mu_avg))
        throw DomainError("budget mu_avg must be positive and finite");
    if (!(cap_avg >= 1.0) || !std::isfinite(cap_avg))
        throw DomainError("budget cap_avg must be at least 1 and finite");
}

HarvestingAllocation uniform_allocation(int node_count, const ResourceBudget& b) {
    if (node_count < 2)
        throw DomainError("node_count must be at least 2");
    b.check();
    HarvestingAllocation a;
    a.mu.assign(node_count - 1, b.mu_avg);
    a.cap.assign(node_count - 1, b.cap_avg);
    return a;
}

double f_alpha(double alpha, const NetworkTopology& t, const ResourceBudget& b) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw DomainError("alpha must be finite and non-negative");
    b.check();
    const double survival = effective_throughput_factor(alpha, b.cap_avg);
    const double total = sensor_sum(t, routed_series(t, survival));
    return alpha * total - b.mu_avg * t.sensor_count();
}

HarvestingAllocation almost_fair_allocation(const NetworkTopology& t,
                                            const ResourceBudget& b) {
    b.check();
    if (!(t.total_generation_rate() > 0.0))
        throw NoTrafficError("all generation rates are zero");

    const double budget_total = b.mu_avg * t.sensor_count();

    // Upper bracket: with alpha >= 1 the survival factor is at least
    // N/(N+1), so f evaluated there is bounded below by a linear function
    // whose root this expression inverts.
    const double floor_survival = b.cap_avg / (b.cap_avg + 1.0);
    const double bound_sum = sensor_sum(t, routed_series(t, floor_survival));
    const double alpha_plus = std::max(1.0, budget_total / bound_sum);
    const double tol = 1e-10 * budget_total;
    const double f_plus = f_alpha(alpha_plus, t, b);
    if (f_plus < 0.0)
        throw BracketFailureError("f(alpha_plus) is negative; model assumptions violated");

    // On single-hop routes the bracket bound is tight and alpha_plus is
    // already the root.
    double root = alpha_plus;
    if (f_plus > tol) {
        double lo = 0.0, hi = alpha_plus;
        for (int iter = 0; iter < 200; ++iter) {
            root = 0.5 * (lo + hi);
            const double fm = f_alpha(root, t, b);
            if (std::abs(fm) <= tol || (hi - lo) <= 1e-14 * alpha_plus)
                break;
            (fm < 0.0 ? lo : hi) = root;
        }
    }

    const double survival = effective_throughput_factor(root, b.cap_avg);
    const auto theta = routed_series(t, survival);
    HarvestingAllocation a;
    a.mu.resize(t.sensor_count());
    a.cap.assign(t.sensor_count(), b.cap_avg);
    for (int v = 0; v < t.sensor_count(); ++v)
        a.mu[v] = root * theta[v];
    return a;
}

HarvestingAllocation optimal_allocation(const NetworkTopology& t,
                                        const ResourceBudget& b,
                                        const OptimizerConfig& opt) {
    b.check();
    HarvestingAllocation current = almost_fair_allocation(t, b);
    const int k = t.sensor_count();
    const double mu_min = opt.mu_min_fraction * b.mu_avg;

    double current_obj = objective(t, current);
    HarvestingAllocation best = current;
    double best_obj = current_obj;

    if (k < 2 || opt.iterations <= 0)
        return best; // single sensor: the constraints pin the allocation

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, k - 1);

    double temp = opt.initial_temp_fraction * std::max(current_obj, 1e-300);
    const int greedy_start =
        opt.iterations - static_cast<int>(opt.final_greedy_fraction * opt.iterations);

    for (int iter = 0; iter < opt.iterations; ++iter, temp *= opt.cooling) {
        HarvestingAllocation cand = current;
        if (unif(rng) < 0.5) {
            const int v = pick(rng);
            cand.mu[v] = std::exp(std::log(cand.mu[v]) + opt.mu_log_step * gauss(rng));
        } else {
            const int v = pick(rng);
            cand.cap[v] += opt.cap_step_fraction * b.cap_avg * gauss(rng);
        }
        project_mu(cand.mu, b.mu_avg, mu_min);
        project_cap(cand.cap, b.cap_avg);

        const double cand_obj = objective(t, cand);
        const double delta = cand_obj - current_obj;
        const bool greedy = iter >= greedy_start;
        bool accept = delta >= 0.0;
        if (!accept && !greedy && temp > 0.0)
            accept = unif(rng) < std::exp(delta / temp);
        if (accept) {
            current = std::move(cand);
            current_obj = cand_obj;
            if (current_obj > best_obj) {
                best = current;
                best_obj = current_obj;
            }
        }
    }
    return best;
}

} // namespace ehwsn
