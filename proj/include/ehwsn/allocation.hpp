#pragma once

#include <cstdint>
#include <vector>

#include "ehwsn/topology.hpp"

namespace ehwsn {

/// Per-node budget averages: mean(mu_v) must equal mu_avg and mean(N_v) must
/// equal cap_avg for every allocation scheme.
struct ResourceBudget {
    double mu_avg = 0.0;  // energy packets/s per node
    double cap_avg = 1.0; // energy packets per node

    void check() const; // throws DomainError unless mu_avg > 0 and cap_avg >= 1
};

/// Harvest rate and storage capacity per sensor (length V-1, sensor order).
/// Capacities are real-valued; the simulator rounds them to integers.
struct HarvestingAllocation {
    std::vector<double> mu;
    std::vector<double> cap;
};

struct OptimizerConfig {
    std::uint64_t seed = 0;
    int iterations = 20000;
    double cooling = 0.999;
    double initial_temp_fraction = 0.1; // T0 as a fraction of the seed objective
    double mu_log_step = 0.25;          // gaussian sigma for moves in log(mu)
    double cap_step_fraction = 0.10;    // gaussian sigma for capacity moves, relative to cap_avg
    double mu_min_fraction = 1e-6;      // lower bound on mu_v relative to mu_avg
    double final_greedy_fraction = 0.1; // tail fraction accepting improvements only
};

/// Every sensor gets exactly the budget averages.
HarvestingAllocation uniform_allocation(int node_count, const ResourceBudget& b);

/// Budget-residual function whose unique positive root alpha gives the
/// common ratio mu_v/theta_v of the almost-fair allocation:
///
///   f(alpha) = alpha * sum_n (1-q)^n * s(alpha)^n * sum_sensors (R^n lambda)_v
///              - mu_avg * (V-1)
///
/// where s(alpha) = (alpha - alpha^(N+1)) / (1 - alpha^(N+1)). Monotonically
/// increasing with f(0) = -mu_avg*(V-1).
double f_alpha(double alpha, const NetworkTopology& t, const ResourceBudget& b);

/// Equalizes node loss probability across sensors: N_v = cap_avg, and
/// mu_v = alpha * theta_v with the common ratio alpha found by bisection on
/// f_alpha over [0, alpha_plus]. Throws NoTrafficError when all rates are
/// zero and BracketFailureError if the analytic bracket fails.
HarvestingAllocation almost_fair_allocation(const NetworkTopology& t,
                                            const ResourceBudget& b);

/// Simulated annealing on (log mu_v, N_v) seeded at the almost-fair solution,
/// maximizing the analytic sink arrival rate. Moves are projected back onto
/// the two budget-mean constraints, so the result is always feasible and its
/// objective never falls below the seed's. Deterministic for a fixed seed.
HarvestingAllocation optimal_allocation(const NetworkTopology& t,
                                        const ResourceBudget& b,
                                        const OptimizerConfig& opt = {});

} // namespace ehwsn
