#pragma once

#include <vector>

#include "ehwsn/allocation.hpp"
#include "ehwsn/topology.hpp"

namespace ehwsn {

struct FlowSolution {
    std::vector<double> theta;     // total arrival rate per node, events/s
    std::vector<double> node_loss; // energy-shortage loss probability, sink entry 0
    double network_loss = 0.0;     // P_L, fraction of reports never delivered
};

/// Exact solution of the coupled flow-balance / blocking system:
///
///   theta_v = lambda_v + (1-q) * sum_i r_{vi} * theta_i * (1-p_i)
///   p_v     = blocking_probability(mu_v / theta_v, N_v)
///
/// computed in one topological sweep of the routing DAG. A sensor with
/// theta_v = 0 carries no traffic and gets p_v = 0.
/// Throws CyclicRoutingError for cyclic routing, DomainError for an
/// allocation with mu_v <= 0 or N_v < 1.
FlowSolution solve_flow(const NetworkTopology& t, const HarvestingAllocation& a);

/// P_L = 1 - theta_V / sum(lambda). Throws DomainError when the total
/// generation rate is zero.
double network_loss(const NetworkTopology& t, const FlowSolution& flow);

/// Arrival rates under a common node loss probability p:
///
///   theta = sum_{n=0}^{V-1} (1-q)^n (1-p)^n R^n lambda
///
/// The series is finite because R is nilpotent.
std::vector<double> theta_equal_loss(const NetworkTopology& t, double p);

} // namespace ehwsn
