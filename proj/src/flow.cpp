#include "ehwsn/flow.hpp"

#include <cmath>
#include <numeric>

#include "ehwsn/queueing.hpp"

namespace ehwsn {

FlowSolution solve_flow(const NetworkTopology& t, const HarvestingAllocation& a) {
    const int v_count = t.node_count;
    const int sink = t.sink();
    if (a.mu.size() != static_cast<std::size_t>(t.sensor_count()) ||
        a.cap.size() != static_cast<std::size_t>(t.sensor_count()))
        throw DomainError("allocation vectors must have length V-1");
    for (int v = 0; v < t.sensor_count(); ++v) {
        if (!(a.mu[v] > 0.0))
            throw DomainError("harvest rates must be positive");
        if (!(a.cap[v] >= 1.0))
            throw DomainError("storage capacities must be at least 1");
    }

    const auto order = topological_order(t);
    const double q = t.channel_loss;

    FlowSolution s;
    s.theta.assign(v_count, 0.0);
    s.node_loss.assign(v_count, 0.0);
    for (int v : order) {
        double incoming = 0.0;
        for (int i = 0; i < v_count; ++i) {
            const double f = t.route_fraction(v, i);
            if (f > 0.0)
                incoming += f * s.theta[i] * (1.0 - s.node_loss[i]);
        }
        s.theta[v] = t.generation_rates[v] + (1.0 - q) * incoming;
        if (v != sink && s.theta[v] > 0.0)
            s.node_loss[v] = blocking_probability(a.mu[v] / s.theta[v], a.cap[v]);
        // theta_v = 0: no traffic, nothing to lose, p_v stays 0.
    }
    s.network_loss = network_loss(t, s);
    return s;
}

double network_loss(const NetworkTopology& t, const FlowSolution& flow) {
    const double total = t.total_generation_rate();
    if (!(total > 0.0))
        throw DomainError("total generation rate must be positive");
    double pl = 1.0 - flow.theta[t.sink()] / total;
    if (pl < 0.0) pl = 0.0;
    if (pl > 1.0) pl = 1.0;
    return pl;
}

std::vector<double> theta_equal_loss(const NetworkTopology& t, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("node loss probability must lie in [0,1]");
    topological_order(t); // raises CyclicRoutingError when the series diverges

    const int v_count = t.node_count;
    const double c = (1.0 - t.channel_loss) * (1.0 - p);
    std::vector<double> theta = t.generation_rates;
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
            theta[j] += term[j];
    }
    return theta;
}

} // namespace ehwsn
