#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ehwsn/errors.hpp"

namespace ehwsn {

/// One failed topology invariant; `nodes` holds the offending 1-based indices.
struct Violation {
    std::string code;
    std::vector<int> nodes;
    std::string detail;

    std::string to_string() const;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// A routed sensor network. Nodes are indexed 0..V-1 internally; the sink is
/// node V-1 (node V in 1-based external notation) and has no outgoing links.
struct NetworkTopology {
    int node_count = 0;
    std::optional<std::vector<std::array<double, 2>>> positions;
    /// Row-major V*V; routing[to*V + from] is the fraction of `from`'s
    /// outgoing traffic sent to `to`. Columns of sensors sum to 1.
    std::vector<double> routing;
    std::vector<double> generation_rates; // events/s, sink entry is 0
    double channel_loss = 0.0;            // per-transmission loss probability q

    int sink() const { return node_count - 1; }
    int sensor_count() const { return node_count - 1; }
    double route_fraction(int to, int from) const {
        return routing[static_cast<std::size_t>(to) * node_count + from];
    }
    void set_route_fraction(int to, int from, double f) {
        routing[static_cast<std::size_t>(to) * node_count + from] = f;
    }
    double total_generation_rate() const;
};

struct GenerationConfig {
    int node_count = 20;
    double disk_radius = 100.0;         // meters
    double connectivity_radius = 40.0;  // meters
    std::uint64_t rng_seed = 0;
    int max_retries = 1000;
};

/// Checks every structural invariant; returns an empty list iff the topology
/// is valid. Violations are reported, never thrown.
std::vector<Violation> validate_topology(const NetworkTopology& t);

/// Places sensors i.i.d. uniformly on a disk with the sink at the center,
/// connects nodes closer than the connectivity radius, and routes every
/// sensor to the sink along the shortest path under squared-distance link
/// costs. Pure function of (config, rates).
/// `rates` has length V with a zero sink entry.
/// Throws DisconnectedNetworkError after max_retries failed deployments.
NetworkTopology generate_network(const GenerationConfig& config,
                                 const std::vector<double>& rates);

/// Serializes to the versioned JSON schema (1-based node indices, sparse
/// routing list). load(save(t)) == t.
std::string save_topology(const NetworkTopology& t);

/// Parses and validates. Throws ParseError on malformed input and
/// ValidationError when the parsed topology breaks an invariant.
NetworkTopology load_topology(const std::string& json_text);

/// Topological order of the routing DAG (every node appears after all of its
/// upstream nodes). Throws CyclicRoutingError if the graph has a cycle.
std::vector<int> topological_order(const NetworkTopology& t);

} // namespace ehwsn
