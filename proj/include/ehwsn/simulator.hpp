#pragma once

#include <cstdint>
#include <vector>

#include "ehwsn/allocation.hpp"
#include "ehwsn/topology.hpp"

namespace ehwsn {

struct SimConfig {
    long long min_generated_events = 1000000; // counted reports before stopping
    long long warmup_events = -1;             // discarded reports; -1 means 10% of min
    std::uint64_t rng_seed = 0;
};

struct SimOutcome {
    long long generated = 0;
    long long delivered = 0;
    std::vector<long long> lost_energy; // per node, sink entry always 0
    long long lost_channel = 0;
    double empirical_loss = 0.0; // 1 - delivered/generated
    double ci_halfwidth = 0.0;   // 95% normal-approximation half-width

    long long total_lost() const;
};

/// Monte Carlo counterpart of the analytic loss model. Reports arrive as a
/// Poisson process of rate lambda_v per sensor and energy packets as an
/// independent Poisson process of rate mu_v; a queue holds at most N_v
/// packets (rounded capacity) and starts full. A report visiting a sensor
/// with an empty queue is dropped there; otherwise it consumes one packet,
/// survives the channel with probability 1-q, and hops on according to the
/// routing fractions until it reaches the sink. Forwarding is instantaneous.
/// Deterministic for a fixed seed.
/// Throws InvalidCapacityError if any rounded capacity is below 1.
SimOutcome simulate(const NetworkTopology& t, const HarvestingAllocation& a,
                    const SimConfig& c);

} // namespace ehwsn
