#include "ehwsn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ehwsn {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

long long SimOutcome::total_lost() const {
    return lost_channel +
           std::accumulate(lost_energy.begin(), lost_energy.end(), 0LL);
}

SimOutcome simulate(const NetworkTopology& t, const HarvestingAllocation& a,
                    const SimConfig& c) {
    const int v_count = t.node_count;
    const int sink = t.sink();
    const int sensors = t.sensor_count();
    if (c.min_generated_events < 1)
        throw DomainError("min_generated_events must be at least 1");
    if (a.mu.size() != static_cast<std::size_t>(sensors) ||
        a.cap.size() != static_cast<std::size_t>(sensors))
        throw DomainError("allocation vectors must have length V-1");
    {
        auto violations = validate_topology(t);
        if (!violations.empty())
            throw ValidationError(std::move(violations));
    }

    std::vector<long long> cap(sensors);
    for (int v = 0; v < sensors; ++v) {
        cap[v] = std::llround(a.cap[v]);
        if (cap[v] < 1)
            throw InvalidCapacityError("rounded capacity below 1 energy packet");
        if (!(a.mu[v] > 0.0))
            throw DomainError("harvest rates must be positive");
    }

    const long long warmup =
        c.warmup_events >= 0 ? c.warmup_events : c.min_generated_events / 10;

    // Report generation is the superposition of the per-sensor Poisson
    // streams; pick the source in proportion to lambda_v.
    std::vector<double> cum(sensors);
    double total_rate = 0.0;
    for (int v = 0; v < sensors; ++v) {
        total_rate += t.generation_rates[v];
        cum[v] = total_rate;
    }
    if (!(total_rate > 0.0))
        throw DomainError("no reports can be generated: all rates are zero");

    std::mt19937_64 rng(c.rng_seed);
    std::exponential_distribution<double> interarrival(total_rate);
    std::poisson_distribution<long long> poisson;
    using PoissonParam = std::poisson_distribution<long long>::param_type;

    // Energy queues start full. Between report epochs a queue only gains
    // packets, as a Poisson count capped at the capacity, so each queue is
    // advanced lazily when a report visits its node.
    std::vector<long long> queue(cap.begin(), cap.end());
    std::vector<double> last_update(sensors, 0.0);
    double now = 0.0;

    auto refill = [&](int v) {
        const double dt = now - last_update[v];
        last_update[v] = now;
        if (queue[v] == cap[v] || dt <= 0.0)
            return;
        const long long arrivals = poisson(rng, PoissonParam(a.mu[v] * dt));
        queue[v] = std::min(cap[v], queue[v] + arrivals);
    };

    SimOutcome out;
    out.lost_energy.assign(v_count, 0);

    // Loss events arrive in bursts (empty-queue excursions), so the CI comes
    // from batch means rather than a binomial count.
    constexpr int kBatches = 100;
    const long long batch_size = (c.min_generated_events + kBatches - 1) / kBatches;
    std::vector<long long> batch_delivered(kBatches, 0);
    std::vector<long long> batch_generated(kBatches, 0);

    long long raw_generated = 0;
    while (out.generated < c.min_generated_events) {
        now += interarrival(rng);
        const double u = uniform01(rng) * total_rate;
        const int source =
            static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());

        ++raw_generated;
        const bool counted = raw_generated > warmup;
        const int batch =
            counted ? static_cast<int>(out.generated / batch_size) : 0;
        if (counted) {
            ++out.generated;
            ++batch_generated[batch];
        }

        // Instantaneous forwarding: walk the report hop by hop.
        int at = source;
        for (;;) {
            if (at == sink) {
                if (counted) {
                    ++out.delivered;
                    ++batch_delivered[batch];
                }
                break;
            }
            refill(at);
            if (queue[at] == 0) {
                if (counted)
                    ++out.lost_energy[at];
                break;
            }
            --queue[at];
            if (uniform01(rng) < t.channel_loss) {
                if (counted)
                    ++out.lost_channel;
                break;
            }
            // Next hop by routing fractions (a single hop when deterministic).
            const double r = uniform01(rng);
            double acc = 0.0;
            int next = -1;
            for (int j = 0; j < v_count; ++j) {
                const double f = t.route_fraction(j, at);
                if (f > 0.0) {
                    acc += f;
                    next = j;
                    if (r < acc)
                        break;
                }
            }
            at = next;
        }
    }

    out.empirical_loss =
        1.0 - static_cast<double>(out.delivered) / static_cast<double>(out.generated);

    int used = 0;
    double mean = 0.0, m2 = 0.0;
    for (int bi = 0; bi < kBatches; ++bi) {
        if (batch_generated[bi] == 0)
            continue;
        const double x = 1.0 - static_cast<double>(batch_delivered[bi]) /
                                   static_cast<double>(batch_generated[bi]);
        ++used;
        const double d = x - mean;
        mean += d / used;
        m2 += d * (x - mean);
    }
    if (used > 1)
        out.ci_halfwidth =
            1.959963984540054 * std::sqrt(m2 / (used - 1) / used);
    else
        out.ci_halfwidth = 1.0;
    return out;
}

} // namespace ehwsn
