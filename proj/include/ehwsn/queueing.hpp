#pragma once

namespace ehwsn {

/// Empty-state probability of an M|M|1|N energy queue with arrival/consumption
/// ratio alpha = mu/theta and real-valued capacity n >= 1:
///
///     p = (1 - alpha) / (1 - alpha^(n+1))
///
/// Continuous in alpha, with p = 1/(n+1) at the removable singularity
/// alpha = 1. Evaluated in a form that stays stable near alpha = 1 and
/// underflows cleanly to 0 for large alpha^n.
/// Throws DomainError for alpha < 0 or n < 1.
double blocking_probability(double alpha, double n);

/// (alpha - alpha^(n+1)) / (1 - alpha^(n+1)), the per-hop survival factor;
/// identically 1 - blocking_probability(alpha, n), with limit n/(n+1) at
/// alpha = 1 and value 0 at alpha = 0.
double effective_throughput_factor(double alpha, double n);

} // namespace ehwsn
