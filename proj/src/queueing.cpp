#include "ehwsn/queueing.hpp"

#include <cmath>

#include "ehwsn/errors.hpp"

namespace ehwsn {

namespace {

void check_args(double alpha, double n) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw DomainError("queue ratio alpha must be finite and non-negative");
    if (!std::isfinite(n) || n < 1.0)
        throw DomainError("capacity must be finite and at least 1");
}

} // namespace

double blocking_probability(double alpha, double n) {
    check_args(alpha, n);
    if (alpha == 0.0)
        return 1.0;
    const double eps = alpha - 1.0;
    if (eps == 0.0)
        return 1.0 / (n + 1.0);
    // p = (1-a)/(1-a^(n+1)) = eps / (a^(n+1)-1), with a^(n+1)-1 computed as
    // expm1((n+1)*log(a)) so the removable singularity at a=1 stays stable
    // and large exponents saturate to +inf (p underflows to 0) instead of
    // producing inf/inf.
    const double denom = std::expm1((n + 1.0) * std::log1p(eps));
    double p = eps / denom;
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

double effective_throughput_factor(double alpha, double n) {
    check_args(alpha, n);
    // (a - a^(n+1)) / (1 - a^(n+1)) == 1 - p identically, including the
    // alpha=0 and alpha=1 limits.
    return 1.0 - blocking_probability(alpha, n);
}

} // namespace ehwsn
