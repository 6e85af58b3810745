#pragma once

#include <cstdint>

namespace spinwalk {

/// Point estimate with a 95% confidence interval.
struct StatSummary {
    double estimate = 0;
    double lo = 0;
    double hi = 0;
    std::uint64_t n = 0;

    double half_width() const { return 0.5 * (hi - lo); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// 97.5% standard normal quantile used by the intervals below.
inline constexpr double kZ975 = 1.959963984540054;

/// Wilson score interval for a binomial proportion. Well behaved at 0 and n
/// successes, unlike the plain normal interval.
StatSummary wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Student-t interval for a mean given the unbiased sample variance. Exact
/// t quantiles through 30 degrees of freedom, asymptotic expansion beyond.
StatSummary mean_interval(double mean, double sample_variance, std::uint64_t n);

/// 97.5% quantile of the t distribution with df degrees of freedom.
double t_quantile_975(std::uint64_t df);

} // namespace spinwalk
