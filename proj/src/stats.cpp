#include "spinwalk/stats.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace spinwalk {

StatSummary wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: needs at least one trial");
    if (successes > trials)
        throw std::invalid_argument("wilson_interval: successes exceed trials");
    double n = static_cast<double>(trials);
    double phat = static_cast<double>(successes) / n;
    double z2 = kZ975 * kZ975;
    double denom = 1.0 + z2 / n;
    double centre = (phat + z2 / (2.0 * n)) / denom;
    double half = kZ975 / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return {phat, centre - half, centre + half, trials};
}

double t_quantile_975(std::uint64_t df) {
    if (df == 0) throw std::invalid_argument("t_quantile_975: needs at least 1 degree of freedom");
    static constexpr std::array<double, 30> table = {
        12.706204736432095, 4.302652729911275,  3.182446305284263,  2.7764451051977987,
        2.5705818366147395, 2.446911848791681,  2.364624251592785,  2.306004135033371,
        2.2621571627409915, 2.228138851986273,  2.200985160082949,  2.1788128296634177,
        2.160368656461013,  2.1447866879169273, 2.131449545559323,  2.119905299221255,
        2.1098155778331806, 2.100922040241039,  2.093024054408263,  2.0859634472658364,
        2.0796138447276626, 2.0738730679040147, 2.0686576104190406, 2.0638985616280205,
        2.0595385527532946, 2.055529438642871,  2.0518305164802833, 2.048407141795244,
        2.0452296421327034, 2.042272456301238,
    };
    if (df <= 30) return table[static_cast<std::size_t>(df) - 1];
    // Cornish-Fisher expansion of the t quantile about the normal one.
    double z = kZ975;
    double d = static_cast<double>(df);
    double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z;
    return z + (z3 + z) / (4.0 * d) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * d * d) +
           (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * d * d * d);
}

StatSummary mean_interval(double mean, double sample_variance, std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("mean_interval: needs at least two observations");
    if (sample_variance < 0.0)
        throw std::invalid_argument("mean_interval: variance must be nonnegative");
    double half = t_quantile_975(n - 1) * std::sqrt(sample_variance / static_cast<double>(n));
    return {mean, mean - half, mean + half, n};
}

} // namespace spinwalk
