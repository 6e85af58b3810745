#include "spinwalk/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spinwalk {

namespace {

void require_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void require_half_turn(double radians, const char* what) {
    if (!(radians >= 0.0 && radians <= std::numbers::pi))
        throw std::invalid_argument(std::string(what) + " must lie in [0, pi] radians");
}

// Kahan-compensated accumulator: keeps mass totals exact to a few ulps even
// over millions of entries, which the 1e-12 normalization invariant needs.
struct CompensatedSum {
    double sum = 0, carry = 0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace

SpinAngle::SpinAngle(double radians) : theta_(radians) {
    require_half_turn(radians, "spin angle");
}

SpinAngle SpinAngle::from_intensity(double A) {
    require_unit(A, "intensity");
    return SpinAngle(2.0 * std::acos(std::sqrt(A)));
}

double intensity_from_angle(SpinAngle theta) {
    double c = std::cos(0.5 * theta.radians());
    return c * c;
}

RotationAngle::RotationAngle(double radians) : phi_(radians) {
    require_half_turn(radians, "rotation angle");
}

RotationAngle RotationAngle::from_degrees(double degrees) {
    return RotationAngle(degrees * std::numbers::pi / 180.0);
}

double rotate_intensity(double A, RotationAngle phi) {
    require_unit(A, "intensity");
    double half = 0.5 * phi.radians();
    double c = std::cos(half);
    double s = std::sin(half);
    double B = A * c * c + (1.0 - A) * s * s +
               std::sin(phi.radians()) * std::sqrt(A * (1.0 - A));
    return std::clamp(B, 0.0, 1.0);
}

double inverse_rotate_halfpi(double B) {
    if (!(B >= 0.5 && B <= 1.0))
        throw std::invalid_argument("inverse_rotate_halfpi: argument must lie in [1/2, 1]");
    return 0.5 + std::sqrt(B * (1.0 - B));
}

double walk_sigma(int N, std::uint64_t n_moves) {
    if (N < 2) throw std::invalid_argument("walk_sigma: lattice size must be at least 2");
    return std::sqrt(static_cast<double>(n_moves)) / N;
}

double gaussian_pdf(double A, double A0, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_pdf: sigma must be positive");
    double z = (A - A0) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double IntensityDistribution::total() const {
    CompensatedSum s;
    s.add(mass_at_zero);
    s.add(mass_at_one);
    for (const auto& [a, m] : interior) s.add(m);
    return s.sum;
}

double mean_intensity(const IntensityDistribution& dist) {
    double s = dist.mass_at_one;
    for (const auto& [a, m] : dist.interior) s += m * (static_cast<double>(a) / dist.N);
    return s;
}

double IntensityDistribution::variance_intensity() const {
    double mu = mean_intensity(*this);
    double s = mass_at_zero * mu * mu + mass_at_one * (1.0 - mu) * (1.0 - mu);
    for (const auto& [a, m] : interior) {
        double d = static_cast<double>(a) / N - mu;
        s += m * d * d;
    }
    return s;
}

void IntensityDistribution::validate() const {
    if (N < 2)
        throw std::invalid_argument("intensity distribution: lattice size must be at least 2");
    if (!(mass_at_zero >= 0.0) || !(mass_at_one >= 0.0))
        throw std::invalid_argument("intensity distribution: endpoint masses must be nonnegative");
    int prev = 0;
    for (const auto& [a, m] : interior) {
        if (a <= prev || a >= N)
            throw std::invalid_argument(
                "intensity distribution: interior sites must be strictly increasing in (0, N)");
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument(
                "intensity distribution: masses must be finite and nonnegative");
        prev = a;
    }
    if (std::abs(total() - 1.0) > 1e-12)
        throw std::invalid_argument("intensity distribution: total mass must be 1 within 1e-12");
}

IntensityDistribution binomial_distribution(int a0, int N, std::uint64_t n_moves) {
    if (N < 2)
        throw std::invalid_argument("binomial_distribution: lattice size must be at least 2");
    if (a0 < 0 || a0 > N)
        throw std::invalid_argument("binomial_distribution: start position out of range");
    std::uint64_t headroom =
        static_cast<std::uint64_t>(std::min(a0 > 0 ? a0 : 0, N - a0 > 0 ? N - a0 : 0));
    if (n_moves >= headroom)
        throw ValidityError(
            "binomial_distribution: a boundary is reachable within the move budget; the free-walk "
            "law no longer applies, use a Monte Carlo ensemble instead");
    if (n_moves > 10'000'000)
        throw std::invalid_argument("binomial_distribution: move count too large to tabulate");

    int n = static_cast<int>(n_moves);
    // C(n, k) / 2^n, built center-out so the tails may underflow to zero
    // without dragging the representable part down with them.
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    int kc = n / 2;
    w[static_cast<std::size_t>(kc)] = 1.0;
    for (int k = kc; k < n; ++k)
        w[static_cast<std::size_t>(k) + 1] = w[static_cast<std::size_t>(k)] *
                                             (static_cast<double>(n - k) / (k + 1));
    for (int k = kc; k > 0; --k)
        w[static_cast<std::size_t>(k) - 1] =
            w[static_cast<std::size_t>(k)] * (static_cast<double>(k) / (n - k + 1));
    CompensatedSum norm;
    for (double x : w) norm.add(x);

    IntensityDistribution d;
    d.N = N;
    d.interior.reserve(w.size());
    for (int k = 0; k <= n; ++k) {
        double mass = w[static_cast<std::size_t>(k)] / norm.sum;
        if (mass > 0.0) d.interior.emplace_back(a0 + 2 * k - n, mass);
    }
    return d;
}

IntensityDistribution absorbed_walk_distribution(int a0, int N, std::uint64_t n_moves) {
    if (N < 2)
        throw std::invalid_argument("absorbed_walk_distribution: lattice size must be at least 2");
    if (a0 < 0 || a0 > N)
        throw std::invalid_argument("absorbed_walk_distribution: start position out of range");
    if (n_moves > (std::uint64_t{1} << 31) / static_cast<std::uint64_t>(N))
        throw std::invalid_argument(
            "absorbed_walk_distribution: n * N too large for exact evolution");

    std::vector<double> cur(static_cast<std::size_t>(N) + 1, 0.0);
    std::vector<double> nxt(static_cast<std::size_t>(N) + 1, 0.0);
    cur[static_cast<std::size_t>(a0)] = 1.0;
    for (std::uint64_t step = 0; step < n_moves; ++step) {
        nxt[0] = cur[0] + 0.5 * cur[1];
        nxt[static_cast<std::size_t>(N)] =
            cur[static_cast<std::size_t>(N)] + 0.5 * cur[static_cast<std::size_t>(N) - 1];
        for (int a = 1; a < N; ++a) {
            double from_below = a - 1 == 0 ? 0.0 : 0.5 * cur[static_cast<std::size_t>(a) - 1];
            double from_above = a + 1 == N ? 0.0 : 0.5 * cur[static_cast<std::size_t>(a) + 1];
            nxt[static_cast<std::size_t>(a)] = from_below + from_above;
        }
        std::swap(cur, nxt);
    }
    IntensityDistribution d;
    d.N = N;
    d.mass_at_zero = cur[0];
    d.mass_at_one = cur[static_cast<std::size_t>(N)];
    for (int a = 1; a < N; ++a) {
        double m = cur[static_cast<std::size_t>(a)];
        if (m > 0.0) d.interior.emplace_back(a, m);
    }
    return d;
}

RotatedIntensityDensity::RotatedIntensityDensity(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("b_density_halfpi: sigma must be positive");
    auto g = [sigma](double A) { return gaussian_pdf(A, 0.5, sigma); };
    QuadratureOptions opt;
    double mass = integrate(g, 0.0, 0.5, opt).value + integrate(g, 0.5, 1.0, opt).value;
    kappa_ = 2.0 / mass;
}

double RotatedIntensityDensity::operator()(double B) const {
    if (!(B > 0.5 && B < 1.0))
        throw std::invalid_argument("b_density_halfpi: argument must lie in (1/2, 1)");
    double root = std::sqrt(B * (1.0 - B));
    double dA_dB = (2.0 * B - 1.0) / (2.0 * root);
    return kappa_ * gaussian_pdf(0.5 + root, 0.5, sigma_) * dA_dB;
}

double RotatedIntensityDensity::mean(QuadratureOptions opt) const {
    // Substituting B = 1 - t^2 turns the 1 / sqrt(1 - B) endpoint spike into a
    // bounded integrand: b(B) dB = kappa g(1/2 + t sqrt(B)) (2B - 1) / sqrt(B) dt.
    double kappa = kappa_;
    double sigma = sigma_;
    auto f = [kappa, sigma](double t) {
        double B = 1.0 - t * t;
        double rootB = std::sqrt(B);
        return B * kappa * gaussian_pdf(0.5 + t * rootB, 0.5, sigma) * (2.0 * B - 1.0) / rootB;
    };
    return integrate(f, 0.0, std::sqrt(0.5), opt).value;
}

double b_density_halfpi(double B, double sigma) {
    return RotatedIntensityDensity(sigma)(B);
}

RotatedMean mean_rotated_intensity(double sigma, RotationAngle phi, double A0,
                                   QuadratureOptions opt) {
    require_unit(A0, "central intensity");
    if (sigma < 0.0)
        throw std::invalid_argument("mean_rotated_intensity: sigma must be nonnegative");
    if (sigma == 0.0) return {rotate_intensity(A0, phi), 1.0, false};

    // Break the range where the Gaussian concentrates so narrow peaks are
    // never straddled (and missed) by a single wide rule application.
    double cuts[4] = {0.0, std::clamp(A0 - 10.0 * sigma, 0.0, 1.0),
                      std::clamp(A0 + 10.0 * sigma, 0.0, 1.0), 1.0};
    QuadratureOptions piece_opt = opt;
    piece_opt.abs_tol = opt.abs_tol / 4.0;

    double num = 0, den = 0;
    for (int i = 0; i < 3; ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        auto weighted = [sigma, phi, A0](double A) {
            return gaussian_pdf(A, A0, sigma) * rotate_intensity(A, phi);
        };
        auto weight = [sigma, A0](double A) { return gaussian_pdf(A, A0, sigma); };
        num += integrate(weighted, cuts[i], cuts[i + 1], piece_opt).value;
        den += integrate(weight, cuts[i], cuts[i + 1], piece_opt).value;
    }
    return {num / den, den, 1.0 - den > 1e-6};
}

} // namespace spinwalk
