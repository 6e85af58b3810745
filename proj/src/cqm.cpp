#include "spinwalk/cqm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinwalk {

namespace {

void require_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

} // namespace

void CqmOutcomeProbs::validate() const {
    double sum = p_absorbed_up + p_spin_down + p_original;
    if (p_absorbed_up < 0 || p_spin_down < 0 || p_original < 0 || std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("cqm outcome probabilities must be nonnegative and sum to 1");
}

CqmOutcomeProbs cqm_outcome_probs(double A0, double f) {
    require_unit(A0, "intensity");
    require_unit(f, "absorbance");
    CqmOutcomeProbs p;
    p.p_absorbed_up = f * A0;
    p.p_spin_down = f * (1.0 - A0);
    p.p_original = 1.0 - f;
    return p;
}

double cqm_total_spinup(double A0, double f) {
    CqmOutcomeProbs p = cqm_outcome_probs(A0, f);
    // Absorbed flux plus the spin-up share of the untouched branch; the
    // spin-down branch carries none. Sums back to A0 for every f.
    return p.p_absorbed_up + p.p_original * A0;
}

double cqm_d2_fraction(double A0, double f, RotationAngle phi) {
    require_unit(A0, "intensity");
    require_unit(f, "absorbance");
    double c = std::cos(0.5 * phi.radians());
    double s = std::sin(0.5 * phi.radians());
    return (1.0 - f) * A0 * (c * c) + (1.0 - A0) * (s * s) +
           (1.0 - f) * std::sin(phi.radians()) * std::sqrt(A0 * (1.0 - A0));
}

CqmOutcome cqm_sample_outcome(double A0, double f, RotationAngle phi, PhiloxStream& rng) {
    CqmOutcomeProbs p = cqm_outcome_probs(A0, f);
    double u = rng.next_double();
    if (u < p.p_absorbed_up) return CqmOutcome::AbsorbedByD1;
    // Remaining mass splits at u = f: below it the collapsed spin-down state
    // reaches D2, above it the original state does.
    double intensity_at_d2 = u < f ? 0.0 : A0;
    return rng.bernoulli(rotate_intensity(intensity_at_d2, phi)) ? CqmOutcome::DetectedByD2
                                                                 : CqmOutcome::Transmitted;
}

std::vector<CqmSurfacePoint> cqm_surface(double f, int intensity_points, int rotation_points) {
    require_unit(f, "absorbance");
    if (intensity_points < 2 || rotation_points < 2)
        throw std::invalid_argument("cqm_surface: each grid needs at least 2 points");
    std::vector<CqmSurfacePoint> grid;
    grid.reserve(static_cast<std::size_t>(intensity_points) * rotation_points);
    for (int i = 0; i < intensity_points; ++i) {
        double A0 = static_cast<double>(i) / (intensity_points - 1);
        for (int j = 0; j < rotation_points; ++j) {
            double phi = std::numbers::pi * j / (rotation_points - 1);
            grid.push_back({A0, phi, cqm_d2_fraction(A0, f, RotationAngle(phi))});
        }
    }
    return grid;
}

} // namespace spinwalk
