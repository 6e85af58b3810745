#pragma once

#include <vector>

#include "spinwalk/analytic.hpp"
#include "spinwalk/philox.hpp"

namespace spinwalk {

/**
 * Projective-measurement account of one pass through a partially absorbing
 * detector D1: with probability f the measurement completes, absorbing the
 * spin-up outcome and collapsing the rest to spin-down; with probability
 * 1 - f the state passes through in its original superposition.
 */
struct CqmOutcomeProbs {
    double p_absorbed_up = 0; // f * A0
    double p_spin_down = 0;   // f * (1 - A0), transmitted as the down state
    double p_original = 0;    // 1 - f, transmitted unchanged

    void validate() const;
};

CqmOutcomeProbs cqm_outcome_probs(double A0, double f);

/// Total spin-up fraction downstream of D1 (absorbed plus transmitted
/// contributions). Identically A0 for every f: a partial measurement does
/// not shift the aggregate statistics it is sampling.
double cqm_total_spinup(double A0, double f);

/// Fraction a second detector rotated by phi detects downstream of D1:
///   F = (1-f) A0 cos^2(phi/2) + (1-A0) sin^2(phi/2)
///     + (1-f) sin(phi) sqrt(A0 (1-A0)).
/// Reduces to rotate_intensity(A0, phi) at f = 0 and to (1-f) A0 at phi = 0.
double cqm_d2_fraction(double A0, double f, RotationAngle phi);

enum class CqmOutcome { AbsorbedByD1, DetectedByD2, Transmitted };

/// Samples one particle through D1 then D2 under the projective account.
CqmOutcome cqm_sample_outcome(double A0, double f, RotationAngle phi, PhiloxStream& rng);

struct CqmSurfacePoint {
    double A0 = 0;
    double phi = 0;
    double d2_fraction = 0;
};

/// Tabulates cqm_d2_fraction on an inclusive grid over A0 in [0, 1] and phi
/// in [0, pi], row-major with A0 varying slowest.
std::vector<CqmSurfacePoint> cqm_surface(double f, int intensity_points, int rotation_points);

} // namespace spinwalk
