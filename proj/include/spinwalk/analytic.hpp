#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinwalk/quadrature.hpp"

namespace spinwalk {

/// Requested parameters fall outside the regime where a method is meaningful;
/// the message says what to use instead.
struct ValidityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Polar angle of a spin direction, in [0, pi]. theta = 0 points along the
/// detector axis (intensity 1), theta = pi against it (intensity 0).
class SpinAngle {
public:
    explicit SpinAngle(double radians);
    double radians() const { return theta_; }

    /// Angle whose detection intensity is A: theta = 2 acos(sqrt(A)).
    static SpinAngle from_intensity(double A);

private:
    double theta_;
};

/// Detection probability along the reference axis: cos^2(theta / 2).
double intensity_from_angle(SpinAngle theta);

/// Rotation of a detector away from the reference axis, in [0, pi].
class RotationAngle {
public:
    explicit RotationAngle(double radians);
    double radians() const { return phi_; }
    static RotationAngle from_degrees(double degrees);

private:
    double phi_;
};

/**
 * Detection intensity seen by a detector rotated by phi when the state has
 * intensity A on the reference axis:
 *
 *   B = A cos^2(phi/2) + (1 - A) sin^2(phi/2) + sin(phi) sqrt(A (1 - A)).
 *
 * This is cos^2 of half the angle between the spin direction and the rotated
 * detector axis, for spins confined to the upper semicircle. The result is
 * clamped to [0, 1] against rounding at the extremes.
 */
double rotate_intensity(double A, RotationAngle phi);

/// Upper preimage of the phi = pi/2 rotation map: the A in [1/2, 1] with
/// 1/2 + sqrt(A (1 - A)) = B. Requires B in [1/2, 1]: smaller B is never
/// produced by that rotation.
double inverse_rotate_halfpi(double B);

/// Spread of the intensity after n moves on a lattice of size N: sigma =
/// sqrt(n) / N. Meaningful as a Gaussian width while it stays inside (0, 1).
double walk_sigma(int N, std::uint64_t n_moves);

/// Normal density in the intensity variable.
double gaussian_pdf(double A, double A0, double sigma);

/**
 * An intensity distribution on the lattice {0..N}: point masses at interior
 * sites plus the two endpoint masses. Interior entries are strictly
 * increasing in a, each in (0, N); total mass must be 1 within 1e-12.
 * mass_at_one carries the absorbed spike a distribution of D1 exits calls s.
 */
struct IntensityDistribution {
    int N = 0;
    std::vector<std::pair<int, double>> interior; // (a, mass), 0 < a < N
    double mass_at_zero = 0;
    double mass_at_one = 0;

    double total() const;
    double variance_intensity() const;
    void validate() const;
};

/// Mean of A under the distribution: sum of (a / N) mass plus the endpoints.
double mean_intensity(const IntensityDistribution& dist);

/**
 * Law of the walk position after exactly n free moves from a0: mass
 * 2^{-n} C(n, (m+n)/2) at a = a0 + m for m of the same parity as n.
 *
 * Valid only while no boundary is reachable (a0 - n > 0 and a0 + n < N);
 * otherwise the free walk and the absorbed walk differ and the caller is
 * directed to Monte Carlo by a ValidityError.
 */
IntensityDistribution binomial_distribution(int a0, int N, std::uint64_t n_moves);

/**
 * Exact law of the absorbed walk's position after n fair moves from a0,
 * boundaries included: interior mass is still in flight, endpoint masses
 * hold everything absorbed on the way. Costs O(n N) (full probability-vector
 * evolution), so n * N is capped at 2^31.
 */
IntensityDistribution absorbed_walk_distribution(int a0, int N, std::uint64_t n_moves);

/**
 * Density of the rotated intensity B = 1/2 + sqrt(A (1 - A)) when A is
 * Gaussian with mean 1/2 and width sigma, normalised to integrate to 1 over
 * [1/2, 1]:
 *
 *   b(B) = kappa (2B - 1) / (2 sqrt(B (1 - B))) gaussian_pdf(A(B); 1/2, sigma)
 *
 * with (A - 1/2)^2 = B (1 - B). Defined on the open interval (1/2, 1); the
 * 1 / sqrt(1 - B) spike at the top is integrable. kappa() is the normalisation
 * of this single-branch form; both preimages of B carry equal Gaussian weight,
 * so kappa is 2 divided by the in-range Gaussian mass.
 */
class RotatedIntensityDensity {
public:
    explicit RotatedIntensityDensity(double sigma);
    /// Density at B. B outside (1/2, 1) is a domain error.
    double operator()(double B) const;
    double kappa() const { return kappa_; }
    double sigma() const { return sigma_; }

    /// Mean of B under the density, via a substitution that removes the
    /// endpoint spike. Agrees with mean_rotated_intensity at phi = pi/2,
    /// A0 = 1/2.
    double mean(QuadratureOptions opt = {}) const;

private:
    double sigma_;
    double kappa_;
};

/// One-shot form of the density above.
double b_density_halfpi(double B, double sigma);

/// Mean detected fraction, with bookkeeping on how much of the Gaussian
/// actually fit inside [0, 1].
struct RotatedMean {
    double value = 0;
    double in_range_mass = 1;
    /// Set when more than 1e-6 of the Gaussian falls outside [0, 1]; the
    /// Gaussian description of the walk is fraying at the edges.
    bool validity_warning = false;
};

/**
 * Mean intensity seen by a detector rotated by phi when the incoming
 * intensity is Gaussian around A0 with width sigma:
 *
 *   mu = (integral of g(A) B(A) over [0, 1]) / (integral of g(A) over [0, 1]).
 *
 * Conditioning on the in-range mass is what makes phi = 0 give back exactly
 * A0 for a centred Gaussian of any width, and what keeps this integral
 * consistent with the B-side density (which is normalised by construction).
 * sigma = 0 is the point mass: mu = B(A0).
 */
RotatedMean mean_rotated_intensity(double sigma, RotationAngle phi, double A0,
                                   QuadratureOptions opt = {});

} // namespace spinwalk
