#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinwalk/cqm.hpp"
#include "spinwalk/philox.hpp"

using namespace spinwalk;

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

TEST_CASE("outcome probabilities of the three-branch account") {
    CqmOutcomeProbs p = cqm_outcome_probs(0.6, 0.3);
    CHECK(p.p_absorbed_up == doctest::Approx(0.18).epsilon(1e-15));
    CHECK(p.p_spin_down == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(p.p_original == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS((void)cqm_outcome_probs(1.2, 0.3), std::invalid_argument);
    CHECK_THROWS_AS((void)cqm_outcome_probs(0.5, -0.1), std::invalid_argument);

    CqmOutcomeProbs bad{0.5, 0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("aggregate spin-up fraction is invariant under partial absorption") {
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            double A0 = i / 20.0;
            double f = j / 20.0;
            CHECK(std::abs(cqm_total_spinup(A0, f) - A0) <= 1e-12);
        }
}

TEST_CASE("detected fraction closed form, frozen values") {
    CHECK(cqm_d2_fraction(0.5, 1.0, RotationAngle(kPi / 2)) ==
          doctest::Approx(0.25).epsilon(1e-13));
    CHECK(cqm_d2_fraction(0.5, 0.3, RotationAngle(kPi / 2)) ==
          doctest::Approx(0.775).epsilon(1e-13));
    CHECK(cqm_d2_fraction(0.5, 0.0, RotationAngle(kPi / 2)) ==
          doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("detected fraction reduces correctly on both axes") {
    for (int i = 0; i <= 20; ++i) {
        double A0 = i / 20.0;
        for (int j = 0; j <= 20; ++j) {
            double phi = kPi * j / 20.0;
            CHECK(std::abs(cqm_d2_fraction(A0, 0.0, RotationAngle(phi)) -
                           rotate_intensity(A0, RotationAngle(phi))) <= 1e-12);
        }
        for (int j = 0; j <= 20; ++j) {
            double f = j / 20.0;
            CHECK(std::abs(cqm_d2_fraction(A0, f, RotationAngle(0.0)) - (1.0 - f) * A0) <=
                  1e-12);
        }
    }
}

TEST_CASE("detected fraction equals the branch-wise composition") {
    // F must be what the three outcomes imply: the original branch reaches D2
    // with intensity A0, the collapsed branch with intensity 0.
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j)
            for (int k = 0; k <= 10; ++k) {
                double A0 = i / 10.0;
                double f = j / 10.0;
                RotationAngle phi(kPi * k / 10.0);
                CqmOutcomeProbs p = cqm_outcome_probs(A0, f);
                double composed = p.p_original * rotate_intensity(A0, phi) +
                                  p.p_spin_down * rotate_intensity(0.0, phi);
                CHECK(std::abs(cqm_d2_fraction(A0, f, phi) - composed) <= 1e-12);
            }
}

TEST_CASE("sampled outcomes follow the closed form") {
    const double A0 = 0.6, f = 0.3;
    RotationAngle phi(kPi / 3);
    const std::uint64_t M = 200000;
    std::uint64_t absorbed = 0, detected = 0;
    for (std::uint64_t t = 0; t < M; ++t) {
        PhiloxStream rng(314, 0, t);
        CqmOutcome o = cqm_sample_outcome(A0, f, phi, rng);
        if (o == CqmOutcome::AbsorbedByD1) ++absorbed;
        if (o == CqmOutcome::DetectedByD2) ++detected;
    }
    double Mf = static_cast<double>(M);
    double pa = f * A0;
    double pd = cqm_d2_fraction(A0, f, phi);
    CHECK(std::abs(absorbed / Mf - pa) < 4.0 * std::sqrt(pa * (1 - pa) / Mf));
    CHECK(std::abs(detected / Mf - pd) < 4.0 * std::sqrt(pd * (1 - pd) / Mf));
}

TEST_CASE("surface grid layout") {
    std::vector<CqmSurfacePoint> grid = cqm_surface(0.3, 21, 41);
    REQUIRE(grid.size() == 21u * 41u);
    // Row-major, intensity slowest: the first row scans rotation at A0 = 0.
    for (int j = 0; j < 41; ++j) {
        CHECK(grid[static_cast<std::size_t>(j)].A0 == 0.0);
        CHECK(grid[static_cast<std::size_t>(j)].phi ==
              doctest::Approx(kPi * j / 40.0).epsilon(1e-15));
    }
    CHECK(grid[41].A0 == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(grid.back().A0 == 1.0);
    CHECK(grid.back().phi == doctest::Approx(kPi).epsilon(1e-15));
    for (const CqmSurfacePoint& p : grid)
        CHECK(p.d2_fraction ==
              doctest::Approx(cqm_d2_fraction(p.A0, 0.3, RotationAngle(p.phi))).epsilon(1e-15));
    CHECK_THROWS_AS((void)cqm_surface(1.2, 21, 41), std::invalid_argument);
    CHECK_THROWS_AS((void)cqm_surface(0.3, 1, 41), std::invalid_argument);
}
