#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinwalk/analytic.hpp"
#include "spinwalk/stats.hpp"
#include "spinwalk/walk.hpp"

namespace spinwalk {

/// Pairs an absorbance with the interaction budget it buys. Devices whose
/// absorbing power comes from interaction count use this to tie f to n.
struct CouplingEntry {
    double absorbance = 0;
    std::uint64_t interactions = 0;
};

/**
 * One interrupted-measurement cell: a target of intensity A0 passes through
 * detector D1 (absorbance f, at most `interactions` budget units of walk),
 * then whatever leaves D1 meets detector D2 rotated by phi.
 *
 * The walk starts at the nearest lattice point to A0; quantization_error
 * reports the rounding. An `interactions` of kUnlimitedBudget runs every walk
 * to absorption under the safety cap.
 */
struct DeviceConfig {
    int N = 1000;
    double A0 = 0.5;
    double f = 1.0;
    std::uint64_t interactions = kUnlimitedBudget;
    WalkMode mode = WalkMode::CountMoves;
    double phi = 0.0; // radians, [0, pi]
    std::uint64_t unlimited_cap = kDefaultUnlimitedCap;
    std::vector<CouplingEntry> coupling; // optional map overriding `interactions` by f

    int a0() const;
    double quantized_A0() const;
    double quantization_error() const;

    /// Budget for the walk: the coupling entry matching f when a coupling map
    /// is present (exact match within 1e-12, else invalid_argument), the plain
    /// `interactions` field otherwise.
    std::uint64_t effective_interactions() const;

    void validate() const;

    /// Hash over every field that affects the physics; partial results refuse
    /// to merge across differing hashes.
    std::uint64_t hash() const;
};

/// Fate of a single target. detected_by_d2 stays unset when D1 absorbed the
/// target: it never reached D2.
struct TargetOutcome {
    WalkRecord walk; // the D1 stage
    bool absorbed_by_d1 = false;
    std::optional<bool> detected_by_d2;

    int d1_final_a() const { return walk.final_a; }
};

/// Simulates one target on a caller-supplied transition model (built once per
/// ensemble; constructing it per target would dominate the runtime).
TargetOutcome simulate_target(const DeviceConfig& config, const TransitionModel& model,
                              PhiloxStream& rng);

/// Convenience overload building the canonical model internally.
TargetOutcome simulate_target(const DeviceConfig& config, PhiloxStream& rng);

/**
 * Integer tallies over an ensemble of targets. All fields are exact counts,
 * so merging partial results is associative and commutative and the merged
 * totals cannot depend on how trajectories were partitioned over workers.
 */
struct EnsembleResult {
    int N = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t trajectories = 0;
    std::vector<std::uint64_t> exit_counts; // size N + 1, walk position when leaving D1
    std::uint64_t absorbed_by_d1 = 0;
    std::uint64_t detected_by_d2 = 0;
    std::uint64_t transmitted_undetected = 0;
    std::uint64_t detected_at_top = 0;  // detected and exited at a = N
    std::uint64_t budget_exhausted = 0; // walks stopped by the budget, not absorbed
    std::uint64_t total_moves = 0;
    std::uint64_t total_ticks = 0;

    double exit_fraction_at(int a) const;
    double endpoint_mass_s() const;    // fraction of walks that exited at N
    double endpoint_mass_zero() const; // fraction that exited at 0
    void validate() const;
};

/// Exit histogram as a normalized intensity distribution (nonzero interior
/// support plus both endpoint masses).
IntensityDistribution to_distribution(const EnsembleResult& result);

/// Simulates trajectories [begin, end) of the addressed ensemble. Trajectory
/// t always uses stream (seed, cell, t), so any partition of the index range
/// reproduces the same per-trajectory outcomes.
EnsembleResult simulate_range(const DeviceConfig& config, const TransitionModel& model,
                              std::uint64_t seed, std::uint64_t cell,
                              std::uint64_t begin, std::uint64_t end);

/**
 * Side-by-side read of an ensemble against the projective-measurement
 * account at the same (quantized) intensity.
 *
 * The headline divergence compares at the configured absorbance. The
 * effective block refits the absorbance so the projective account reproduces
 * the observed top-endpoint mass (f_eff = f * s / A0): with a finite budget
 * D1 only absorbs targets whose walk completed, so matching its observed
 * absorption is the fair like-for-like comparison of the D2 predictions.
 */
struct ComparisonReport {
    StatSummary sp_d2_fraction;
    StatSummary sp_d1_absorbed;
    StatSummary endpoint_mass_s;
    double quantized_A0 = 0;
    double quantization_error = 0;
    double cqm_d2_fraction = 0;
    double cqm_d1_absorbed = 0;
    StatSummary divergence; // sp_d2_fraction minus cqm_d2_fraction
    double effective_absorbance = 0;
    double cqm_d2_at_effective = 0;
    StatSummary divergence_effective;
};

ComparisonReport compare_with_cqm(const EnsembleResult& result, const DeviceConfig& config);

/// Simulates M targets sequentially (trajectories 0..M-1, cell 0) and compares.
std::pair<EnsembleResult, ComparisonReport> run_ensemble(const DeviceConfig& config,
                                                         std::uint64_t M, std::uint64_t seed);

/// How sp_mean_prediction evaluates the walk's exit distribution.
enum class PredictionMethod { Exact, Gaussian };

/**
 * Expected D2 detected fraction under the walk account, without simulation.
 *
 * At phi = 0 returns A0 - f*s with s computed analytically: 0 while no walk
 * can reach the top (budget below the lattice distance to either boundary),
 * A0 for an unlimited budget, and the top mass of the exactly evolved exit
 * law otherwise. The method flag only matters away from phi = 0:
 *
 *   Exact     averages rotate_intensity over the free-walk binomial law;
 *             requires the no-absorption regime.
 *   Gaussian  averages over the spread sigma = sqrt(n)/N around A0; requires
 *             that less than 1% of that spread falls outside (0, 1).
 *
 * Outside these regimes throws ValidityError pointing at run_ensemble, which
 * has no such restrictions.
 */
double sp_mean_prediction(const DeviceConfig& config, PredictionMethod method);

} // namespace spinwalk
