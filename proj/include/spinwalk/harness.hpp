#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spinwalk/experiment.hpp"

namespace spinwalk {

/// Merges two partial tallies of the same addressed ensemble. Both sides must
/// carry the same config hash; the caller is responsible for having given
/// them disjoint trajectory ranges.
EnsembleResult histogram_merge(const EnsembleResult& a, const EnsembleResult& b);

/**
 * Simulates M trajectories of cell `cell` across `threads` workers.
 *
 * Workers claim fixed-size trajectory blocks from a shared counter and tally
 * into private integer partials, merged after the join. Trajectory t is
 * always driven by stream (seed, cell, t) and the partials are exact counts,
 * so the merged result is identical for every thread count, including 1.
 * threads <= 0 uses the hardware concurrency.
 */
EnsembleResult run_ensemble_parallel(const DeviceConfig& config, std::uint64_t M,
                                     std::uint64_t seed, int threads,
                                     std::uint64_t cell = 0);

/**
 * Cartesian parameter sweep. Cells are ordered row-major with lattice size
 * varying slowest, then intensity, absorbance, budget, and rotation fastest;
 * the linear cell index is part of every trajectory's stream address.
 */
struct SweepSpec {
    std::vector<int> lattice_sizes;
    std::vector<double> intensities;
    std::vector<std::uint64_t> budgets;
    std::vector<double> absorbances;
    std::vector<double> rotations; // radians
    std::uint64_t trajectories_per_cell = 0;
    std::uint64_t seed = 0;
    WalkMode mode = WalkMode::CountMoves;
    std::uint64_t unlimited_cap = kDefaultUnlimitedCap;
    std::vector<CouplingEntry> coupling;

    void validate() const;
    std::size_t cell_count() const;
    DeviceConfig cell(std::size_t index) const;
};

struct SweepCellResult {
    std::size_t index = 0;
    DeviceConfig config;
    EnsembleResult ensemble;
    ComparisonReport report;
    bool failed = false;
    std::string error;
};

/// Called after each finished cell with (cells done, cells total).
using SweepProgress = std::function<void(std::size_t, std::size_t)>;

/// Runs every cell, parallelising within each cell. A cell that throws is
/// recorded as failed with its message and the sweep moves on.
std::vector<SweepCellResult> run_sweep(const SweepSpec& spec, int threads = 1,
                                       const SweepProgress& progress = {});

} // namespace spinwalk
