#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spinwalk/philox.hpp"

namespace spinwalk {

/// Position on the intensity lattice {0, 1, ..., N}. Intensity is a/N and the
/// lattice spacing is 1/N. Both endpoints are absorbing.
struct LatticeState {
    int a = 0;
    int N = 1;

    double intensity() const { return static_cast<double>(a) / N; }
    bool at_boundary() const { return a == 0 || a == N; }

    void validate() const {
        if (N < 2) throw std::invalid_argument("lattice size must be at least 2");
        if (a < 0 || a > N) throw std::invalid_argument("lattice position out of range");
    }
};

/**
 * Per-tick transition law of the lazy walk, tabulated over the lattice.
 *
 * At position a the walk takes one elementary step: it moves up with
 * probability p(a)(1-p(a)), down with the same probability, and stays put
 * otherwise. The canonical choice p(a) = a/N makes the detection and the
 * non-detection branch push the intensity by one lattice unit in opposite
 * directions with those frequencies.
 *
 * Requirements: p(0) = 0 (the bottom endpoint is inert), 0 < p(a) < 1 on the
 * interior, 0 < p(N) <= 1. Factories validate once so the per-tick path does
 * not have to.
 */
struct TransitionModel {
    int N = 0;
    std::vector<double> p; // index a, size N + 1

    static TransitionModel canonical(int N);

    template <class F>
    static TransitionModel tabulate(int N, F&& f) {
        TransitionModel m;
        m.N = N;
        m.p.resize(static_cast<std::size_t>(N) + 1);
        for (int a = 0; a <= N; ++a) m.p[static_cast<std::size_t>(a)] = f(a);
        m.validate();
        return m;
    }

    void validate() const;
};

/// One tick's move probabilities at a fixed position. up == down always; a
/// move, when it happens, is a fair coin no matter what p(a) is.
struct TransitionProbs {
    double up = 0;
    double down = 0;
    double stay = 1;
};

TransitionProbs transition_probs(int a, const TransitionModel& model);

/// One elementary tick. Boundary states are absorbing: the step returns them
/// unchanged and consumes no randomness.
LatticeState step_elementary(LatticeState state, const TransitionModel& model,
                             PhiloxStream& rng);

/// What the interaction budget counts. CountMoves charges only ticks on which
/// the walk actually moved; CountTicks charges every tick including stays.
enum class WalkMode { CountTicks, CountMoves };

enum class StopReason { AbsorbedAtZero, AbsorbedAtN, BudgetExhausted };

struct WalkRecord {
    int final_a = 0;
    std::uint64_t moves_taken = 0;
    std::uint64_t ticks_taken = 0;
    StopReason stop_reason = StopReason::BudgetExhausted;
    /// Budget units consumed at the moment of absorption; empty if not absorbed.
    std::optional<std::uint64_t> stopping_time;
};

/// Budget sentinel: run until absorption, guarded by the safety cap.
inline constexpr std::uint64_t kUnlimitedBudget = ~std::uint64_t{0};

/// Default safety cap on budget units for unlimited runs.
inline constexpr std::uint64_t kDefaultUnlimitedCap = 1'000'000'000;

/// Thrown when an unlimited-budget walk hits the safety cap without absorbing.
struct BudgetCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Runs one walk from a0 until absorption or budget exhaustion.
 *
 * In CountMoves mode the stay ticks are integrated out: conditioned on moving,
 * a tick is an up/down fair coin, so the walk consumes one fair bit per move
 * and the model's p enters only through which ticks count, which this mode
 * does not observe. ticks_taken is reported equal to moves_taken. When both
 * boundaries are more than 64 lattice units away the walk consumes a whole
 * 64-bit word at once and advances by (2 * popcount - 64); this is exactly the
 * bit-by-bit law, absorption being unreachable inside such a word.
 *
 * In CountTicks mode every tick draws against the model's transition
 * probabilities and charges the budget whether or not the walk moved.
 *
 * The model must have been validated (factories do this). N is taken
 * explicitly and must match model.N; a0 must lie in [0, N]; boundary starts
 * absorb immediately at time zero.
 */
WalkRecord run_walk(int a0, int N, const TransitionModel& model, std::uint64_t budget,
                    WalkMode mode, PhiloxStream& rng,
                    std::uint64_t unlimited_cap = kDefaultUnlimitedCap);

} // namespace spinwalk
