#include "spinwalk/walk.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace spinwalk {

TransitionModel TransitionModel::canonical(int N) {
    TransitionModel m;
    m.N = N;
    m.p.resize(static_cast<std::size_t>(N) + 1);
    for (int a = 0; a <= N; ++a)
        m.p[static_cast<std::size_t>(a)] = static_cast<double>(a) / N;
    m.validate();
    return m;
}

void TransitionModel::validate() const {
    if (N < 2) throw std::invalid_argument("transition model: lattice size must be at least 2");
    if (p.size() != static_cast<std::size_t>(N) + 1)
        throw std::invalid_argument("transition model: table must have N + 1 entries");
    if (p[0] != 0.0)
        throw std::invalid_argument("transition model: p(0) must be exactly 0");
    for (int a = 1; a < N; ++a) {
        double v = p[static_cast<std::size_t>(a)];
        if (!std::isfinite(v) || v <= 0.0 || v >= 1.0)
            throw std::invalid_argument("transition model: interior p(a) must lie in (0, 1), violated at a = " +
                                        std::to_string(a));
    }
    double pn = p[static_cast<std::size_t>(N)];
    if (!std::isfinite(pn) || pn <= 0.0 || pn > 1.0)
        throw std::invalid_argument("transition model: p(N) must lie in (0, 1]");
}

TransitionProbs transition_probs(int a, const TransitionModel& model) {
    if (a < 0 || a > model.N)
        throw std::invalid_argument("transition_probs: position out of range");
    double q = model.p[static_cast<std::size_t>(a)];
    double move = q * (1.0 - q);
    return {move, move, 1.0 - 2.0 * move};
}

LatticeState step_elementary(LatticeState state, const TransitionModel& model,
                             PhiloxStream& rng) {
    state.validate();
    if (state.N != model.N)
        throw std::invalid_argument("step_elementary: state and model lattice sizes differ");
    if (state.at_boundary()) return state;
    TransitionProbs t = transition_probs(state.a, model);
    double u = rng.next_double();
    if (u < t.up)
        ++state.a;
    else if (u < t.up + t.down)
        --state.a;
    return state;
}

namespace {

WalkRecord finish_absorbed(int a, std::uint64_t moves, std::uint64_t ticks,
                           std::uint64_t charged) {
    WalkRecord r;
    r.final_a = a;
    r.moves_taken = moves;
    r.ticks_taken = ticks;
    r.stop_reason = a == 0 ? StopReason::AbsorbedAtZero : StopReason::AbsorbedAtN;
    r.stopping_time = charged;
    return r;
}

WalkRecord run_moves(int a0, int N, std::uint64_t limit, bool capped, PhiloxStream& rng) {
    int a = a0;
    std::uint64_t moves = 0;
    while (true) {
        if (a == 0 || a == N) return finish_absorbed(a, moves, moves, moves);
        if (moves >= limit) {
            if (capped)
                throw BudgetCapExceeded("walk exceeded the safety cap of " + std::to_string(limit) +
                                        " moves without absorbing");
            WalkRecord r;
            r.final_a = a;
            r.moves_taken = moves;
            r.ticks_taken = moves;
            r.stop_reason = StopReason::BudgetExhausted;
            return r;
        }
        if (rng.bits_available() == 0 && limit - moves >= 64 && a > 64 && N - a > 64) {
            a += 2 * std::popcount(rng.next_u64()) - 64;
            moves += 64;
            continue;
        }
        a += rng.next_bit() ? 1 : -1;
        ++moves;
    }
}

WalkRecord run_ticks(int a0, const TransitionModel& model, std::uint64_t limit,
                     bool capped, PhiloxStream& rng) {
    int a = a0;
    int N = model.N;
    std::uint64_t ticks = 0;
    std::uint64_t moves = 0;
    while (true) {
        if (a == 0 || a == N) return finish_absorbed(a, moves, ticks, ticks);
        if (ticks >= limit) {
            if (capped)
                throw BudgetCapExceeded("walk exceeded the safety cap of " + std::to_string(limit) +
                                        " ticks without absorbing");
            WalkRecord r;
            r.final_a = a;
            r.moves_taken = moves;
            r.ticks_taken = ticks;
            r.stop_reason = StopReason::BudgetExhausted;
            return r;
        }
        double q = model.p[static_cast<std::size_t>(a)];
        double move = q * (1.0 - q);
        double u = rng.next_double();
        if (u < move) {
            ++a;
            ++moves;
        } else if (u < 2.0 * move) {
            --a;
            ++moves;
        }
        ++ticks;
    }
}

} // namespace

WalkRecord run_walk(int a0, int N, const TransitionModel& model, std::uint64_t budget,
                    WalkMode mode, PhiloxStream& rng, std::uint64_t unlimited_cap) {
    if (N != model.N)
        throw std::invalid_argument("run_walk: lattice size does not match the transition model");
    if (a0 < 0 || a0 > N)
        throw std::invalid_argument("run_walk: start position out of range");
    bool capped = budget == kUnlimitedBudget;
    std::uint64_t limit = capped ? unlimited_cap : budget;
    if (mode == WalkMode::CountMoves) return run_moves(a0, N, limit, capped, rng);
    return run_ticks(a0, model, limit, capped, rng);
}

} // namespace spinwalk
