#include "spinwalk/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "spinwalk/cqm.hpp"

namespace spinwalk {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xFF;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

} // namespace

int DeviceConfig::a0() const {
    return static_cast<int>(std::llround(A0 * N));
}

double DeviceConfig::quantized_A0() const {
    return static_cast<double>(a0()) / N;
}

double DeviceConfig::quantization_error() const {
    return std::abs(quantized_A0() - A0);
}

std::uint64_t DeviceConfig::effective_interactions() const {
    if (coupling.empty()) return interactions;
    for (const CouplingEntry& e : coupling)
        if (std::abs(e.absorbance - f) <= 1e-12) return e.interactions;
    throw std::invalid_argument("device config: no coupling entry matches absorbance " +
                                std::to_string(f));
}

void DeviceConfig::validate() const {
    if (N < 2) throw std::invalid_argument("device config: lattice size must be at least 2");
    if (!(A0 >= 0.0 && A0 <= 1.0))
        throw std::invalid_argument("device config: initial intensity must lie in [0, 1]");
    if (!(f >= 0.0 && f <= 1.0))
        throw std::invalid_argument("device config: absorbance must lie in [0, 1]");
    if (!(phi >= 0.0 && phi <= std::numbers::pi))
        throw std::invalid_argument("device config: detector rotation must lie in [0, pi] radians");
    if (unlimited_cap == 0)
        throw std::invalid_argument("device config: safety cap must be positive");
    for (std::size_t i = 0; i < coupling.size(); ++i) {
        const CouplingEntry& e = coupling[i];
        if (!(e.absorbance >= 0.0 && e.absorbance <= 1.0))
            throw std::invalid_argument("device config: coupling absorbance must lie in [0, 1]");
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(coupling[j].absorbance - e.absorbance) <= 1e-12)
                throw std::invalid_argument("device config: duplicate coupling absorbance");
    }
    effective_interactions(); // must resolve when a coupling map is present
}

std::uint64_t DeviceConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    h = fnv1a(h, static_cast<std::uint64_t>(N));
    h = fnv1a(h, bits(A0));
    h = fnv1a(h, bits(f));
    h = fnv1a(h, interactions);
    h = fnv1a(h, mode == WalkMode::CountMoves ? 1 : 0);
    h = fnv1a(h, bits(phi));
    h = fnv1a(h, unlimited_cap);
    for (const CouplingEntry& e : coupling) {
        h = fnv1a(h, bits(e.absorbance));
        h = fnv1a(h, e.interactions);
    }
    return h;
}

TargetOutcome simulate_target(const DeviceConfig& config, const TransitionModel& model,
                              PhiloxStream& rng) {
    TargetOutcome out;
    out.walk = run_walk(config.a0(), config.N, model, config.effective_interactions(),
                        config.mode, rng, config.unlimited_cap);
    if (out.walk.final_a == config.N) out.absorbed_by_d1 = rng.bernoulli(config.f);
    if (!out.absorbed_by_d1) {
        double A_exit = static_cast<double>(out.walk.final_a) / config.N;
        out.detected_by_d2 = rng.bernoulli(rotate_intensity(A_exit, RotationAngle(config.phi)));
    }
    return out;
}

TargetOutcome simulate_target(const DeviceConfig& config, PhiloxStream& rng) {
    config.validate();
    TransitionModel model = TransitionModel::canonical(config.N);
    return simulate_target(config, model, rng);
}

double EnsembleResult::exit_fraction_at(int a) const {
    if (a < 0 || a > N) throw std::invalid_argument("exit_fraction_at: position out of range");
    if (trajectories == 0) throw std::invalid_argument("exit_fraction_at: empty ensemble");
    return static_cast<double>(exit_counts[static_cast<std::size_t>(a)]) /
           static_cast<double>(trajectories);
}

double EnsembleResult::endpoint_mass_s() const { return exit_fraction_at(N); }
double EnsembleResult::endpoint_mass_zero() const { return exit_fraction_at(0); }

void EnsembleResult::validate() const {
    if (N < 2 || exit_counts.size() != static_cast<std::size_t>(N) + 1)
        throw std::invalid_argument("ensemble result: exit histogram has wrong size");
    std::uint64_t hist = 0;
    for (std::uint64_t c : exit_counts) hist += c;
    if (hist != trajectories)
        throw std::invalid_argument("ensemble result: exit histogram does not sum to trajectory count");
    if (absorbed_by_d1 + detected_by_d2 + transmitted_undetected != trajectories)
        throw std::invalid_argument("ensemble result: outcome counts do not sum to trajectory count");
    if (absorbed_by_d1 > exit_counts[static_cast<std::size_t>(N)])
        throw std::invalid_argument("ensemble result: more absorptions than top exits");
    if (detected_at_top > detected_by_d2)
        throw std::invalid_argument("ensemble result: detected_at_top exceeds detections");
}

IntensityDistribution to_distribution(const EnsembleResult& result) {
    if (result.trajectories == 0)
        throw std::invalid_argument("to_distribution: empty ensemble");
    double M = static_cast<double>(result.trajectories);
    IntensityDistribution d;
    d.N = result.N;
    d.mass_at_zero = static_cast<double>(result.exit_counts.front()) / M;
    d.mass_at_one = static_cast<double>(result.exit_counts.back()) / M;
    for (int a = 1; a < result.N; ++a) {
        std::uint64_t c = result.exit_counts[static_cast<std::size_t>(a)];
        if (c != 0) d.interior.emplace_back(a, static_cast<double>(c) / M);
    }
    return d;
}

EnsembleResult simulate_range(const DeviceConfig& config, const TransitionModel& model,
                              std::uint64_t seed, std::uint64_t cell,
                              std::uint64_t begin, std::uint64_t end) {
    config.validate();
    if (model.N != config.N)
        throw std::invalid_argument("simulate_range: model and config lattice sizes differ");
    if (begin > end) throw std::invalid_argument("simulate_range: bad trajectory range");

    // Detection probability by exit position, tabulated once per range.
    std::vector<double> detect(static_cast<std::size_t>(config.N) + 1);
    RotationAngle phi(config.phi);
    for (int a = 0; a <= config.N; ++a)
        detect[static_cast<std::size_t>(a)] =
            rotate_intensity(static_cast<double>(a) / config.N, phi);

    int a0 = config.a0();
    std::uint64_t budget = config.effective_interactions();

    EnsembleResult res;
    res.N = config.N;
    res.config_hash = config.hash();
    res.trajectories = end - begin;
    res.exit_counts.assign(static_cast<std::size_t>(config.N) + 1, 0);

    for (std::uint64_t t = begin; t < end; ++t) {
        PhiloxStream rng(seed, cell, t);
        WalkRecord walk =
            run_walk(a0, config.N, model, budget, config.mode, rng, config.unlimited_cap);
        ++res.exit_counts[static_cast<std::size_t>(walk.final_a)];
        res.total_moves += walk.moves_taken;
        res.total_ticks += walk.ticks_taken;
        if (walk.stop_reason == StopReason::BudgetExhausted) ++res.budget_exhausted;

        bool absorbed = false;
        if (walk.final_a == config.N) absorbed = rng.bernoulli(config.f);
        if (absorbed) {
            ++res.absorbed_by_d1;
            continue;
        }
        if (rng.bernoulli(detect[static_cast<std::size_t>(walk.final_a)])) {
            ++res.detected_by_d2;
            if (walk.final_a == config.N) ++res.detected_at_top;
        } else {
            ++res.transmitted_undetected;
        }
    }
    return res;
}

ComparisonReport compare_with_cqm(const EnsembleResult& result, const DeviceConfig& config) {
    result.validate();
    if (result.config_hash != config.hash())
        throw std::invalid_argument("compare_with_cqm: result was produced by a different config");

    double A0q = config.quantized_A0();
    RotationAngle phi(config.phi);
    std::uint64_t M = result.trajectories;

    ComparisonReport rep;
    rep.sp_d2_fraction = wilson_interval(result.detected_by_d2, M);
    rep.sp_d1_absorbed = wilson_interval(result.absorbed_by_d1, M);
    rep.endpoint_mass_s =
        wilson_interval(result.exit_counts[static_cast<std::size_t>(result.N)], M);
    rep.quantized_A0 = A0q;
    rep.quantization_error = config.quantization_error();

    rep.cqm_d2_fraction = cqm_d2_fraction(A0q, config.f, phi);
    rep.cqm_d1_absorbed = config.f * A0q;
    rep.divergence = {rep.sp_d2_fraction.estimate - rep.cqm_d2_fraction,
                      rep.sp_d2_fraction.lo - rep.cqm_d2_fraction,
                      rep.sp_d2_fraction.hi - rep.cqm_d2_fraction, M};

    double s_hat = rep.endpoint_mass_s.estimate;
    rep.effective_absorbance =
        A0q > 0.0 ? std::clamp(config.f * s_hat / A0q, 0.0, 1.0) : 0.0;
    rep.cqm_d2_at_effective = cqm_d2_fraction(A0q, rep.effective_absorbance, phi);
    rep.divergence_effective = {rep.sp_d2_fraction.estimate - rep.cqm_d2_at_effective,
                                rep.sp_d2_fraction.lo - rep.cqm_d2_at_effective,
                                rep.sp_d2_fraction.hi - rep.cqm_d2_at_effective, M};
    return rep;
}

std::pair<EnsembleResult, ComparisonReport> run_ensemble(const DeviceConfig& config,
                                                         std::uint64_t M, std::uint64_t seed) {
    if (M == 0) throw std::invalid_argument("run_ensemble: needs at least one trajectory");
    config.validate();
    TransitionModel model = TransitionModel::canonical(config.N);
    EnsembleResult res = simulate_range(config, model, seed, 0, 0, M);
    ComparisonReport rep = compare_with_cqm(res, config);
    return {std::move(res), std::move(rep)};
}

double sp_mean_prediction(const DeviceConfig& config, PredictionMethod method) {
    config.validate();
    RotationAngle phi(config.phi);
    int a0 = config.a0();
    double A0q = config.quantized_A0();
    std::uint64_t n = config.effective_interactions();

    // Budget too small for any walk to reach a boundary: the exit law is the
    // free binomial, in particular no mass ever reaches the top (s = 0).
    int headroom = std::min(a0, config.N - a0);
    bool no_absorption = n != kUnlimitedBudget && headroom > 0 && n < static_cast<std::uint64_t>(headroom);

    if (config.phi == 0.0) {
        // D2 aligned with D1: detections average the exit intensity itself,
        // and the mean exit intensity is pinned at A0 by optional stopping.
        // Only the f * s bite D1 takes out of the top mass moves the result.
        if (config.f == 0.0 || no_absorption) return A0q;
        if (n == kUnlimitedBudget) {
            // The f * s bite depends on the stopped exit law, which the
            // gaussian free-walk picture does not describe.
            if (method == PredictionMethod::Gaussian)
                throw ValidityError("gaussian prediction needs a finite interaction budget; "
                                    "use a Monte Carlo ensemble instead");
            return A0q - config.f * A0q; // s = A0
        }
        if (config.mode != WalkMode::CountMoves)
            throw ValidityError(
                "prediction with a tick-counted budget and boundary contact has no "
                "closed form; use a Monte Carlo ensemble instead");
        if (n > (std::uint64_t{1} << 31) / static_cast<std::uint64_t>(config.N))
            throw ValidityError(
                "exit law too large to tabulate exactly; use a Monte Carlo ensemble instead");
        double s = absorbed_walk_distribution(a0, config.N, n).mass_at_one;
        return A0q - config.f * s;
    }

    if (config.mode != WalkMode::CountMoves)
        throw ValidityError("rotated-detector prediction is derived for the move-counted "
                            "budget mode; use a Monte Carlo ensemble instead");

    if (method == PredictionMethod::Exact) {
        // Throws ValidityError itself when a boundary is within reach.
        IntensityDistribution d = binomial_distribution(a0, config.N, n);
        double F = 0.0;
        for (const auto& [a, m] : d.interior)
            F += m * rotate_intensity(static_cast<double>(a) / config.N, phi);
        return F;
    }

    if (n == kUnlimitedBudget)
        throw ValidityError("gaussian prediction needs a finite interaction budget; use a "
                            "Monte Carlo ensemble instead");
    RotatedMean m = mean_rotated_intensity(walk_sigma(config.N, n), phi, config.A0);
    if (1.0 - m.in_range_mass > 0.01)
        throw ValidityError("gaussian spread puts more than 1% of its mass outside the unit "
                            "interval; use a Monte Carlo ensemble instead");
    return m.value;
}

} // namespace spinwalk
