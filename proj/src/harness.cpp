#include "spinwalk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

namespace spinwalk {

EnsembleResult histogram_merge(const EnsembleResult& a, const EnsembleResult& b) {
    // A default-constructed result is the merge identity, so folds can start
    // from an empty accumulator.
    auto empty = [](const EnsembleResult& r) {
        return r.trajectories == 0 && r.N == 0 && r.exit_counts.empty();
    };
    if (empty(a)) return b;
    if (empty(b)) return a;
    if (a.N != b.N || a.exit_counts.size() != b.exit_counts.size())
        throw std::invalid_argument("histogram_merge: lattice sizes differ");
    if (a.config_hash != b.config_hash)
        throw std::invalid_argument("histogram_merge: partials come from different configs");
    EnsembleResult m = a;
    m.trajectories += b.trajectories;
    for (std::size_t i = 0; i < m.exit_counts.size(); ++i) m.exit_counts[i] += b.exit_counts[i];
    m.absorbed_by_d1 += b.absorbed_by_d1;
    m.detected_by_d2 += b.detected_by_d2;
    m.transmitted_undetected += b.transmitted_undetected;
    m.detected_at_top += b.detected_at_top;
    m.budget_exhausted += b.budget_exhausted;
    m.total_moves += b.total_moves;
    m.total_ticks += b.total_ticks;
    return m;
}

EnsembleResult run_ensemble_parallel(const DeviceConfig& config, std::uint64_t M,
                                     std::uint64_t seed, int threads, std::uint64_t cell) {
    if (M == 0) throw std::invalid_argument("run_ensemble_parallel: needs at least one trajectory");
    config.validate();
    TransitionModel model = TransitionModel::canonical(config.N);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    constexpr std::uint64_t kBlock = 1024;
    std::uint64_t blocks = (M + kBlock - 1) / kBlock;
    threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), blocks));

    if (threads == 1) return simulate_range(config, model, seed, cell, 0, M);

    std::atomic<std::uint64_t> next_block{0};
    std::atomic<bool> abort{false};
    std::vector<EnsembleResult> partials(static_cast<std::size_t>(threads));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));

    auto worker = [&](int w) {
        EnsembleResult acc;
        bool have = false;
        try {
            while (!abort.load(std::memory_order_relaxed)) {
                std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
                if (b >= blocks) break;
                std::uint64_t lo = b * kBlock;
                std::uint64_t hi = std::min(M, lo + kBlock);
                EnsembleResult part = simulate_range(config, model, seed, cell, lo, hi);
                acc = have ? histogram_merge(acc, part) : std::move(part);
                have = true;
            }
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
            abort.store(true, std::memory_order_relaxed);
        }
        partials[static_cast<std::size_t>(w)] = std::move(acc);
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (std::thread& t : pool) t.join();
    for (std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    EnsembleResult merged;
    bool have = false;
    for (EnsembleResult& p : partials) {
        if (p.trajectories == 0) continue;
        merged = have ? histogram_merge(merged, p) : std::move(p);
        have = true;
    }
    return merged;
}

void SweepSpec::validate() const {
    if (lattice_sizes.empty() || intensities.empty() || budgets.empty() ||
        absorbances.empty() || rotations.empty())
        throw std::invalid_argument("sweep spec: every parameter grid needs at least one entry");
    if (trajectories_per_cell == 0)
        throw std::invalid_argument("sweep spec: trajectories_per_cell must be positive");
    for (std::size_t i = 0; i < cell_count(); ++i) cell(i).validate();
}

std::size_t SweepSpec::cell_count() const {
    return lattice_sizes.size() * intensities.size() * budgets.size() * absorbances.size() *
           rotations.size();
}

DeviceConfig SweepSpec::cell(std::size_t index) const {
    if (index >= cell_count()) throw std::invalid_argument("sweep spec: cell index out of range");
    std::size_t i = index;
    std::size_t n_phi = rotations.size();
    std::size_t n_f = absorbances.size();
    std::size_t n_budget = budgets.size();
    std::size_t n_A0 = intensities.size();
    std::size_t phi_i = i % n_phi;
    i /= n_phi;
    std::size_t f_i = i % n_f;
    i /= n_f;
    std::size_t budget_i = i % n_budget;
    i /= n_budget;
    std::size_t A0_i = i % n_A0;
    i /= n_A0;

    DeviceConfig c;
    c.N = lattice_sizes[i];
    c.A0 = intensities[A0_i];
    c.interactions = budgets[budget_i];
    c.f = absorbances[f_i];
    c.phi = rotations[phi_i];
    c.mode = mode;
    c.unlimited_cap = unlimited_cap;
    c.coupling = coupling;
    return c;
}

std::vector<SweepCellResult> run_sweep(const SweepSpec& spec, int threads,
                                       const SweepProgress& progress) {
    spec.validate();
    std::vector<SweepCellResult> out;
    std::size_t cells = spec.cell_count();
    out.reserve(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        SweepCellResult cell_result;
        cell_result.index = i;
        cell_result.config = spec.cell(i);
        try {
            cell_result.ensemble = run_ensemble_parallel(
                cell_result.config, spec.trajectories_per_cell, spec.seed, threads, i);
            cell_result.report = compare_with_cqm(cell_result.ensemble, cell_result.config);
        } catch (const std::exception& e) {
            cell_result.failed = true;
            cell_result.error = e.what();
        }
        out.push_back(std::move(cell_result));
        if (progress) progress(i + 1, cells);
    }
    return out;
}

} // namespace spinwalk
