#include <doctest.h>

#include <numbers>
#include <vector>

#include "spinwalk/harness.hpp"

using namespace spinwalk;

namespace {
constexpr double kPi = std::numbers::pi;

DeviceConfig mid_config() {
    DeviceConfig c;
    c.N = 50;
    c.A0 = 0.5;
    c.f = 0.3;
    c.interactions = 200;
    c.phi = kPi / 4;
    return c;
}

void check_equal(const EnsembleResult& a, const EnsembleResult& b) {
    CHECK(a.N == b.N);
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.trajectories == b.trajectories);
    CHECK(a.exit_counts == b.exit_counts);
    CHECK(a.absorbed_by_d1 == b.absorbed_by_d1);
    CHECK(a.detected_by_d2 == b.detected_by_d2);
    CHECK(a.transmitted_undetected == b.transmitted_undetected);
    CHECK(a.detected_at_top == b.detected_at_top);
    CHECK(a.budget_exhausted == b.budget_exhausted);
    CHECK(a.total_moves == b.total_moves);
    CHECK(a.total_ticks == b.total_ticks);
}
} // namespace

TEST_CASE("histogram merge is the exact sum of partials") {
    DeviceConfig c = mid_config();
    TransitionModel model = TransitionModel::canonical(c.N);
    EnsembleResult whole = simulate_range(c, model, 5, 0, 0, 4000);
    EnsembleResult p1 = simulate_range(c, model, 5, 0, 0, 1000);
    EnsembleResult p2 = simulate_range(c, model, 5, 0, 1000, 2500);
    EnsembleResult p3 = simulate_range(c, model, 5, 0, 2500, 2500);
    EnsembleResult p4 = simulate_range(c, model, 5, 0, 2500, 4000);

    check_equal(histogram_merge(histogram_merge(p1, p2), histogram_merge(p3, p4)), whole);
    // Commutative, and the zero-width partial is absorbed.
    CHECK(p3.trajectories == 0);
    check_equal(histogram_merge(p4, histogram_merge(p2, histogram_merge(p3, p1))), whole);
}

TEST_CASE("histogram merge identity and error cases") {
    DeviceConfig c = mid_config();
    TransitionModel model = TransitionModel::canonical(c.N);
    EnsembleResult part = simulate_range(c, model, 5, 0, 0, 100);
    EnsembleResult empty;
    check_equal(histogram_merge(empty, part), part);
    check_equal(histogram_merge(part, empty), part);
    check_equal(histogram_merge(empty, empty), empty);

    DeviceConfig other = c;
    other.f = 0.4;
    EnsembleResult foreign = simulate_range(other, model, 5, 0, 0, 100);
    CHECK_THROWS_AS((void)histogram_merge(part, foreign), std::invalid_argument);

    DeviceConfig wide = c;
    wide.N = 60;
    EnsembleResult bigger =
        simulate_range(wide, TransitionModel::canonical(60), 5, 0, 0, 100);
    CHECK_THROWS_AS((void)histogram_merge(part, bigger), std::invalid_argument);
}

TEST_CASE("parallel ensembles are partition-independent") {
    DeviceConfig c = mid_config();
    EnsembleResult one = run_ensemble_parallel(c, 10000, 5, 1);
    EnsembleResult three = run_ensemble_parallel(c, 10000, 5, 3);
    EnsembleResult eight = run_ensemble_parallel(c, 10000, 5, 8);
    check_equal(one, three);
    check_equal(one, eight);
    // And identical to the sequential reference range.
    TransitionModel model = TransitionModel::canonical(c.N);
    check_equal(one, simulate_range(c, model, 5, 0, 0, 10000));
    CHECK_THROWS_AS((void)run_ensemble_parallel(c, 0, 5, 1), std::invalid_argument);
}

TEST_CASE("sweep cells decompose row-major, rotation fastest") {
    SweepSpec s;
    s.lattice_sizes = {100, 200};
    s.intensities = {0.3, 0.7};
    s.budgets = {10, 20};
    s.absorbances = {0.0, 1.0};
    s.rotations = {0.0, kPi / 2};
    s.trajectories_per_cell = 1;
    CHECK(s.cell_count() == 32);

    DeviceConfig first = s.cell(0);
    CHECK(first.N == 100);
    CHECK(first.A0 == 0.3);
    CHECK(first.interactions == 10);
    CHECK(first.f == 0.0);
    CHECK(first.phi == 0.0);

    CHECK(s.cell(1).phi == kPi / 2);   // rotation varies fastest
    CHECK(s.cell(2).f == 1.0);         // then absorbance
    CHECK(s.cell(4).interactions == 20);
    CHECK(s.cell(8).A0 == 0.7);
    CHECK(s.cell(16).N == 200);        // lattice size varies slowest

    DeviceConfig last = s.cell(31);
    CHECK(last.N == 200);
    CHECK(last.A0 == 0.7);
    CHECK(last.interactions == 20);
    CHECK(last.f == 1.0);
    CHECK(last.phi == kPi / 2);

    CHECK_THROWS_AS((void)s.cell(32), std::invalid_argument);
}

TEST_CASE("sweep spec validation") {
    SweepSpec s;
    s.lattice_sizes = {100};
    s.intensities = {0.5};
    s.budgets = {10};
    s.absorbances = {0.5};
    s.rotations = {};
    s.trajectories_per_cell = 10;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.rotations = {0.0};
    CHECK_NOTHROW(s.validate());
    s.trajectories_per_cell = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.trajectories_per_cell = 10;
    s.intensities = {1.5};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("one-cell sweep equals a direct ensemble") {
    DeviceConfig c = mid_config();
    SweepSpec s;
    s.lattice_sizes = {c.N};
    s.intensities = {c.A0};
    s.budgets = {c.interactions};
    s.absorbances = {c.f};
    s.rotations = {c.phi};
    s.trajectories_per_cell = 5000;
    s.seed = 5;
    std::vector<SweepCellResult> cells = run_sweep(s);
    REQUIRE(cells.size() == 1);
    CHECK_FALSE(cells[0].failed);
    check_equal(cells[0].ensemble, run_ensemble_parallel(c, 5000, 5, 1, 0));
}

TEST_CASE("sweep addresses streams by cell index") {
    SweepSpec s;
    s.lattice_sizes = {50};
    s.intensities = {0.5};
    s.budgets = {200};
    s.absorbances = {0.0, 0.3};
    s.rotations = {kPi / 4};
    s.trajectories_per_cell = 3000;
    s.seed = 9;
    std::vector<SweepCellResult> cells = run_sweep(s);
    REQUIRE(cells.size() == 2);
    check_equal(cells[1].ensemble, run_ensemble_parallel(s.cell(1), 3000, 9, 1, 1));
    // Same seed, different cell: the underlying walks differ.
    CHECK(cells[0].ensemble.exit_counts != cells[1].ensemble.exit_counts);
}

TEST_CASE("a failing cell is recorded and the sweep continues") {
    SweepSpec s;
    s.lattice_sizes = {2000};
    s.intensities = {0.5};
    s.budgets = {10, kUnlimitedBudget};
    s.absorbances = {0.0};
    s.rotations = {0.0};
    s.trajectories_per_cell = 50;
    s.seed = 1;
    s.unlimited_cap = 500; // every unlimited walk blows through this
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    std::vector<SweepCellResult> cells =
        run_sweep(s, 1, [&seen](std::size_t done, std::size_t total) {
            seen.emplace_back(done, total);
        });
    REQUIRE(cells.size() == 2);
    CHECK_FALSE(cells[0].failed);
    CHECK(cells[1].failed);
    CHECK_FALSE(cells[1].error.empty());
    REQUIRE(seen.size() == 2);
    CHECK(seen[0] == std::pair<std::size_t, std::size_t>(1, 2));
    CHECK(seen[1] == std::pair<std::size_t, std::size_t>(2, 2));
}
