#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinwalk/config.hpp"
#include "spinwalk/cqm.hpp"
#include "spinwalk/experiment.hpp"
#include "spinwalk/harness.hpp"
#include "spinwalk/io.hpp"
#include "spinwalk/version.hpp"

namespace {

using namespace spinwalk;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string prefix;
    std::uint64_t seed = 0;
    std::uint64_t trajectories = 0;
    std::string mode;
    std::string method;
    int threads = 0;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file")->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--trajectories", args.trajectories, "override trajectories per cell");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--prefix", args.prefix, "output file prefix");
    cmd->add_option("--mode", args.mode, "override budget mode")
        ->check(CLI::IsMember({"moves", "ticks"}));
    cmd->add_option("--method", args.method, "override method")
        ->check(CLI::IsMember({"montecarlo", "exact", "gaussian"}));
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
}

RunConfig load_with_overrides(const CLI::App* cmd, const CommonArgs& args) {
    RunConfig cfg = RunConfig::from_file(args.config_path);
    if (cmd->count("--seed")) {
        cfg.seed = args.seed;
        cfg.sweep.seed = args.seed;
    }
    if (cmd->count("--trajectories")) {
        if (args.trajectories == 0) throw ConfigError("trajectories must be positive");
        cfg.sweep.trajectories_per_cell = args.trajectories;
    }
    if (cmd->count("--mode")) cfg.sweep.mode = parse_mode(args.mode);
    if (cmd->count("--method")) cfg.method = parse_method(args.method);
    if (cmd->count("--prefix")) cfg.prefix = args.prefix;
    cfg.out_dir = resolve_out_dir(args.out_dir, cfg.out_dir);
    return cfg;
}

std::string artifact_path(const RunConfig& cfg, const std::string& suffix) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / (cfg.prefix + "_" + suffix)).string();
}

void announce(const std::string& path) { std::cout << "wrote " << path << "\n"; }

int finish(const std::vector<SweepCellResult>& cells) {
    std::size_t failed = 0;
    for (const SweepCellResult& c : cells)
        if (c.failed) {
            ++failed;
            std::cerr << "cell " << c.index << " failed: " << c.error << "\n";
        }
    return failed == cells.size() && !cells.empty() ? 4 : 0;
}

int run_monte_carlo(const RunConfig& cfg, const std::string& command, int threads,
                    bool with_surface) {
    auto progress = [](std::size_t done, std::size_t total) {
        std::cerr << "cell " << done << "/" << total << " done\n";
    };
    std::vector<SweepCellResult> cells = run_sweep(cfg.sweep, threads, progress);
    std::string csv_path = artifact_path(cfg, "results.csv");
    write_results_csv(csv_path, cfg, cells);
    announce(csv_path);
    if (with_surface) {
        std::string surface_path = artifact_path(cfg, "cqm_surface.csv");
        CsvWriter csv(surface_path);
        csv.comment("spinwalk " + std::string(kVersion) + " projective-account detection surface");
        csv.comment("config " + cfg.echo().dump());
        csv.header({"absorbance", "initial_intensity", "rotation_rad", "cqm_detected"});
        // Fixed plot grid: intensity in steps of 0.05, rotation in steps of pi/40.
        for (double f : cfg.sweep.absorbances)
            for (const CqmSurfacePoint& p : cqm_surface(f, 21, 41))
                csv.row({format_double(f), format_double(p.A0), format_double(p.phi),
                         format_double(p.d2_fraction)});
        csv.close();
        announce(surface_path);
    }
    std::string report_path = artifact_path(cfg, "report.json");
    write_report_json(report_path, report_json(cfg, command, cells));
    announce(report_path);
    return finish(cells);
}

int run_prediction(const RunConfig& cfg, const std::string& command) {
    PredictionMethod method =
        cfg.method == Method::Exact ? PredictionMethod::Exact : PredictionMethod::Gaussian;
    std::size_t cells = cfg.sweep.cell_count();

    std::string csv_path = artifact_path(cfg, "predictions.csv");
    CsvWriter csv(csv_path);
    csv.comment("spinwalk " + std::string(kVersion) + " analytic predictions");
    csv.comment("config " + cfg.echo().dump());
    csv.header({"cell", "lattice_size", "initial_intensity", "quantized_intensity", "absorbance",
                "interactions", "mode", "rotation_rad", "method", "predicted_detected_fraction",
                "status"});

    nlohmann::json report;
    report["tool"] = "spinwalk";
    report["version"] = std::string(kVersion);
    report["command"] = command;
    report["config"] = cfg.echo();
    nlohmann::json cell_array = nlohmann::json::array();

    std::size_t failed = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        DeviceConfig c = cfg.sweep.cell(i);
        std::vector<std::string> row{
            std::to_string(i),
            std::to_string(c.N),
            format_double(c.A0),
            format_double(c.quantized_A0()),
            format_double(c.f),
            c.interactions == kUnlimitedBudget ? "unlimited" : std::to_string(c.interactions),
            mode_name(c.mode),
            format_double(c.phi),
            method_name(cfg.method)};
        nlohmann::json jc;
        jc["index"] = i;
        nlohmann::json params;
        params["lattice_size"] = c.N;
        params["initial_intensity"] = c.A0;
        params["quantized_intensity"] = c.quantized_A0();
        params["absorbance"] = c.f;
        params["interactions"] = c.interactions == kUnlimitedBudget
                                     ? nlohmann::json("unlimited")
                                     : nlohmann::json(c.interactions);
        params["mode"] = mode_name(c.mode);
        params["rotation_rad"] = c.phi;
        jc["params"] = params;
        jc["method"] = method_name(cfg.method);
        try {
            double value = sp_mean_prediction(c, method);
            row.push_back(format_double(value));
            row.push_back("ok");
            jc["predicted_detected_fraction"] = value;
            jc["status"] = "ok";
        } catch (const std::exception& e) {
            ++failed;
            std::cerr << "cell " << i << " failed: " << e.what() << "\n";
            row.push_back("");
            row.push_back(e.what());
            jc["status"] = "error";
            jc["error"] = e.what();
        }
        csv.row(row);
        cell_array.push_back(jc);
    }
    csv.close();
    announce(csv_path);

    report["cells"] = cell_array;
    std::string report_path = artifact_path(cfg, "report.json");
    write_report_json(report_path, report);
    announce(report_path);
    return failed == cells && cells > 0 ? 4 : 0;
}

int run_like(const CLI::App* cmd, const CommonArgs& args, const std::string& command,
             bool single_cell_only, bool with_surface) {
    RunConfig cfg = load_with_overrides(cmd, args);
    if (single_cell_only && cfg.sweep.cell_count() != 1)
        throw ConfigError("this config defines " + std::to_string(cfg.sweep.cell_count()) +
                          " cells; use the sweep command for parameter grids");
    if (with_surface && cfg.method != Method::MonteCarlo)
        throw ConfigError("compare requires method montecarlo");
    if (cfg.method == Method::MonteCarlo)
        return run_monte_carlo(cfg, command, args.threads, with_surface);
    return run_prediction(cfg, command);
}

struct DistArgs {
    std::string kind;
    double intensity = 0.5;
    double sigma = -1;
    int lattice_size = 1000;
    std::uint64_t interactions = 22500;
    std::string rotation = "45deg";
    std::string mode = "moves";
    std::string method = "montecarlo";
    std::uint64_t trajectories = 100000;
    std::uint64_t seed = 1;
    int points = 200;
    int threads = 0;
    std::string out_dir;
    std::string prefix = "spinwalk";
};

int run_dist(const CLI::App* cmd, const DistArgs& d) {
    if (d.points < 2) throw ConfigError("--points must be at least 2");
    std::string out = resolve_out_dir(d.out_dir, "");
    std::filesystem::create_directories(out);
    std::string path =
        (std::filesystem::path(out) / (d.prefix + "_" + d.kind + ".csv")).string();
    CsvWriter csv(path);
    csv.comment("spinwalk " + std::string(kVersion) + " " + d.kind);

    if (d.kind == "gaussian-a") {
        double sigma = d.sigma;
        if (!cmd->count("--sigma")) sigma = walk_sigma(d.lattice_size, d.interactions);
        if (!(sigma > 0)) throw ConfigError("--sigma must be positive");
        csv.comment("params {\"intensity\":" + format_double(d.intensity) +
                    ",\"sigma\":" + format_double(sigma) + "}");
        csv.header({"A", "density"});
        for (int i = 0; i <= d.points; ++i) {
            double A = static_cast<double>(i) / d.points;
            csv.row({format_double(A), format_double(gaussian_pdf(A, d.intensity, sigma))});
        }
    } else if (d.kind == "walk-hist") {
        DeviceConfig c;
        c.N = d.lattice_size;
        c.A0 = d.intensity;
        c.f = 0.0;
        c.interactions = d.interactions;
        c.mode = parse_mode(d.mode);
        c.phi = 0.0;
        c.validate();
        IntensityDistribution dist;
        if (d.method == "exact") {
            if (c.mode != WalkMode::CountMoves)
                throw ValidityError("exact histogram supports only the moves budget mode");
            dist = absorbed_walk_distribution(c.a0(), c.N, d.interactions);
        } else {
            if (d.trajectories == 0) throw ConfigError("--trajectories must be positive");
            dist = to_distribution(
                run_ensemble_parallel(c, d.trajectories, d.seed, d.threads));
        }
        csv.comment("params {\"lattice_size\":" + std::to_string(c.N) +
                    ",\"intensity\":" + format_double(d.intensity) +
                    ",\"interactions\":" + std::to_string(d.interactions) +
                    ",\"mode\":\"" + d.mode + "\",\"method\":\"" + d.method +
                    "\",\"trajectories\":" + std::to_string(d.trajectories) +
                    ",\"seed\":" + std::to_string(d.seed) + "}");
        csv.header({"a", "intensity", "mass", "kind"});
        csv.row({"0", "0", format_double(dist.mass_at_zero), "endpoint"});
        for (const auto& [a, m] : dist.interior)
            csv.row({std::to_string(a), format_double(static_cast<double>(a) / dist.N),
                     format_double(m), "interior"});
        csv.row({std::to_string(dist.N), "1", format_double(dist.mass_at_one), "endpoint"});
    } else if (d.kind == "b-density") {
        if (!(d.sigma > 0)) throw ConfigError("--sigma must be positive");
        RotatedIntensityDensity density(d.sigma);
        csv.comment("params {\"sigma\":" + format_double(d.sigma) +
                    ",\"kappa\":" + format_double(density.kappa()) +
                    ",\"mean\":" + format_double(density.mean()) + "}");
        csv.header({"B", "density"});
        // Midpoint sampling: the density is integrably singular at B = 1.
        for (int i = 0; i < d.points; ++i) {
            double B = 0.5 + (i + 0.5) * 0.5 / d.points;
            csv.row({format_double(B), format_double(density(B))});
        }
    } else { // rotation-curve
        double phi = parse_angle(d.rotation);
        csv.comment("params {\"rotation_rad\":" + format_double(phi) + "}");
        csv.header({"A", "B"});
        for (int i = 0; i <= d.points; ++i) {
            double A = static_cast<double>(i) / d.points;
            csv.row({format_double(A), format_double(rotate_intensity(A, RotationAngle(phi)))});
        }
    }
    csv.close();
    announce(path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and analytic toolkit for interrupted spin measurements "
                 "modelled as absorbing random walks of the detection intensity"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, compare_args;
    CLI::App* cmd_run = app.add_subcommand("run", "simulate or predict a single cell");
    add_common_options(cmd_run, run_args);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "simulate a parameter grid");
    add_common_options(cmd_sweep, sweep_args);
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "simulate and tabulate the projective-account surface");
    add_common_options(cmd_compare, compare_args);

    DistArgs dist_args;
    CLI::App* cmd_dist = app.add_subcommand("dist", "tabulate a distribution to CSV");
    cmd_dist->add_option("--kind", dist_args.kind, "which distribution")
        ->required()
        ->check(CLI::IsMember({"gaussian-a", "walk-hist", "b-density", "rotation-curve"}));
    cmd_dist->add_option("--intensity", dist_args.intensity, "central intensity A0");
    cmd_dist->add_option("--sigma", dist_args.sigma, "gaussian width");
    cmd_dist->add_option("--lattice-size", dist_args.lattice_size, "lattice size N");
    cmd_dist->add_option("--interactions", dist_args.interactions, "interaction budget");
    cmd_dist->add_option("--rotation", dist_args.rotation, "detector rotation (deg/rad)");
    cmd_dist->add_option("--mode", dist_args.mode, "budget mode")
        ->check(CLI::IsMember({"moves", "ticks"}));
    cmd_dist->add_option("--method", dist_args.method, "histogram method")
        ->check(CLI::IsMember({"exact", "montecarlo"}));
    cmd_dist->add_option("--trajectories", dist_args.trajectories, "montecarlo trajectories");
    cmd_dist->add_option("--seed", dist_args.seed, "montecarlo seed");
    cmd_dist->add_option("--points", dist_args.points, "sample points");
    cmd_dist->add_option("--threads", dist_args.threads, "worker threads (0 = hardware)");
    cmd_dist->add_option("--out", dist_args.out_dir, "output directory");
    cmd_dist->add_option("--prefix", dist_args.prefix, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << "\n";
        return 2;
    }

    auto start = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        if (cmd_run->parsed()) rc = run_like(cmd_run, run_args, "run", true, false);
        else if (cmd_sweep->parsed()) rc = run_like(cmd_sweep, sweep_args, "sweep", false, false);
        else if (cmd_compare->parsed())
            rc = run_like(cmd_compare, compare_args, "compare", false, true);
        else rc = run_dist(cmd_dist, dist_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << "elapsed " << elapsed.count() << "s\n";
    return rc;
}
