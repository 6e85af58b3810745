#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spinwalk/harness.hpp"

namespace spinwalk {

/// Malformed or inconsistent user input (config file, angle text, method name).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// How a run obtains its numbers.
enum class Method { MonteCarlo, Exact, Gaussian };

Method parse_method(const std::string& text);
std::string method_name(Method m);

WalkMode parse_mode(const std::string& text);
std::string mode_name(WalkMode m);

/// Parses "30deg", "0.5rad", or a bare number (radians). Whitespace around
/// the number and before the unit is tolerated.
double parse_angle(const std::string& text);

/// Canonical angle echo: radians with a "rad" suffix.
std::string format_angle(double radians);

/**
 * A full run description as loaded from a JSON config file.
 *
 * The file's "device" object gives scalar parameters; an optional "sweep"
 * object turns any of them into grids. Internally everything is a sweep;
 * a plain run is the one-cell case. Unknown keys anywhere are errors, as are
 * missing required keys: silent misspellings must not change the physics.
 */
struct RunConfig {
    SweepSpec sweep;
    std::uint64_t seed = 0;
    Method method = Method::MonteCarlo;
    std::string out_dir;             // empty until resolved against flag/env
    std::string prefix = "spinwalk";

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::string& path);

    /// Canonical echo embedded in every output artifact. Covers exactly the
    /// fields that affect results (no output paths, no execution knobs).
    nlohmann::json echo() const;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnvVar = "SPINWALK_OUT";

/// Resolution order: explicit flag value, config file, environment, ".".
std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value);

} // namespace spinwalk
