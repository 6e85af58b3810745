#include "spinwalk/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include "spinwalk/analytic.hpp"
#include "spinwalk/io.hpp"

namespace spinwalk {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError(std::string("unknown key \"") + item.key() + "\" in " + where);
    }
}

const json& need(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError(std::string("missing required key \"") + key + "\" in " + where);
    return *it;
}

double need_number(const json& v, const char* what) {
    if (!v.is_number())
        throw ConfigError(std::string(what) + " must be a number");
    return v.get<double>();
}

std::uint64_t need_u64(const json& v, const char* what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(std::string(what) + " must be a nonnegative integer");
}

int need_lattice(const json& v) {
    if (!v.is_number_integer())
        throw ConfigError("lattice_size must be an integer");
    std::int64_t n = v.get<std::int64_t>();
    if (n < 2 || n > 100000000)
        throw ConfigError("lattice_size must lie in [2, 1e8]");
    return static_cast<int>(n);
}

std::uint64_t parse_interactions_value(const json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "unlimited") return kUnlimitedBudget;
        throw ConfigError("interactions must be a nonnegative integer or \"unlimited\"");
    }
    return need_u64(v, "interactions");
}

double parse_rotation_value(const json& v) {
    if (v.is_string()) return parse_angle(v.get<std::string>());
    return need_number(v, "rotation");
}

template <class F>
auto grid_of(const json& v, const char* what, F parse_one)
    -> std::vector<decltype(parse_one(v))> {
    if (!v.is_array() || v.empty())
        throw ConfigError(std::string(what) + " sweep entry must be a nonempty array");
    std::vector<decltype(parse_one(v))> out;
    out.reserve(v.size());
    for (const json& e : v) out.push_back(parse_one(e));
    return out;
}

} // namespace

Method parse_method(const std::string& text) {
    if (text == "montecarlo") return Method::MonteCarlo;
    if (text == "exact") return Method::Exact;
    if (text == "gaussian") return Method::Gaussian;
    throw ConfigError("unknown method \"" + text + "\" (expected montecarlo, exact, or gaussian)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::MonteCarlo: return "montecarlo";
        case Method::Exact: return "exact";
        case Method::Gaussian: return "gaussian";
    }
    throw std::logic_error("unreachable");
}

WalkMode parse_mode(const std::string& text) {
    if (text == "moves") return WalkMode::CountMoves;
    if (text == "ticks") return WalkMode::CountTicks;
    throw ConfigError("unknown budget mode \"" + text + "\" (expected moves or ticks)");
}

std::string mode_name(WalkMode m) {
    return m == WalkMode::CountMoves ? "moves" : "ticks";
}

double parse_angle(const std::string& text) {
    std::size_t lo = 0, hi = text.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
    std::string body = text.substr(lo, hi - lo);

    double scale = 1.0;
    if (body.size() > 3 && body.compare(body.size() - 3, 3, "deg") == 0) {
        scale = std::numbers::pi / 180.0;
        body.resize(body.size() - 3);
    } else if (body.size() > 3 && body.compare(body.size() - 3, 3, "rad") == 0) {
        body.resize(body.size() - 3);
    }
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.pop_back();

    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(body, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse angle \"" + text + "\"");
    }
    if (used != body.size() || !std::isfinite(value))
        throw ConfigError("cannot parse angle \"" + text + "\"");
    return value * scale;
}

std::string format_angle(double radians) {
    return format_double(radians) + "rad";
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, {"device", "sweep", "trajectories", "seed", "method", "output"}, "config root");

    const json& dev = need(j, "device", "config root");
    if (!dev.is_object()) throw ConfigError("\"device\" must be an object");
    check_keys(dev,
               {"lattice_size", "initial_intensity", "initial_angle", "absorbance",
                "interactions", "mode", "rotation", "unlimited_cap", "coupling"},
               "\"device\"");

    RunConfig cfg;
    SweepSpec& sweep = cfg.sweep;

    sweep.lattice_sizes = {need_lattice(need(dev, "lattice_size", "\"device\""))};

    bool has_intensity = dev.contains("initial_intensity");
    bool has_angle = dev.contains("initial_angle");
    if (has_intensity == has_angle)
        throw ConfigError("\"device\" needs exactly one of initial_intensity or initial_angle");
    double A0 = has_intensity
                    ? need_number(dev["initial_intensity"], "initial_intensity")
                    : intensity_from_angle(SpinAngle(parse_rotation_value(dev["initial_angle"])));
    sweep.intensities = {A0};

    sweep.absorbances = {need_number(need(dev, "absorbance", "\"device\""), "absorbance")};
    sweep.budgets = {parse_interactions_value(need(dev, "interactions", "\"device\""))};
    sweep.rotations = {dev.contains("rotation") ? parse_rotation_value(dev["rotation"]) : 0.0};
    if (dev.contains("mode")) {
        if (!dev["mode"].is_string()) throw ConfigError("mode must be a string");
        sweep.mode = parse_mode(dev["mode"].get<std::string>());
    }
    if (dev.contains("unlimited_cap"))
        sweep.unlimited_cap = need_u64(dev["unlimited_cap"], "unlimited_cap");
    if (dev.contains("coupling")) {
        const json& cj = dev["coupling"];
        if (!cj.is_array() || cj.empty())
            throw ConfigError("coupling must be a nonempty array");
        for (const json& e : cj) {
            if (!e.is_object()) throw ConfigError("coupling entries must be objects");
            check_keys(e, {"absorbance", "interactions"}, "coupling entry");
            CouplingEntry entry;
            entry.absorbance = need_number(need(e, "absorbance", "coupling entry"), "coupling absorbance");
            entry.interactions = parse_interactions_value(need(e, "interactions", "coupling entry"));
            sweep.coupling.push_back(entry);
        }
    }

    if (j.contains("sweep")) {
        const json& sj = j["sweep"];
        if (!sj.is_object()) throw ConfigError("\"sweep\" must be an object");
        check_keys(sj, {"lattice_size", "initial_intensity", "absorbance", "interactions", "rotation"},
                   "\"sweep\"");
        if (sj.contains("lattice_size"))
            sweep.lattice_sizes = grid_of(sj["lattice_size"], "lattice_size",
                                          [](const json& e) { return need_lattice(e); });
        if (sj.contains("initial_intensity"))
            sweep.intensities = grid_of(sj["initial_intensity"], "initial_intensity", [](const json& e) {
                return need_number(e, "initial_intensity");
            });
        if (sj.contains("absorbance"))
            sweep.absorbances = grid_of(sj["absorbance"], "absorbance",
                                        [](const json& e) { return need_number(e, "absorbance"); });
        if (sj.contains("interactions"))
            sweep.budgets = grid_of(sj["interactions"], "interactions",
                                    [](const json& e) { return parse_interactions_value(e); });
        if (sj.contains("rotation"))
            sweep.rotations = grid_of(sj["rotation"], "rotation",
                                      [](const json& e) { return parse_rotation_value(e); });
    }

    sweep.trajectories_per_cell = need_u64(need(j, "trajectories", "config root"), "trajectories");
    cfg.seed = need_u64(need(j, "seed", "config root"), "seed");
    sweep.seed = cfg.seed;

    if (j.contains("method")) {
        if (!j["method"].is_string()) throw ConfigError("method must be a string");
        cfg.method = parse_method(j["method"].get<std::string>());
    }
    if (j.contains("output")) {
        const json& oj = j["output"];
        if (!oj.is_object()) throw ConfigError("\"output\" must be an object");
        check_keys(oj, {"dir", "prefix"}, "\"output\"");
        if (oj.contains("dir")) {
            if (!oj["dir"].is_string()) throw ConfigError("output.dir must be a string");
            cfg.out_dir = oj["dir"].get<std::string>();
        }
        if (oj.contains("prefix")) {
            if (!oj["prefix"].is_string()) throw ConfigError("output.prefix must be a string");
            cfg.prefix = oj["prefix"].get<std::string>();
        }
    }

    try {
        sweep.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::echo() const {
    auto interactions_json = [](std::uint64_t b) {
        return b == kUnlimitedBudget ? json("unlimited") : json(b);
    };

    // Emitted in the same shape from_json() accepts, so regenerating a run
    // from an artifact's embedded echo is load-and-go. The device block holds
    // the first grid entry of each parameter; the sweep block restates the
    // full grids and overrides it.
    json dev;
    dev["lattice_size"] = sweep.lattice_sizes.front();
    dev["initial_intensity"] = sweep.intensities.front();
    dev["absorbance"] = sweep.absorbances.front();
    dev["interactions"] = interactions_json(sweep.budgets.front());
    dev["rotation"] = sweep.rotations.front();
    dev["mode"] = mode_name(sweep.mode);
    dev["unlimited_cap"] = sweep.unlimited_cap;
    if (!sweep.coupling.empty()) {
        json cj = json::array();
        for (const CouplingEntry& e : sweep.coupling) {
            json ej;
            ej["absorbance"] = e.absorbance;
            ej["interactions"] = interactions_json(e.interactions);
            cj.push_back(ej);
        }
        dev["coupling"] = cj;
    }

    json sj;
    sj["lattice_size"] = sweep.lattice_sizes;
    sj["initial_intensity"] = sweep.intensities;
    sj["absorbance"] = sweep.absorbances;
    json budgets = json::array();
    for (std::uint64_t b : sweep.budgets) budgets.push_back(interactions_json(b));
    sj["interactions"] = budgets;
    sj["rotation"] = sweep.rotations;

    json j;
    j["device"] = dev;
    j["sweep"] = sj;
    j["trajectories"] = sweep.trajectories_per_cell;
    j["seed"] = seed;
    j["method"] = method_name(method);
    return j;
}

std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    const char* env = std::getenv(kOutDirEnvVar);
    if (env && *env) return env;
    return ".";
}

} // namespace spinwalk
