#include "spinwalk/io.hpp"

#include <charconv>
#include <stdexcept>

#include "spinwalk/version.hpp"

namespace spinwalk {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
}

void CsvWriter::comment(const std::string& text) {
    if (header_written_)
        throw std::logic_error("csv: comments must precede the header");
    out_ << "# " << text << "\n";
}

void CsvWriter::header(const std::vector<std::string>& names) {
    if (header_written_) throw std::logic_error("csv: header already written");
    emit(names);
    header_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (!header_written_) throw std::logic_error("csv: header must precede rows");
    emit(cells);
}

void CsvWriter::emit(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\n") == std::string::npos) {
            out_ << c;
            continue;
        }
        out_ << '"';
        for (char ch : c) {
            if (ch == '"') out_ << '"';
            out_ << ch;
        }
        out_ << '"';
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_);
    out_.close();
}

namespace {

const char* json_type_name(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_null()) return "null";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    return "number";
}

bool type_matches(const json& doc, const std::string& want) {
    std::string have = json_type_name(doc);
    if (want == have) return true;
    return want == "number" && have == "integer"; // integers are numbers
}

bool check_node(const json& doc, const json& schema, const std::string& path, std::string& why) {
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(doc, t.get<std::string>());
        } else if (t.is_array()) {
            for (const json& one : t)
                if (type_matches(doc, one.get<std::string>())) {
                    ok = true;
                    break;
                }
        }
        if (!ok) {
            why = path + ": expected type " + t.dump() + ", got " + json_type_name(doc);
            return false;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& v : schema["enum"])
            if (v == doc) {
                ok = true;
                break;
            }
        if (!ok) {
            why = path + ": value not in enum";
            return false;
        }
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const json& k : schema["required"])
                if (!doc.contains(k.get<std::string>())) {
                    why = path + ": missing required key \"" + k.get<std::string>() + "\"";
                    return false;
                }
        const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        if (props)
            for (const auto& item : doc.items()) {
                auto it = props->find(item.key());
                if (it != props->end()) {
                    if (!check_node(item.value(), *it, path + "." + item.key(), why)) return false;
                } else if (schema.contains("additionalProperties") &&
                           schema["additionalProperties"] == false) {
                    why = path + ": unexpected key \"" + item.key() + "\"";
                    return false;
                }
            }
    }
    if (doc.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < doc.size(); ++i)
            if (!check_node(doc[i], schema["items"], path + "[" + std::to_string(i) + "]", why))
                return false;
    }
    return true;
}

} // namespace

bool matches_schema(const json& doc, const json& schema, std::string& why) {
    why.clear();
    return check_node(doc, schema, "$", why);
}

json stat_json(const StatSummary& s) {
    json j;
    j["estimate"] = s.estimate;
    j["lo"] = s.lo;
    j["hi"] = s.hi;
    j["n"] = s.n;
    return j;
}

namespace {

json interactions_json(std::uint64_t n) {
    if (n == kUnlimitedBudget) return json("unlimited");
    return json(n);
}

} // namespace

json cell_json(const SweepCellResult& cell) {
    const DeviceConfig& c = cell.config;
    json j;
    j["index"] = cell.index;
    json p;
    p["lattice_size"] = c.N;
    p["initial_intensity"] = c.A0;
    p["quantized_intensity"] = c.quantized_A0();
    p["quantization_error"] = c.quantization_error();
    p["absorbance"] = c.f;
    p["interactions"] = interactions_json(c.interactions);
    p["effective_interactions"] = interactions_json(c.effective_interactions());
    p["mode"] = mode_name(c.mode);
    p["rotation_rad"] = c.phi;
    j["params"] = p;

    if (cell.failed) {
        j["status"] = "error";
        j["error"] = cell.error;
        return j;
    }

    const EnsembleResult& r = cell.ensemble;
    const ComparisonReport& rep = cell.report;
    json counts;
    counts["trajectories"] = r.trajectories;
    counts["exit_at_bottom"] = r.exit_counts.front();
    counts["exit_at_top"] = r.exit_counts.back();
    counts["absorbed_by_d1"] = r.absorbed_by_d1;
    counts["detected_by_d2"] = r.detected_by_d2;
    counts["transmitted_undetected"] = r.transmitted_undetected;
    counts["detected_at_top"] = r.detected_at_top;
    counts["budget_exhausted"] = r.budget_exhausted;
    counts["total_moves"] = r.total_moves;
    counts["total_ticks"] = r.total_ticks;
    j["counts"] = counts;

    json sp;
    sp["detected"] = stat_json(rep.sp_d2_fraction);
    sp["absorbed"] = stat_json(rep.sp_d1_absorbed);
    sp["exit_top"] = stat_json(rep.endpoint_mass_s);
    sp["mean_exit_intensity"] = mean_intensity(to_distribution(r));
    j["sp"] = sp;

    json cqm;
    cqm["detected"] = rep.cqm_d2_fraction;
    cqm["absorbed"] = rep.cqm_d1_absorbed;
    j["cqm"] = cqm;

    j["divergence"] = stat_json(rep.divergence);

    json eff;
    eff["absorbance"] = rep.effective_absorbance;
    eff["cqm_detected"] = rep.cqm_d2_at_effective;
    eff["divergence"] = stat_json(rep.divergence_effective);
    j["effective"] = eff;

    j["status"] = "ok";
    return j;
}

json report_json(const RunConfig& cfg, const std::string& command,
                 const std::vector<SweepCellResult>& cells) {
    json j;
    j["tool"] = "spinwalk";
    j["version"] = std::string(kVersion);
    j["command"] = command;
    j["config"] = cfg.echo();
    json arr = json::array();
    for (const SweepCellResult& c : cells) arr.push_back(cell_json(c));
    j["cells"] = arr;
    return j;
}

void write_report_json(const std::string& path, const json& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << report.dump(2) << "\n";
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_results_csv(const std::string& path, const RunConfig& cfg,
                       const std::vector<SweepCellResult>& cells) {
    CsvWriter csv(path);
    csv.comment("spinwalk " + std::string(kVersion) + " results");
    csv.comment("config " + cfg.echo().dump());
    csv.header({"cell",
                "lattice_size",
                "initial_intensity",
                "quantized_intensity",
                "absorbance",
                "interactions",
                "mode",
                "rotation_rad",
                "trajectories",
                "detected_fraction",
                "detected_lo",
                "detected_hi",
                "cqm_detected",
                "divergence",
                "divergence_lo",
                "divergence_hi",
                "absorbed_fraction",
                "absorbed_lo",
                "absorbed_hi",
                "cqm_absorbed",
                "exit_top_fraction",
                "exit_top_lo",
                "exit_top_hi",
                "exit_bottom_fraction",
                "effective_absorbance",
                "cqm_detected_effective",
                "divergence_effective",
                "divergence_effective_lo",
                "divergence_effective_hi",
                "budget_exhausted_fraction",
                "mean_exit_intensity",
                "status"});
    for (const SweepCellResult& cell : cells) {
        const DeviceConfig& c = cell.config;
        std::vector<std::string> row;
        row.push_back(std::to_string(cell.index));
        row.push_back(std::to_string(c.N));
        row.push_back(format_double(c.A0));
        row.push_back(format_double(c.quantized_A0()));
        row.push_back(format_double(c.f));
        row.push_back(c.interactions == kUnlimitedBudget ? "unlimited"
                                                         : std::to_string(c.interactions));
        row.push_back(mode_name(c.mode));
        row.push_back(format_double(c.phi));
        if (cell.failed) {
            row.push_back(std::to_string(cell.ensemble.trajectories));
            for (int i = 0; i < 22; ++i) row.push_back("");
            row.push_back(cell.error);
        } else {
            const EnsembleResult& r = cell.ensemble;
            const ComparisonReport& rep = cell.report;
            double M = static_cast<double>(r.trajectories);
            row.push_back(std::to_string(r.trajectories));
            row.push_back(format_double(rep.sp_d2_fraction.estimate));
            row.push_back(format_double(rep.sp_d2_fraction.lo));
            row.push_back(format_double(rep.sp_d2_fraction.hi));
            row.push_back(format_double(rep.cqm_d2_fraction));
            row.push_back(format_double(rep.divergence.estimate));
            row.push_back(format_double(rep.divergence.lo));
            row.push_back(format_double(rep.divergence.hi));
            row.push_back(format_double(rep.sp_d1_absorbed.estimate));
            row.push_back(format_double(rep.sp_d1_absorbed.lo));
            row.push_back(format_double(rep.sp_d1_absorbed.hi));
            row.push_back(format_double(rep.cqm_d1_absorbed));
            row.push_back(format_double(rep.endpoint_mass_s.estimate));
            row.push_back(format_double(rep.endpoint_mass_s.lo));
            row.push_back(format_double(rep.endpoint_mass_s.hi));
            row.push_back(format_double(r.endpoint_mass_zero()));
            row.push_back(format_double(rep.effective_absorbance));
            row.push_back(format_double(rep.cqm_d2_at_effective));
            row.push_back(format_double(rep.divergence_effective.estimate));
            row.push_back(format_double(rep.divergence_effective.lo));
            row.push_back(format_double(rep.divergence_effective.hi));
            row.push_back(format_double(static_cast<double>(r.budget_exhausted) / M));
            row.push_back(format_double(mean_intensity(to_distribution(r))));
            row.push_back("ok");
        }
        csv.row(row);
    }
    csv.close();
}

} // namespace spinwalk
