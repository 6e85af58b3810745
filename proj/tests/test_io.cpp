#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "spinwalk/experiment.hpp"
#include "spinwalk/io.hpp"

using namespace spinwalk;
using nlohmann::json;

namespace {

std::filesystem::path temp_path(const std::string& stem) {
    return std::filesystem::temp_directory_path() / ("spinwalk_io_" + stem);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

SweepCellResult make_ok_cell() {
    DeviceConfig cfg;
    cfg.N = 40;
    cfg.A0 = 0.5;
    cfg.f = 0.3;
    cfg.interactions = 100;
    cfg.phi = 0.5;
    SweepCellResult cell;
    cell.index = 0;
    cell.config = cfg;
    std::tie(cell.ensemble, cell.report) = run_ensemble(cfg, 2000, 5);
    return cell;
}

SweepCellResult make_failed_cell() {
    SweepCellResult cell;
    cell.index = 1;
    cell.config.N = 40;
    cell.config.A0 = 0.5;
    cell.config.f = 0.3;
    cell.config.interactions = 100;
    cell.config.phi = 0.5;
    cell.failed = true;
    cell.error = "bad, very bad";
    return cell;
}

RunConfig matching_run_config() {
    return RunConfig::from_json(json::parse(R"({
        "device": {
            "lattice_size": 40,
            "initial_intensity": 0.5,
            "absorbance": 0.3,
            "interactions": 100,
            "rotation": 0.5
        },
        "trajectories": 2000,
        "seed": 5
    })"));
}

} // namespace

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.25) == "-2.25");
    CHECK(format_double(0.0) == "0");
    for (double x : {3.141592653589793, 1.0 / 3.0, 0.9757738159525544, 1e-300})
        CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("csv writer escapes and orders sections") {
    auto path = temp_path("writer.csv");
    {
        CsvWriter w(path.string());
        w.comment("hello");
        w.header({"a", "b"});
        w.row({"1", "x,y"});
        w.row({"he said \"hi\"", "line\nbreak"});
        CHECK_THROWS_AS(w.comment("late"), std::logic_error);
        CHECK_THROWS_AS(w.header({"again"}), std::logic_error);
        w.close();
    }
    CHECK(slurp(path) ==
          "# hello\n"
          "a,b\n"
          "1,\"x,y\"\n"
          "\"he said \"\"hi\"\"\",\"line\nbreak\"\n");
    std::filesystem::remove(path);

    auto path2 = temp_path("no_header.csv");
    CsvWriter w2(path2.string());
    CHECK_THROWS_AS(w2.row({"1"}), std::logic_error);
    std::filesystem::remove(path2);

    CHECK_THROWS_AS(CsvWriter("/nonexistent_dir_zz/x.csv"), std::runtime_error);
}

TEST_CASE("schema check: types, enum, required, extra keys, items") {
    std::string why;

    CHECK(matches_schema(json(3), json::parse(R"({"type": "number"})"), why));
    CHECK_FALSE(matches_schema(json(3.5), json::parse(R"({"type": "integer"})"), why));
    CHECK(why.find("expected type") != std::string::npos);

    json either = json::parse(R"({"type": ["integer", "string"]})");
    CHECK(matches_schema(json("unlimited"), either, why));
    CHECK(matches_schema(json(7), either, why));
    CHECK_FALSE(matches_schema(json(1.5), either, why));

    json req = json::parse(R"({"type": "object", "required": ["a", "b"]})");
    CHECK(matches_schema(json::parse(R"({"a": 1, "b": 2})"), req, why));
    CHECK_FALSE(matches_schema(json::parse(R"({"a": 1})"), req, why));
    CHECK(why.find("missing required key \"b\"") != std::string::npos);

    json nested = json::parse(
        R"({"properties": {"a": {"properties": {"b": {"type": "string"}}}}})");
    CHECK_FALSE(matches_schema(json::parse(R"({"a": {"b": 3}})"), nested, why));
    CHECK(why.rfind("$.a.b", 0) == 0);

    json strict = json::parse(
        R"({"properties": {"a": {}}, "additionalProperties": false})");
    CHECK_FALSE(matches_schema(json::parse(R"({"a": 1, "zz": 2})"), strict, why));
    CHECK(why.find("unexpected key \"zz\"") != std::string::npos);
    json loose = json::parse(R"({"properties": {"a": {}}})");
    CHECK(matches_schema(json::parse(R"({"a": 1, "zz": 2})"), loose, why));

    json status = json::parse(R"({"enum": ["ok", "error"]})");
    CHECK(matches_schema(json("ok"), status, why));
    CHECK_FALSE(matches_schema(json("meh"), status, why));

    json list = json::parse(R"({"type": "array", "items": {"type": "integer"}})");
    CHECK(matches_schema(json::parse("[1, 2]"), list, why));
    CHECK_FALSE(matches_schema(json::parse(R"([1, 2, "x"])"), list, why));
    CHECK(why.rfind("$[2]", 0) == 0);
}

TEST_CASE("stat block serializes all four fields") {
    StatSummary s = wilson_interval(3, 10);
    json j = stat_json(s);
    CHECK(j["estimate"] == s.estimate);
    CHECK(j["lo"] == s.lo);
    CHECK(j["hi"] == s.hi);
    CHECK(j["n"] == 10);
    CHECK(j.size() == 4);
}

TEST_CASE("cell block: successful and failed cells") {
    SweepCellResult ok = make_ok_cell();
    json j = cell_json(ok);
    CHECK(j["status"] == "ok");
    CHECK(j["index"] == 0);
    for (const char* k : {"lattice_size", "initial_intensity", "quantized_intensity",
                          "quantization_error", "absorbance", "interactions",
                          "effective_interactions", "mode", "rotation_rad"})
        CHECK(j["params"].contains(k));
    CHECK(j["params"]["interactions"] == 100);
    CHECK(j["params"]["mode"] == "moves");
    CHECK(j["counts"]["trajectories"] == 2000);
    std::uint64_t outcome_sum = j["counts"]["absorbed_by_d1"].get<std::uint64_t>() +
                                j["counts"]["detected_by_d2"].get<std::uint64_t>() +
                                j["counts"]["transmitted_undetected"].get<std::uint64_t>();
    CHECK(outcome_sum == 2000);
    CHECK(j["sp"]["detected"].contains("estimate"));
    CHECK(j["cqm"].contains("detected"));
    CHECK(j["divergence"].contains("lo"));
    CHECK(j["effective"].contains("absorbance"));
    CHECK_FALSE(j.contains("error"));

    json f = cell_json(make_failed_cell());
    CHECK(f["status"] == "error");
    CHECK(f["error"] == "bad, very bad");
    CHECK(f["params"]["lattice_size"] == 40);
    CHECK_FALSE(f.contains("counts"));
    CHECK_FALSE(f.contains("sp"));

    DeviceConfig unl = ok.config;
    unl.interactions = kUnlimitedBudget;
    SweepCellResult cell2;
    cell2.config = unl;
    cell2.failed = true;
    CHECK(cell_json(cell2)["params"]["interactions"] == "unlimited");
}

TEST_CASE("report document is deterministic and execution-independent") {
    RunConfig cfg = matching_run_config();
    std::vector<SweepCellResult> cells = {make_ok_cell(), make_failed_cell()};
    json a = report_json(cfg, "sweep", cells);
    json b = report_json(cfg, "sweep", cells);
    CHECK(a.dump(2) == b.dump(2));
    CHECK(a["tool"] == "spinwalk");
    CHECK(a["version"] == "0.1.0");
    CHECK(a["command"] == "sweep");
    CHECK(a["config"] == cfg.echo());
    CHECK(a["cells"].size() == 2);
    std::string text = a.dump();
    CHECK(text.find("runtime") == std::string::npos);
    CHECK(text.find("threads") == std::string::npos);
    CHECK(text.find("elapsed") == std::string::npos);
}

TEST_CASE("artifact files: results csv and report json") {
    RunConfig cfg = matching_run_config();
    std::vector<SweepCellResult> cells = {make_ok_cell(), make_failed_cell()};

    auto csv_path = temp_path("results.csv");
    write_results_csv(csv_path.string(), cfg, cells);
    std::vector<std::string> lines = lines_of(slurp(csv_path));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "# spinwalk 0.1.0 results");
    CHECK(lines[1].rfind("# config {", 0) == 0);
    CHECK(json::parse(lines[1].substr(9)) == cfg.echo());
    CHECK(std::count(lines[2].begin(), lines[2].end(), ',') == 31);
    CHECK(lines[2].rfind("cell,lattice_size,", 0) == 0);
    CHECK(lines[2].substr(lines[2].size() - 7) == ",status");
    CHECK(lines[3].rfind("0,40,0.5,0.5,0.3,100,moves,0.5,2000,", 0) == 0);
    CHECK(lines[3].substr(lines[3].size() - 3) == ",ok");
    // A failed cell keeps the parameter columns and quotes the error message.
    CHECK(lines[4].rfind("1,40,", 0) == 0);
    CHECK(lines[4].substr(lines[4].size() - 16) == ",\"bad, very bad\"");
    CHECK(lines[4].find(",,,,,") != std::string::npos);
    std::filesystem::remove(csv_path);

    auto json_path = temp_path("report.json");
    json rep = report_json(cfg, "run", cells);
    write_report_json(json_path.string(), rep);
    std::string text = slurp(json_path);
    CHECK(text.back() == '\n');
    CHECK(json::parse(text) == rep);
    std::filesystem::remove(json_path);
}
