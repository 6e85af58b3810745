#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinwalk/config.hpp"
#include "spinwalk/harness.hpp"
#include "spinwalk/stats.hpp"

namespace spinwalk {

/// Shortest decimal that round-trips to the same double. Stable across runs,
/// which is what makes regenerated artifacts byte-comparable.
std::string format_double(double x);

/**
 * CSV with a '#' comment preamble, one header row, then data rows. The
 * preamble carries the config echo and seed so a file is reproducible from
 * itself. Cells containing separators or quotes are quoted RFC-4180 style.
 */
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    /// Flushes and verifies the stream; throws on write failure.
    void close();

private:
    void emit(const std::vector<std::string>& cells);
    std::ofstream out_;
    std::string path_;
    bool header_written_ = false;
};

/// Structural JSON schema check supporting the subset used by the shipped
/// schemas: type, properties, required, additionalProperties, items, enum.
/// On mismatch returns false and describes the first failure in `why`.
bool matches_schema(const nlohmann::json& doc, const nlohmann::json& schema, std::string& why);

nlohmann::json stat_json(const StatSummary& s);

/// Per-cell block of the run/sweep report.
nlohmann::json cell_json(const SweepCellResult& cell);

/// Full report document. Deterministic for fixed inputs: keys are sorted,
/// numbers are shortest-round-trip, and nothing execution-dependent (timing,
/// thread counts, paths) is included.
nlohmann::json report_json(const RunConfig& cfg, const std::string& command,
                           const std::vector<SweepCellResult>& cells);

void write_report_json(const std::string& path, const nlohmann::json& report);

/// One row per sweep cell with the estimates, intervals, and the projective
/// baseline side by side.
void write_results_csv(const std::string& path, const RunConfig& cfg,
                       const std::vector<SweepCellResult>& cells);

} // namespace spinwalk
