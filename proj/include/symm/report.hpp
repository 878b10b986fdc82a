#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "symm/config.hpp"
#include "symm/grid.hpp"
#include "symm/verify.hpp"

namespace symm {

using Trace = std::pair<std::string, std::vector<double>>;

/// Result of one experiment, ready to be written out.
struct ExperimentOutcome {
    nlohmann::json report;
    std::vector<Trace> traces;
    std::optional<GridFunction> u;
    std::optional<GridFunction> u_star;
    bool passed = false;
    std::string summary;  ///< one line, no trailing newline
};

/// Report fields shared by the symmetry and counterexample runs.
nlohmann::json to_json(const SymmetryReport& rep);
std::vector<Trace> traces_of(const SymmetryReport& rep);

/**
 * Runs the experiment named by cfg.experiment.kind. Solver divergence is reported as a Failed
 * verdict inside the outcome; invalid input still throws.
 */
ExperimentOutcome execute(const ExperimentConfig& cfg, int threads = 1);

/// `step,value` rows, values printed round-trip exact.
void write_trace_csv(const std::vector<double>& trace, const std::filesystem::path& path);
std::vector<double> read_trace_csv(const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline. Equal input gives equal bytes.
std::string dump_report(const nlohmann::json& report);

/**
 * Writes <name>.json, <name>_<trace>.csv per trace (when enabled) and <name>_u.csv,
 * <name>_u_star.csv (when enabled). Returns the report path.
 */
std::filesystem::path write_outputs(const ExperimentOutcome& outcome, const ExperimentConfig& cfg,
                                    const std::filesystem::path& out_dir);

}  // namespace symm
