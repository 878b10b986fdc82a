#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace symm::cli {

/// Exit codes of `run` and `check`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

/// SYMMETRIZE_THREADS when set (a positive integer), otherwise the hardware concurrency.
int thread_cap();

/// Parses the config, runs the experiment, writes the report and CSVs into out_dir and prints
/// a one-line summary. Nothing is written when the config or the run is invalid.
int run(const std::string& config_path, const std::filesystem::path& out_dir, std::ostream& out,
        std::ostream& err);

enum class CheckKind { PolyaSzego, Polarization, IdentityCase };

struct CheckOptions {
    std::string input;                  ///< GridFunction CSV
    double p = 2.0;
    std::optional<double> grad_eps;
    std::vector<double> normal;         ///< polarization only; defaults to e_0
    std::optional<double> offset;       ///< polarization only; defaults to one cell
    std::optional<std::string> expect;  ///< identity-case only; defaults to SymmetricUpToTranslation
};

/// One-off checkers on a stored function. Prints both sides and the slack.
int check(CheckKind kind, const CheckOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line: `run --config <path> --out <dir>` and
/// `check <polya-szego|polarization|identity-case> --input <csv> [...]`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symm::cli
