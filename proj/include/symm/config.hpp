#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symm/functional.hpp"
#include "symm/grid.hpp"
#include "symm/minimize.hpp"
#include "symm/verify.hpp"

namespace symm {

enum class ExperimentKind { Symmetry, PolyaSzego, PolarizationIdentity, IdentityCase, Counterexample };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct DomainSpec {
    DomainKind kind = DomainKind::Ball;
    double extent = 1.0;
    int dimension = 1;
    int cells_per_axis = 128;

    DomainPtr build() const { return make_domain(kind, extent, dimension, cells_per_axis); }
};

struct ModelSpec {
    IntegrandFamily j_family = IntegrandFamily::PDirichlet;
    double p = 2.0;
    double kappa = 0.0;
    NonlinearityFamily f_family = NonlinearityFamily::Zero;
    double sigma = 2.0;
    double c = 0.0;
    RadialWeight weight = RadialWeight::Decreasing;
    double q = 2.0;

    IntegrandModel integrand() const { return IntegrandModel(j_family, p, kappa); }
    NonlinearityModel nonlinearity() const;
    ConstraintModel constraint() const { return ConstraintModel(q); }
};

enum class ProfileFamily { Bump, TiltedBump, Tent, TwoBump };

std::string to_string(ProfileFamily family);
ProfileFamily parse_profile_family(std::string_view name);

/**
 * Closed-form nonnegative test profiles, evaluable at any resolution.
 *   Bump:       a * bump(|x - c| / r)
 *   TiltedBump: a * bump(|x - c| / r) * (1 + tilt (x_0 - c_0)), needs |tilt| r < 1
 *   Tent:       a * max(0, 1 - |x - c| / r)
 *   TwoBump:    bumps of radius r at c -+ (separation / 2) e_0
 */
struct ProfileConfig {
    ProfileFamily family = ProfileFamily::Bump;
    Point center{0.0, 0.0, 0.0};
    double radius = 0.5;
    double amplitude = 1.0;
    double tilt = 0.0;
    double separation = 1.0;

    std::function<double(const Point&)> function() const;
};

struct HalfSpaceSpec {
    std::vector<double> normal{1.0};
    double offset = 0.5;

    HalfSpace build(int dimension) const;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Symmetry;
    std::uint64_t seed = 0;
    int polarizer_count = 500;
    int polarizer_steps = 2000;
    double polarizer_tol = 1e-6;
    int extra_starts = 2;
    int extra_start_max_iters = 2000;
    Point init_center{0.0, 0.0, 0.0};
    double init_radius = 0.5;
    std::optional<double> grad_eps;
    std::optional<double> tol_grad;
    std::optional<double> tol_measure;
    std::optional<double> tol_symmetry;
    std::optional<Verdict> expect;
    ProfileConfig profile;
    HalfSpaceSpec halfspace;
    int refinements = 3;

    /// Verdict that counts as a pass: `expect` when set, otherwise Inconclusive for the
    /// counterexample and SymmetricUpToTranslation for the rest.
    Verdict expected_verdict() const;
};

struct OutputSpec {
    bool traces = true;          ///< per-trace `step,value` CSV files
    bool grid_functions = true;  ///< u and u* as GridFunction CSV
    bool record_runtime = false; ///< runtime_ms is null unless set, keeping reports byte-stable
};

struct ExperimentConfig {
    std::string name = "experiment";
    DomainSpec domain;
    ModelSpec model;
    SolverOptions solver;
    ExperimentSpec experiment;
    OutputSpec output;

    SymmetryOptions symmetry_options(int threads) const;
    IdentityTolerances identity_tolerances(const Domain& domain) const;
};

/// Parses and validates a TOML experiment config. Throws FormatError naming the line and
/// field on syntax errors, unknown keys, wrong types or out-of-range values.
ExperimentConfig parse_config(std::string_view toml_text, std::string_view source_name = "config");
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON echo of a parsed config (embedded in every report).
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace symm
