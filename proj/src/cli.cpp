#include "symm/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "symm/config.hpp"
#include "symm/error.hpp"
#include "symm/functional.hpp"
#include "symm/rearrange.hpp"
#include "symm/report.hpp"
#include "symm/verify.hpp"

namespace symm::cli {

int thread_cap() {
    if (const char* env = std::getenv("SYMMETRIZE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096) {
            throw InvalidArgument(std::string("SYMMETRIZE_THREADS must be a positive integer, got '") + env + "'");
        }
        return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int run(const std::string& config_path, const std::filesystem::path& out_dir, std::ostream& out,
        std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_config(config_path);
        const ExperimentOutcome outcome = execute(cfg, thread_cap());
        const std::filesystem::path report = write_outputs(outcome, cfg, out_dir);
        out << outcome.summary << " report=" << report.string() << '\n';
        return outcome.passed ? kExitPass : kExitFail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

namespace {

GridFunction load_nonnegative(const std::string& path) {
    GridFunction u = read_csv_file(path);
    if (!u.nonnegative()) throw InvalidArgument(path + ": the checkers need a nonnegative function");
    return u;
}

int polya_szego(const CheckOptions& opts, std::ostream& out) {
    const GridFunction u = load_nonnegative(opts.input);
    const PolyaSzegoReport r = polya_szego_check(u, IntegrandModel::p_dirichlet(opts.p));
    out.precision(17);
    out << "rearranged=" << r.rearranged << " original=" << r.original << " slack=" << r.slack << ' '
        << (r.passed ? "PASS" : "FAIL") << '\n';
    return r.passed ? kExitPass : kExitFail;
}

int polarization(const CheckOptions& opts, std::ostream& out) {
    const GridFunction u = load_nonnegative(opts.input);
    const Domain& d = u.domain();
    std::vector<double> normal = opts.normal;
    if (normal.empty()) {
        normal.assign(static_cast<std::size_t>(d.dimension()), 0.0);
        normal[0] = 1.0;
    }
    HalfSpaceSpec spec{normal, opts.offset.value_or(d.spacing())};
    const HalfSpace h = spec.build(d.dimension());
    const GridFunction uh = polarize(u, h);
    const double original = gradient_pnorm(u, opts.p);
    const double polarized = gradient_pnorm(uh, opts.p);
    const double slack = original - polarized;
    const ConstraintModel g(2.0);
    const double delta_g = std::abs(g_constraint(uh, g) - g_constraint(u, g));
    const bool passed = slack >= -1e-12 * std::max(1.0, original) && delta_g <= 1e-12 * std::max(1.0, g_constraint(u, g));
    out.precision(17);
    out << "polarized=" << polarized << " original=" << original << " slack=" << slack << " delta_g=" << delta_g
        << " lattice_exact=" << (is_lattice_exact(h, d) ? "true" : "false") << ' ' << (passed ? "PASS" : "FAIL")
        << '\n';
    return passed ? kExitPass : kExitFail;
}

int identity_case(const CheckOptions& opts, std::ostream& out) {
    const GridFunction u = load_nonnegative(opts.input);
    const Verdict expected = parse_verdict(opts.expect.value_or(to_string(Verdict::SymmetricUpToTranslation)));
    const GridFunction u_star = schwarz_rearrange(u);
    const double eps = opts.grad_eps.value_or(default_grad_eps(u_star));
    const IdentityCaseReport r = identity_case_check(u, opts.p, eps, default_identity_tolerances(u.domain()));
    out.precision(17);
    out << "gradient_norm=" << r.gradient_norm << " gradient_norm_star=" << r.gradient_norm_star
        << " delta=" << r.delta << " critical_measure=" << r.critical_measure << " defect=" << r.translation.defect
        << " translation=";
    for (int k = 0; k < u.domain().dimension(); ++k) {
        out << (k ? "," : "") << r.translation.tau[static_cast<std::size_t>(k)];
    }
    out << " verdict=" << to_string(r.verdict) << ' ' << (r.verdict == expected ? "PASS" : "FAIL") << '\n';
    return r.verdict == expected ? kExitPass : kExitFail;
}

}  // namespace

int check(CheckKind kind, const CheckOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.grad_eps && !(*opts.grad_eps > 0.0)) throw InvalidArgument("--grad-eps must be positive");
        switch (kind) {
            case CheckKind::PolyaSzego: return polya_szego(opts, out);
            case CheckKind::Polarization: return polarization(opts, out);
            case CheckKind::IdentityCase: return identity_case(opts, out);
        }
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete symmetrization experiments", "symmetrize"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment config");
    run_cmd->add_option("--config", config_path, "TOML experiment config")->required();
    run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string checker;
    CheckOptions opts;
    CLI::App* check_cmd = app.add_subcommand("check", "Check a stored GridFunction CSV");
    const std::map<std::string, CheckKind> kinds{{"polya-szego", CheckKind::PolyaSzego},
                                                 {"polarization", CheckKind::Polarization},
                                                 {"identity-case", CheckKind::IdentityCase}};
    check_cmd->add_option("checker", checker, "polya-szego, polarization or identity-case")
        ->required()
        ->check(CLI::IsMember({"polya-szego", "polarization", "identity-case"}));
    check_cmd->add_option("--input", opts.input, "GridFunction CSV")->required();
    check_cmd->add_option("--p", opts.p, "Exponent p")->capture_default_str();
    check_cmd->add_option("--grad-eps", opts.grad_eps, "Critical-set threshold on |Du*|");
    check_cmd->add_option("--normal", opts.normal, "Half-space normal (polarization)")->delimiter(',');
    check_cmd->add_option("--offset", opts.offset, "Half-space offset (polarization)");
    check_cmd->add_option("--expect", opts.expect, "Verdict counted as a pass (identity-case)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitError;
    }
    if (*run_cmd) return run(config_path, out_dir, out, err);
    return check(kinds.at(checker), opts, out, err);
}

}  // namespace symm::cli
