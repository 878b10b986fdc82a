#include "symm/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "symm/error.hpp"

namespace symm {

double tolerance_grad(const Domain& domain) {
    const double h_ref = domain.extent() / 32.0;
    return 0.05 * domain.spacing() / h_ref;
}

double tolerance_measure(const Domain& domain) { return 3.0 * domain.cell_volume(); }

double gradient_distance(const GridFunction& u, const GridFunction& v, double p) {
    return std::pow(gradient_pnorm(u - v, p), 1.0 / p);
}

GridFunction shifted(const GridFunction& u, const LatticeIndex& shift) {
    const Domain& d = u.domain();
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c)) continue;
        LatticeIndex src = d.index_of(c);
        for (int k = 0; k < d.dimension(); ++k) src[static_cast<std::size_t>(k)] -= shift[static_cast<std::size_t>(k)];
        if (!d.in_lattice(src)) continue;
        const std::size_t s = d.cell_of(src);
        if (d.active(s)) out[c] = u[s];
    }
    return GridFunction(u.domain_ptr(), std::move(out));
}

namespace {

void require_nonnegative(const GridFunction& u, const char* what) {
    if (!u.nonnegative()) throw InvalidArgument(std::string(what) + " requires a nonnegative function");
}

double power(double x, double p) { return p == 2.0 ? x * x : std::pow(x, p); }

long long squared_length(const LatticeIndex& s) {
    long long acc = 0;
    for (int x : s) acc += static_cast<long long>(x) * x;
    return acc;
}

}  // namespace

Translation best_translation(const GridFunction& u, const GridFunction& u_star, double p) {
    if (!u.domain().same_lattice(u_star.domain())) throw InvalidArgument("best_translation: domains differ");
    require_nonnegative(u, "best_translation");
    require_nonnegative(u_star, "best_translation");
    const Domain& d = u.domain();
    const int n = d.cells_per_axis();
    const int dim = d.dimension();

    // Active cells and their lattice indices, gathered once.
    std::vector<std::size_t> cells;
    std::vector<LatticeIndex> idx;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c)) continue;
        cells.push_back(c);
        idx.push_back(d.index_of(c));
    }

    LatticeIndex shift{0, 0, 0};
    for (int k = 0; k < dim; ++k) shift[static_cast<std::size_t>(k)] = -(n - 1);
    LatticeIndex best{0, 0, 0};
    double best_err = std::numeric_limits<double>::infinity();

    for (;;) {
        double err = 0.0;
        for (std::size_t a = 0; a < cells.size() && err <= best_err; ++a) {
            LatticeIndex src = idx[a];
            for (int k = 0; k < dim; ++k) src[static_cast<std::size_t>(k)] -= shift[static_cast<std::size_t>(k)];
            double ref = 0.0;
            if (d.in_lattice(src)) {
                const std::size_t s = d.cell_of(src);
                if (d.active(s)) ref = u_star[s];
            }
            err += power(std::abs(u[cells[a]] - ref), p);
        }
        if (err < best_err || (err == best_err && squared_length(shift) < squared_length(best))) {
            best_err = err;
            best = shift;
        }
        int k = dim - 1;
        while (k >= 0 && ++shift[static_cast<std::size_t>(k)] > n - 1) {
            shift[static_cast<std::size_t>(k)] = -(n - 1);
            --k;
        }
        if (k < 0) break;
    }

    Translation out;
    out.shift = best;
    for (int k = 0; k < dim; ++k) out.tau[static_cast<std::size_t>(k)] = best[static_cast<std::size_t>(k)] * d.spacing();
    const double norm = lp_norm(u, p);
    const double err = std::pow(best_err * d.cell_volume(), 1.0 / p);
    out.defect = norm > 0.0 ? err / norm : 0.0;
    return out;
}

PolyaSzegoReport polya_szego_check(const GridFunction& u, const Integrand& j) {
    require_nonnegative(u, "polya_szego_check");
    PolyaSzegoReport r;
    r.original = j_energy(u, j);
    r.rearranged = j_energy(schwarz_rearrange(u), j);
    r.slack = r.original - r.rearranged;
    r.passed = r.slack >= -1e-10 * std::max(1.0, std::abs(r.original));
    return r;
}

PolarizationIdentityReport polarization_identity_check(const ProfileSpec& spec, const HalfSpace& h, const Integrand& j,
                                                       const NonlinearityModel& F, const ConstraintModel& G,
                                                       int refinements) {
    if (refinements < 1) throw InvalidArgument("refinements must be at least 1");
    if (!spec.profile) throw InvalidArgument("polarization_identity_check needs a profile");
    PolarizationIdentityReport r;
    bool exact_ok = true;
    for (int level = 0; level < refinements; ++level) {
        const int n = spec.cells_per_axis << level;
        const DomainPtr d = make_domain(spec.kind, spec.extent, spec.dimension, n);
        if (!is_lattice_exact(h, *d)) {
            throw InvalidArgument("half-space is not lattice-exact at " + std::to_string(n) + " cells per axis");
        }
        const GridFunction u = GridFunction::sample(d, spec.profile);
        require_nonnegative(u, "polarization_identity_check");
        const GridFunction uh = polarize(u, h);

        PolarizationLevel lv;
        lv.cells_per_axis = n;
        lv.spacing = d->spacing();
        const double ju = j_energy(u, j);
        const double pu = gradient_pnorm(u, j.p());
        lv.gap_j = ju > 0.0 ? std::abs(j_energy(uh, j) - ju) / ju : 0.0;
        lv.gap_p = pu > 0.0 ? std::abs(gradient_pnorm(uh, j.p()) - pu) / pu : 0.0;
        const double gu = g_constraint(u, G);
        lv.delta_g = std::abs(g_constraint(uh, G) - gu);
        const double fu = f_term(u, F);
        lv.delta_f = f_term(uh, F) - fu;
        exact_ok = exact_ok && lv.delta_g <= 1e-12 * std::max(1.0, gu) && lv.delta_f >= -1e-12 * std::max(1.0, std::abs(fu));
        r.levels.push_back(lv);
    }

    r.exact_zero = std::all_of(r.levels.begin(), r.levels.end(),
                               [](const PolarizationLevel& l) { return l.gap_j == 0.0 && l.gap_p == 0.0; });
    bool rates_ok = r.levels.size() >= 2;
    for (std::size_t i = 1; i < r.levels.size(); ++i) {
        const auto ratio = [](double a, double b) {
            return b > 0.0 ? a / b : std::numeric_limits<double>::infinity();
        };
        const double rj = ratio(r.levels[i - 1].gap_j, r.levels[i].gap_j);
        const double rp = ratio(r.levels[i - 1].gap_p, r.levels[i].gap_p);
        r.ratios_j.push_back(rj);
        r.ratios_p.push_back(rp);
        rates_ok = rates_ok && rj >= 1.5 && rj <= 3.0 && rp >= 1.5 && rp <= 3.0;
    }
    r.passed = exact_ok && (r.exact_zero || rates_ok);
    return r;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::SymmetricUpToTranslation: return "SymmetricUpToTranslation";
        case Verdict::InconclusivePositiveCriticalSet: return "Inconclusive_PositiveCriticalSet";
        case Verdict::Failed: return "Failed";
    }
    return "Failed";
}

Verdict parse_verdict(std::string_view name) {
    for (Verdict v : {Verdict::SymmetricUpToTranslation, Verdict::InconclusivePositiveCriticalSet, Verdict::Failed}) {
        if (to_string(v) == name) return v;
    }
    throw InvalidArgument("unknown verdict '" + std::string(name) + "'");
}

IdentityTolerances default_identity_tolerances(const Domain& domain) {
    return IdentityTolerances{tolerance_grad(domain), tolerance_measure(domain), kToleranceSymmetry};
}

IdentityCaseReport identity_case_check(const GridFunction& u, double p, double grad_eps,
                                       const IdentityTolerances& tol) {
    require_nonnegative(u, "identity_case_check");
    if (!(p >= 1.0)) throw InvalidArgument("identity_case_check: p must be >= 1");
    if (!(tol.grad > 0.0 && tol.measure > 0.0 && tol.symmetry > 0.0)) {
        throw InvalidArgument("identity_case_check: tolerances must be positive");
    }
    const GridFunction u_star = schwarz_rearrange(u);
    IdentityCaseReport r;
    r.tolerances = tol;
    r.grad_eps = grad_eps;
    r.gradient_norm = std::pow(gradient_pnorm(u, p), 1.0 / p);
    r.gradient_norm_star = std::pow(gradient_pnorm(u_star, p), 1.0 / p);
    r.delta = r.gradient_norm > 0.0 ? std::abs(r.gradient_norm - r.gradient_norm_star) / r.gradient_norm : 0.0;
    r.critical_measure = critical_set_measure(u_star, grad_eps);
    r.translation = best_translation(u, u_star, p);

    if (r.delta > tol.grad) {
        r.verdict = Verdict::Failed;
        r.reason = "gradient norms of u and u* differ beyond tol_grad";
    } else if (r.critical_measure > tol.measure) {
        r.verdict = Verdict::InconclusivePositiveCriticalSet;
        r.reason = "u* has a critical set of positive measure";
    } else if (r.translation.defect <= tol.symmetry) {
        r.verdict = Verdict::SymmetricUpToTranslation;
        r.reason = "u matches a translate of u*";
    } else {
        r.verdict = Verdict::Failed;
        r.reason = "no lattice translate of u* matches u";
    }
    return r;
}

IdentityCaseReport identity_case_check(const GridFunction& u, double p) {
    const GridFunction u_star = schwarz_rearrange(u);
    return identity_case_check(u, p, default_grad_eps(u_star), default_identity_tolerances(u.domain()));
}

const InvariantCheck* SymmetryReport::find(std::string_view name) const noexcept {
    for (const auto& c : invariants) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

std::vector<Point> start_centers(const Domain& d, const SymmetryOptions& opts) {
    std::vector<Point> centers{opts.init.center};
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-0.3, 0.3);
    for (int s = 0; s < opts.extra_starts; ++s) {
        Point c{0.0, 0.0, 0.0};
        for (int k = 0; k < d.dimension(); ++k) c[static_cast<std::size_t>(k)] = unit(rng) * d.extent();
        centers.push_back(c);
    }
    return centers;
}

InvariantCheck max_relative_drift(std::string name, const std::vector<double>& trace, double tol) {
    InvariantCheck c{std::move(name), 0.0, tol, true};
    const double ref = std::max(std::abs(trace.front()), std::numeric_limits<double>::min());
    for (double v : trace) c.worst = std::max(c.worst, std::abs(v - trace.front()) / ref);
    c.passed = c.worst <= tol;
    return c;
}

/// Largest step in the forbidden direction: sign +1 flags increases, -1 decreases.
InvariantCheck monotone(std::string name, const std::vector<double>& trace, int sign, double tol) {
    InvariantCheck c{std::move(name), 0.0, tol, true};
    const double ref = std::max(1.0, std::abs(trace.front()));
    for (std::size_t m = 1; m < trace.size(); ++m) {
        c.worst = std::max(c.worst, sign * (trace[m] - trace[m - 1]) / ref);
    }
    c.passed = c.worst <= tol;
    return c;
}

}  // namespace

namespace {
void analyze(const GridFunction& u, const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
             const SymmetryOptions& opts, SymmetryReport& rep);
}  // namespace

SymmetryReport run_symmetry_experiment(const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
                                       const DomainPtr& domain, const SymmetryOptions& opts) {
    const Domain& d = *domain;
    SymmetryReport rep;

    GrowthSampling sampling;
    sampling.dimension = d.dimension();
    sampling.kind = d.kind();
    const GrowthReport growth = growth_validate(j, F, G, sampling, 2000, opts.seed);
    rep.warnings = growth.warnings;
    for (const auto& check : growth.checks) {
        if (!check.passed && !check.skipped) rep.warnings.push_back("growth condition " + check.name + " violated");
    }

    // Multi-start minimization; starts are independent, so any thread count gives the same result.
    const std::vector<Point> centers = start_centers(d, opts);
    std::vector<std::optional<MinimizeResult>> results(centers.size());
    std::vector<std::exception_ptr> errors(centers.size());
    auto solve = [&](std::size_t s) {
        try {
            const GridFunction init =
                project_to_constraint(smooth_bump(domain, centers[s], opts.init.radius_fraction * d.extent()), G);
            SolverOptions so = opts.solver;
            if (s > 0) so.max_iters = std::min(so.max_iters, opts.extra_start_max_iters);
            results[s] = minimize(j, F, G, domain, init, so);
        } catch (...) {
            errors[s] = std::current_exception();
        }
    };
    const std::size_t workers =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, opts.threads)), 1, centers.size());
    if (workers == 1) {
        for (std::size_t s = 0; s < centers.size(); ++s) solve(s);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t s = next++; s < centers.size(); s = next++) solve(s);
            });
        }
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::optional<MinimizeResult> best;
    for (std::size_t s = 0; s < centers.size(); ++s) {
        MinimizeResult& r = *results[s];
        rep.basins.push_back(Basin{centers[s], r.energy, r.lambda, r.iterations, r.converged});
        const bool better = !best || (r.converged && !best->converged) ||
                            (r.converged == best->converged && r.energy < best->energy);
        if (better) best = std::move(r);
    }
    const GridFunction& u = best->u;
    rep.energy = best->energy;
    rep.lambda = best->lambda;
    rep.solver_converged = best->converged;
    rep.solver_iterations = best->iterations;
    rep.projected_gradient_norm = best->projected_gradient_norm;
    if (!best->converged) rep.warnings.push_back("solver did not reach grad_tol");
    analyze(u, j, F, G, opts, rep);
    return rep;
}

namespace {

void analyze(const GridFunction& u, const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
             const SymmetryOptions& opts, SymmetryReport& rep) {
    const Domain& d = u.domain();
    const double p = j.p();
    rep.tail_norm = tail_norm(u, p);
    if (rep.tail_norm > 1e-2 * lp_norm(u, p)) {
        rep.warnings.push_back("more than 1% of ||u||_p sits in the outer shell; the domain may truncate u");
    }

    // Iterated polarization of the minimizer.
    const GridFunction u_star = schwarz_rearrange(u);
    rep.j_energy = {j_energy(u, j)};
    rep.grad_pnorm = {gradient_pnorm(u, p)};
    rep.lp_distance = {lp_norm(u - u_star, p)};
    rep.f_term = {f_term(u, F)};
    rep.constraint = {g_constraint(u, G)};
    rep.grad_distance = {gradient_distance(u, u_star, p)};

    const PolarizerSequence seq = polarizer_sequence(PolarizerMode::LatticeExact, opts.seed, opts.polarizer_count, d);
    IteratedPolarizationOptions ipo;
    ipo.p = p;
    ipo.energy = [&](const GridFunction& v) { return j_energy(v, j); };
    ipo.observer = [&](int, const GridFunction& v) {
        rep.f_term.push_back(f_term(v, F));
        rep.constraint.push_back(g_constraint(v, G));
        rep.grad_distance.push_back(gradient_distance(v, u_star, p));
    };
    const IteratedPolarization ip = iterated_polarization(u, seq, opts.polarizer_tol, opts.polarizer_steps, ipo);
    rep.j_energy.insert(rep.j_energy.end(), ip.trace.energy.begin(), ip.trace.energy.end());
    rep.grad_pnorm.insert(rep.grad_pnorm.end(), ip.trace.gradient_pnorm.begin(), ip.trace.gradient_pnorm.end());
    rep.lp_distance.insert(rep.lp_distance.end(), ip.trace.distance.begin(), ip.trace.distance.end());

    rep.tolerances = opts.tolerances.value_or(default_identity_tolerances(d));
    rep.tol_grad = rep.tolerances.grad;

    InvariantCheck constraint{"constraint_exact", 0.0, 1e-10, true};
    for (double g : rep.constraint) constraint.worst = std::max(constraint.worst, std::abs(g - rep.constraint.front()));
    constraint.passed = constraint.worst <= constraint.tolerance;
    rep.invariants.push_back(constraint);
    rep.invariants.push_back(max_relative_drift("grad_pnorm_constant", rep.grad_pnorm, rep.tol_grad));
    rep.invariants.push_back(max_relative_drift("j_energy_constant", rep.j_energy, rep.tol_grad));
    rep.invariants.push_back(monotone("lp_distance_nonincreasing", rep.lp_distance, +1, 1e-12));
    rep.invariants.push_back(monotone("grad_pnorm_nonincreasing", rep.grad_pnorm, +1, 1e-12));
    rep.invariants.push_back(monotone("f_term_nondecreasing", rep.f_term, -1, 1e-12));
    {
        const double scale = std::pow(gradient_pnorm(u_star, p), 1.0 / p);
        InvariantCheck gc{"gradient_convergence", 0.0, 5.0 * rep.tol_grad, true};
        gc.worst = scale > 0.0 ? rep.grad_distance.back() / scale : 0.0;
        gc.passed = gc.worst <= gc.tolerance;
        rep.invariants.push_back(gc);
    }

    // Identity case on the minimizer.
    const double eps = opts.grad_eps.value_or(default_grad_eps(u_star));
    const IdentityCaseReport id = identity_case_check(u, p, eps, rep.tolerances);
    for (int k = 0; k < d.dimension(); ++k) rep.translation.push_back(id.translation.tau[static_cast<std::size_t>(k)]);
    rep.symmetry_defect = id.translation.defect;
    rep.critical_measure = id.critical_measure;
    rep.gradient_delta = id.delta;
    rep.verdict = id.verdict;
    rep.reason = id.reason;

    if (!rep.solver_converged) {
        rep.verdict = Verdict::Failed;
        rep.reason = "solver did not converge";
    } else {
        for (const auto& c : rep.invariants) {
            if (!c.passed) {
                rep.verdict = Verdict::Failed;
                rep.reason = "invariant " + c.name + " violated";
                break;
            }
        }
    }
    rep.u = u;
    rep.u_star = u_star;
}

}  // namespace

SymmetryReport analyze_function(const GridFunction& u, const Integrand& j, const NonlinearityModel& F,
                                const ConstraintModel& G, const SymmetryOptions& opts) {
    if (!u.nonnegative()) throw InvalidArgument("analyze_function needs a nonnegative function");
    SymmetryReport rep;
    rep.energy = total_energy(u, j, F);
    rep.lambda = std::numeric_limits<double>::quiet_NaN();  // not a critical point
    rep.solver_converged = true;
    analyze(u, j, F, G, opts, rep);
    return rep;
}

CounterexampleFixture make_counterexample_fixture(const DomainPtr& domain) {
    const Domain& d = *domain;
    if (d.dimension() != 1) throw InvalidArgument("counterexample fixture needs a 1D domain");
    const int n = d.cells_per_axis();
    if (n < 64) throw InvalidArgument("counterexample fixture needs at least 64 cells");

    // One half, outside in: zeros, rising ramp, shelf at 1/2, rising cap.
    const int zeros = n / 16;
    const int ramp = n / 8;
    const int shelf = n / 8;
    const int cap = n / 2 - zeros - ramp - shelf;
    const int shift = shelf / 2;

    std::vector<double> ramp_values(static_cast<std::size_t>(ramp));
    for (int i = 0; i < ramp; ++i) ramp_values[static_cast<std::size_t>(i)] = 0.5 * (i + 1) / (ramp + 1);
    std::vector<double> cap_values(static_cast<std::size_t>(cap));
    for (int i = 0; i < cap; ++i) cap_values[static_cast<std::size_t>(i)] = 0.5 + 0.5 * (i + 1) / cap;

    auto build = [&](int left_shelf, int right_shelf) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(n));
        v.insert(v.end(), static_cast<std::size_t>(zeros), 0.0);
        v.insert(v.end(), ramp_values.begin(), ramp_values.end());
        v.insert(v.end(), static_cast<std::size_t>(left_shelf), 0.5);
        v.insert(v.end(), cap_values.begin(), cap_values.end());
        if (n % 2 == 1) v.push_back(1.0);
        v.insert(v.end(), cap_values.rbegin(), cap_values.rend());
        v.insert(v.end(), static_cast<std::size_t>(right_shelf), 0.5);
        v.insert(v.end(), ramp_values.rbegin(), ramp_values.rend());
        v.insert(v.end(), static_cast<std::size_t>(zeros), 0.0);
        return GridFunction(domain, std::move(v));
    };

    CounterexampleFixture fx{build(shelf + shift, shelf - shift), build(shelf, shelf), 2.0 * shelf * d.spacing(), shift};
    return fx;
}

}  // namespace symm
