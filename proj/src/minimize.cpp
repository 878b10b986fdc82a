#include "symm/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "symm/error.hpp"

namespace symm {

void SolverOptions::validate() const {
    if (max_iters < 1) throw InvalidArgument("solver max_iters must be positive");
    if (!(step0 > 0.0)) throw InvalidArgument("solver step0 must be positive");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) throw InvalidArgument("backtrack_factor must lie in (0,1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidArgument("armijo_c must lie in (0,1)");
    if (!(grad_tol > 0.0)) throw InvalidArgument("grad_tol must be positive");
    if (!(constraint_tol > 0.0)) throw InvalidArgument("constraint_tol must be positive");
    if (!(metric_length >= 0.0) || !std::isfinite(metric_length)) throw InvalidArgument("metric_length must be >= 0");
}

GridFunction project_to_constraint(const GridFunction& u, const ConstraintModel& G) {
    const double mass = g_constraint(u, G);
    if (!(mass > 1e-14)) throw ZeroConstraintMass("int G(u) vanishes; cannot scale onto the constraint");
    return u.scaled(std::pow(mass, -1.0 / G.q()));
}

GridFunction default_init(const DomainPtr& domain, const ConstraintModel& G) {
    return project_to_constraint(smooth_bump(domain, Point{0.0, 0.0, 0.0}, 0.5 * domain->extent()), G);
}

GridFunction multiplier_test_function(const GridFunction& u) {
    const Domain& d = u.domain();
    const auto top = std::max_element(u.values().begin(), u.values().end());
    const auto cell = static_cast<std::size_t>(top - u.values().begin());
    return smooth_bump(u.domain_ptr(), d.center(cell), 0.25 * d.extent());
}

double multiplier_cutoff_scale(const GridFunction& u) { return std::max(1.0, u.max()); }

namespace {

double inner(const GridFunction& a, const GridFunction& b) {
    const Domain& d = a.domain();
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        if (d.active(c)) s += a[c] * b[c];
    }
    return s * d.cell_volume();
}

GridFunction clamp_nonneg(const GridFunction& u) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x = std::max(x, 0.0);
    return GridFunction(u.domain_ptr(), std::move(v));
}

struct Descent {
    GridFunction direction;  // preconditioned tangential gradient, zeroed where the clamp is active
    double mu = 0.0;
    double norm = 0.0;       // L2 norm of the unpreconditioned tangential gradient
};

// (I + alpha A) z = r by conjugate gradients, A = D^T D with zero extension.
class Preconditioner {
public:
    Preconditioner(DomainPtr domain, double alpha, double rtol, int max_iters)
        : domain_(std::move(domain)), alpha_(alpha), rtol_(rtol), max_iters_(max_iters) {
        if (!identity()) build_stencil();
    }

    bool identity() const noexcept { return alpha_ == 0.0; }

    GridFunction solve(const GridFunction& r) const {
        if (identity()) return r;
        if (domain_->dimension() == 1) return solve_tridiagonal(r);
        const std::size_t n = r.size();
        std::vector<double> x(n, 0.0), res(r.values().begin(), r.values().end()), dir = res;
        double rr = dot(res, res);
        const double stop = rtol_ * rtol_ * rr;
        for (int k = 0; k < max_iters_ && rr > stop && rr > 0.0; ++k) {
            const std::vector<double> ad = apply(dir);
            const double a = rr / dot(dir, ad);
            for (std::size_t c = 0; c < n; ++c) {
                x[c] += a * dir[c];
                res[c] -= a * ad[c];
            }
            const double rr_new = dot(res, res);
            const double b = rr_new / rr;
            for (std::size_t c = 0; c < n; ++c) dir[c] = res[c] + b * dir[c];
            rr = rr_new;
        }
        return GridFunction(domain_, std::move(x));
    }

private:
    // Thomas algorithm; the 1D stencil couples only lattice neighbours.
    GridFunction solve_tridiagonal(const GridFunction& r) const {
        const Domain& d = *domain_;
        const std::size_t n = r.size();
        std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), x(r.values().begin(), r.values().end());
        for (std::size_t c = 0; c < n; ++c) {
            if (!d.active(c)) continue;
            diag[c] = diagonal_;
            if (c > 0 && d.active(c - 1)) lower[c] = off_;
            if (c + 1 < n && d.active(c + 1)) upper[c] = off_;
        }
        for (std::size_t c = 1; c < n; ++c) {
            const double m = lower[c] / diag[c - 1];
            diag[c] -= m * upper[c - 1];
            x[c] -= m * x[c - 1];
        }
        x[n - 1] /= diag[n - 1];
        for (std::size_t c = n - 1; c-- > 0;) x[c] = (x[c] - upper[c] * x[c + 1]) / diag[c];
        return GridFunction(domain_, std::move(x));
    }

    // Zero extension makes every active cell see 2N edges; inactive or off-lattice
    // neighbours contribute zero.
    void build_stencil() {
        const Domain& d = *domain_;
        const std::size_t n = d.cell_count();
        offsets_.assign(n + 1, 0);
        for (std::size_t c = 0; c < n; ++c) {
            offsets_[c + 1] = offsets_[c];
            if (!d.active(c)) continue;
            const LatticeIndex idx = d.index_of(c);
            for (int k = 0; k < d.dimension(); ++k) {
                for (int sgn : {-1, 1}) {
                    LatticeIndex nb = idx;
                    nb[static_cast<std::size_t>(k)] += sgn;
                    if (!d.in_lattice(nb)) continue;
                    const std::size_t m = d.cell_of(nb);
                    if (!d.active(m)) continue;
                    neighbours_.push_back(m);
                    ++offsets_[c + 1];
                }
            }
        }
        diagonal_ = 1.0 + alpha_ * 2.0 * d.dimension() / (d.spacing() * d.spacing());
        off_ = -alpha_ / (d.spacing() * d.spacing());
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        const Domain& d = *domain_;
        std::vector<double> out(v.size(), 0.0);
        for (std::size_t c = 0; c < v.size(); ++c) {
            if (!d.active(c)) continue;
            double acc = diagonal_ * v[c];
            for (std::size_t e = offsets_[c]; e < offsets_[c + 1]; ++e) acc += off_ * v[neighbours_[e]];
            out[c] = acc;
        }
        return out;
    }

    double dot(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
        return s;
    }

    DomainPtr domain_;
    double alpha_;
    double rtol_;
    int max_iters_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> neighbours_;
    double diagonal_ = 1.0;
    double off_ = 0.0;
};

Descent descent_direction(const GridFunction& u, const Integrand& j, const NonlinearityModel& F,
                          const ConstraintModel& G, bool nonneg, const Preconditioner& P) {
    const Domain& d = u.domain();
    const GridFunction grad = energy_gradient(u, j, F);
    const GridFunction gg = constraint_gradient(u, G);
    const double gg2 = inner(gg, gg);
    Descent out{grad, 0.0, 0.0};
    out.mu = gg2 > 0.0 ? inner(grad, gg) / gg2 : 0.0;

    // Cells pinned by the clamp drop out of both the direction and its measurement.
    std::vector<char> pinned(u.size(), 0);
    std::vector<double> tangent(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c)) continue;
        const double t = grad[c] - out.mu * gg[c];
        pinned[c] = nonneg && u[c] <= 0.0 && t > 0.0;
        tangent[c] = pinned[c] ? 0.0 : t;
    }
    GridFunction tg(u.domain_ptr(), std::move(tangent));
    out.norm = std::sqrt(inner(tg, tg));
    if (P.identity()) {
        out.direction = std::move(tg);
        return out;
    }

    // Riemannian gradient in the H1-type metric (I + alpha A): P^-1 grad minus its
    // component along P^-1 g, so that the step stays tangent to the constraint.
    const GridFunction pg = P.solve(grad);
    const GridFunction pc = P.solve(gg);
    const double pcg = inner(pc, gg);
    const double beta = pcg > 0.0 ? inner(pg, gg) / pcg : 0.0;
    std::vector<double> dir(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c) || pinned[c]) continue;
        dir[c] = pg[c] - beta * pc[c];
    }
    out.direction = GridFunction(u.domain_ptr(), std::move(dir));
    return out;
}

}  // namespace

MinimizeResult minimize(const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
                        const DomainPtr& domain, const GridFunction& init, const SolverOptions& opts) {
    opts.validate();
    if (!init.domain().same_lattice(*domain)) throw InvalidArgument("initial guess lives on a different domain");

    auto admissible = [&](const GridFunction& v) {
        return project_to_constraint(opts.enforce_nonneg ? clamp_nonneg(v) : v, G);
    };

    GridFunction u = admissible(init);
    double energy = total_energy(u, j, F);
    MinimizeResult result{u, 0.0, energy, {energy}, 0.0, 0, false, 0.0, 0.0};

    const Preconditioner P(domain, opts.metric_length * opts.metric_length, 1e-10, 5000);
    Descent dir = descent_direction(u, j, F, G, opts.enforce_nonneg, P);
    double tau = opts.step0;
    std::optional<GridFunction> prev_u;
    std::optional<GridFunction> prev_dir;

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        const double residual = std::abs(g_constraint(u, G) - 1.0);
        if (dir.norm <= opts.grad_tol && residual <= opts.constraint_tol) {
            result.converged = true;
            break;
        }
        if (prev_u && prev_dir) {
            const GridFunction s = u - *prev_u;
            const GridFunction y = dir.direction - *prev_dir;
            const double sy = inner(s, y);
            tau = sy > 0.0 ? inner(s, s) / sy : 2.0 * tau;
        }

        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            const GridFunction trial = admissible(u - dir.direction.scaled(tau));
            const double e_trial = total_energy(trial, j, F);
            const GridFunction step = trial - u;
            if (std::isfinite(e_trial) && e_trial <= energy - opts.armijo_c / tau * inner(step, step)) {
                prev_u = u;
                prev_dir = dir.direction;
                u = trial;
                energy = e_trial;
                accepted = true;
                break;
            }
            tau *= opts.backtrack_factor;
        }
        if (!accepted) break;  // line search stalled at rounding level
        if (energy < opts.energy_floor) {
            throw EnergyDiverged("energy " + std::to_string(energy) + " fell below the floor " +
                                 std::to_string(opts.energy_floor) + "; the problem is likely unbounded below");
        }
        result.energy_trace.push_back(energy);
        dir = descent_direction(u, j, F, G, opts.enforce_nonneg, P);
    }
    if (!result.converged) {
        const double residual = std::abs(g_constraint(u, G) - 1.0);
        result.converged = dir.norm <= opts.grad_tol && residual <= opts.constraint_tol;
    }

    result.u = u;
    result.energy = energy;
    result.iterations = it;
    result.constraint_residual = std::abs(g_constraint(u, G) - 1.0);
    result.projected_gradient_norm = dir.norm;
    result.lambda_from_gradient = dir.mu;
    result.lambda = multiplier_estimate(u, j, F, G, multiplier_test_function(u), multiplier_cutoff_scale(u));
    return result;
}

}  // namespace symm
