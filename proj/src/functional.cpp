#include "symm/functional.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "symm/error.hpp"

namespace symm {

// --- models -----------------------------------------------------------------

std::string to_string(IntegrandFamily family) {
    return family == IntegrandFamily::PDirichlet ? "PDirichlet" : "WeightedP";
}

IntegrandFamily parse_integrand_family(std::string_view name) {
    if (name == "PDirichlet") return IntegrandFamily::PDirichlet;
    if (name == "WeightedP") return IntegrandFamily::WeightedP;
    throw InvalidArgument("unknown integrand family '" + std::string(name) + "'");
}

IntegrandModel::IntegrandModel(IntegrandFamily family, double p, double kappa)
    : family_(family), p_(p), kappa_(family == IntegrandFamily::WeightedP ? kappa : 0.0) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("integrand exponent p must exceed 1");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be nonnegative");
}

std::string IntegrandModel::name() const {
    std::ostringstream os;
    os << to_string(family_) << "(p=" << p_;
    if (family_ == IntegrandFamily::WeightedP) os << ", kappa=" << kappa_;
    os << ')';
    return os.str();
}

double IntegrandModel::weight(double s) const noexcept {
    const double s2 = s * s;
    return 1.0 + kappa_ * s2 / (1.0 + s2);
}

double IntegrandModel::value(double s, double t) const { return weight(s) * std::pow(t, p_); }

double IntegrandModel::ds(double s, double t) const {
    if (kappa_ == 0.0) return 0.0;
    const double q = 1.0 + s * s;
    return kappa_ * (2.0 * s / (q * q)) * std::pow(t, p_);
}

double IntegrandModel::dt(double s, double t) const { return p_ * weight(s) * std::pow(t, p_ - 1.0); }

double IntegrandModel::convexity_modulus(double s, double t1, double t2, double t_max) const {
    const double d = std::abs(t1 - t2);
    // p >= 2: scalar Clarkson inequality; p < 2: second derivative bounded below on [0, t_max].
    const double base = p_ >= 2.0 ? std::pow(0.5 * d, p_) : p_ * (p_ - 1.0) * std::pow(t_max, p_ - 2.0) * d * d / 8.0;
    return weight(s) * base;
}

std::string to_string(NonlinearityFamily family) {
    switch (family) {
        case NonlinearityFamily::Zero: return "Zero";
        case NonlinearityFamily::PurePower: return "PurePower";
        case NonlinearityFamily::RadialWeighted: return "RadialWeighted";
    }
    return "Zero";
}

NonlinearityFamily parse_nonlinearity_family(std::string_view name) {
    if (name == "Zero") return NonlinearityFamily::Zero;
    if (name == "PurePower") return NonlinearityFamily::PurePower;
    if (name == "RadialWeighted") return NonlinearityFamily::RadialWeighted;
    throw InvalidArgument("unknown nonlinearity family '" + std::string(name) + "'");
}

NonlinearityModel::NonlinearityModel(NonlinearityFamily family, double sigma, double c, RadialWeight weight)
    : family_(family), sigma_(sigma), c_(c), weight_kind_(weight) {
    if (family != NonlinearityFamily::Zero) {
        if (!(sigma >= 1.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be at least 1");
        if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("nonlinearity coefficient must be nonnegative");
    } else {
        c_ = 0.0;
    }
}

double NonlinearityModel::weight(double r) const noexcept {
    if (family_ != NonlinearityFamily::RadialWeighted) return 1.0;
    const double r2 = r * r;
    return weight_kind_ == RadialWeight::Decreasing ? 1.0 / (1.0 + r2) : r2 / (1.0 + r2);
}

double NonlinearityModel::max_weight() const noexcept { return 1.0; }

double NonlinearityModel::F(double r, double s) const noexcept {
    if (is_zero()) return 0.0;
    return c_ * weight(r) * std::pow(std::abs(s), sigma_);
}

double NonlinearityModel::f(double r, double s) const noexcept {
    if (is_zero() || s == 0.0) return 0.0;
    return sigma_ * c_ * weight(r) * std::pow(std::abs(s), sigma_ - 1.0) * (s > 0.0 ? 1.0 : -1.0);
}

ConstraintModel::ConstraintModel(double q) : q_(q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidArgument("constraint exponent q must be at least 1");
}

double ConstraintModel::G(double s) const noexcept { return std::pow(std::abs(s), q_); }

double ConstraintModel::g(double s) const noexcept {
    if (s == 0.0) return 0.0;
    return q_ * std::pow(std::abs(s), q_ - 1.0) * (s > 0.0 ? 1.0 : -1.0);
}

double cutoff(double s) noexcept {
    const double tau = std::clamp(std::abs(s) - 1.0, 0.0, 1.0);
    return 1.0 - 3.0 * tau * tau + 2.0 * tau * tau * tau;
}

double cutoff_derivative(double s) noexcept {
    const double a = std::abs(s);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double tau = a - 1.0;
    return (s > 0.0 ? 1.0 : -1.0) * 6.0 * tau * (tau - 1.0);
}

// --- flux helpers -----------------------------------------------------------

namespace {

constexpr double kGradientFloor = 1e-12;

// j_t(s, |xi|) xi / |xi| scaled onto `out`; zero when xi = 0.
double flux_scale(const Integrand& j, double s, double t) {
    if (t == 0.0) return 0.0;
    return j.dt(s, t) / std::max(t, kGradientFloor);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// s attributed to lattice cell c: mean of u over c and its forward neighbours (zero extension).
std::vector<double> cell_states(const GridFunction& u) {
    const Domain& d = u.domain();
    const int dim = d.dimension();
    std::vector<double> s(d.cell_count(), 0.0);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const LatticeIndex idx = d.index_of(c);
        double acc = u[c];
        for (int k = 0; k < dim; ++k) {
            if (idx[static_cast<std::size_t>(k)] + 1 < d.cells_per_axis()) acc += u[c + d.stride(k)];
        }
        s[c] = acc / (dim + 1);
    }
    return s;
}

// Ghost cell below c on a lower face: only u[c] enters its stencil.
double ghost_state(const Domain& d, double uc) { return uc / (d.dimension() + 1); }

// v averaged over the same stencil as cell_states.
double stencil_mean(const Domain& d, const GridFunction& v, std::size_t c) {
    const LatticeIndex idx = d.index_of(c);
    double acc = v[c];
    for (int k = 0; k < d.dimension(); ++k) {
        if (idx[static_cast<std::size_t>(k)] + 1 < d.cells_per_axis()) acc += v[c + d.stride(k)];
    }
    return acc / (d.dimension() + 1);
}

// sum over the zero-extended lattice of w(s) b(s, Du) . Dv, times h^N.
template <class Weight>
double flux_pairing(const GridFunction& u, const std::vector<double>& states, const VectorField& du,
                    const GridFunction& v, const VectorField& dv, const Integrand& j, Weight&& w) {
    const Domain& d = u.domain();
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const double t = du.norm_at(c);
        const double scale = flux_scale(j, states[c], t);
        if (scale == 0.0) continue;
        s += w(states[c]) * scale * dot(du.at(c), dv.at(c));
    }
    const double inv_h = 1.0 / d.spacing();
    for_each_inflow_edge(d, [&](std::size_t c, int) {
        const double xi = u[c] * inv_h;
        const double sg = ghost_state(d, u[c]);
        s += w(sg) * flux_scale(j, sg, std::abs(xi)) * xi * (v[c] * inv_h);
    });
    return s * d.cell_volume();
}

// sum of w(s) j_s(s, |Du|) times the stencil mean of v, ghosts included, times h^N.
template <class Weight>
double state_pairing(const GridFunction& u, const std::vector<double>& states, const VectorField& du,
                     const GridFunction& v, Weight&& w) {
    const Domain& d = u.domain();
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const double vm = stencil_mean(d, v, c);
        if (vm != 0.0) s += w(states[c], du.norm_at(c)) * vm;
    }
    const double inv_h = 1.0 / d.spacing();
    for_each_inflow_edge(d, [&](std::size_t c, int) {
        if (v[c] == 0.0) return;
        s += w(ghost_state(d, u[c]), std::abs(u[c]) * inv_h) * ghost_state(d, v[c]);
    });
    return s * d.cell_volume();
}

void require_same_domain(const GridFunction& a, const GridFunction& b) {
    if (!a.domain().same_lattice(b.domain())) throw InvalidArgument("grid functions live on different domains");
}

}  // namespace

FluxOperator::FluxOperator(GridFunction u, std::shared_ptr<const Integrand> j, CutoffSpec cutoff)
    : u_(std::move(u)), j_(std::move(j)), cutoff_(cutoff) {
    if (!j_) throw InvalidArgument("FluxOperator requires an integrand");
    if (!(cutoff_.scale >= 1.0)) throw InvalidArgument("cutoff scale k must be at least 1");
}

double FluxOperator::cutoff_weight(std::size_t cell) const noexcept { return cutoff(u_[cell] / cutoff_.scale); }

Point FluxOperator::operator()(std::size_t cell, const Point& xi) const noexcept {
    const int dim = u_.domain().dimension();
    double t2 = 0.0;
    for (int k = 0; k < dim; ++k) t2 += xi[static_cast<std::size_t>(k)] * xi[static_cast<std::size_t>(k)];
    const double t = std::sqrt(t2);
    const double scale = cutoff_weight(cell) * flux_scale(*j_, u_[cell], t);
    Point b{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) b[static_cast<std::size_t>(k)] = scale * xi[static_cast<std::size_t>(k)];
    return b;
}

double FluxOperator::bound(double xi_norm) const noexcept {
    return j_->gamma(2.0 * cutoff_.scale) * std::pow(xi_norm, j_->p() - 1.0);
}

// --- evaluators -------------------------------------------------------------

double j_energy(const GridFunction& u, const Integrand& j) {
    const Domain& d = u.domain();
    const VectorField du = gradient(u);
    const std::vector<double> states = cell_states(u);
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) s += j.value(states[c], du.norm_at(c));
    const double inv_h = 1.0 / d.spacing();
    for_each_inflow_edge(d, [&](std::size_t c, int) { s += j.value(ghost_state(d, u[c]), std::abs(u[c]) * inv_h); });
    return s * d.cell_volume();
}

double f_term(const GridFunction& u, const NonlinearityModel& F) {
    if (F.is_zero()) return 0.0;
    const Domain& d = u.domain();
    std::vector<double> vals(d.cell_count(), 0.0);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (d.active(c)) vals[c] = F.F(d.radius(c), u[c]);
    }
    return integrate(vals, d);
}

double g_constraint(const GridFunction& u, const ConstraintModel& G) {
    const Domain& d = u.domain();
    std::vector<double> vals(d.cell_count(), 0.0);
    for (std::size_t c = 0; c < d.cell_count(); ++c) vals[c] = G.G(u[c]);
    return integrate(vals, d);
}

double total_energy(const GridFunction& u, const Integrand& j, const NonlinearityModel& F) {
    return j_energy(u, j) - f_term(u, F);
}

double directional_derivative(const GridFunction& u, const GridFunction& v, const Integrand& j) {
    require_same_domain(u, v);
    const VectorField du = gradient(u);
    const VectorField dv = gradient(v);
    const std::vector<double> states = cell_states(u);
    return flux_pairing(u, states, du, v, dv, j, [](double) { return 1.0; }) +
           state_pairing(u, states, du, v, [&j](double s, double t) { return j.ds(s, t); });
}

FirstVariation directional_derivative(const GridFunction& u, const GridFunction& v, const Integrand& j,
                                      const NonlinearityModel& F, const ConstraintModel& G) {
    FirstVariation out;
    out.j_part = directional_derivative(u, v, j);
    const Domain& d = u.domain();
    double fs = 0.0;
    double gs = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (!d.active(c) || v[c] == 0.0) continue;
        fs += F.f(d.radius(c), u[c]) * v[c];
        gs += G.g(u[c]) * v[c];
    }
    out.f_part = fs * d.cell_volume();
    out.g_part = gs * d.cell_volume();
    return out;
}

GridFunction energy_gradient(const GridFunction& u, const Integrand& j, const NonlinearityModel& F) {
    const Domain& d = u.domain();
    const int dim = d.dimension();
    const double inv_h = 1.0 / d.spacing();
    const double share = 1.0 / (dim + 1);
    const VectorField du = gradient(u);
    const std::vector<double> states = cell_states(u);

    // b and j_s at every lattice cell.
    std::vector<double> flux(d.cell_count() * static_cast<std::size_t>(dim), 0.0);
    std::vector<double> js(d.cell_count(), 0.0);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const double t = du.norm_at(c);
        const double scale = flux_scale(j, states[c], t);
        for (int k = 0; k < dim; ++k) flux[c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = scale * du(c, k);
        js[c] = j.ds(states[c], t) * share;
    }

    std::vector<double> grad(d.cell_count(), 0.0);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (!d.active(c)) continue;
        const LatticeIndex idx = d.index_of(c);
        double g = js[c] - F.f(d.radius(c), u[c]);
        for (int k = 0; k < dim; ++k) {
            const double own = flux[c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
            double behind = 0.0;
            if (idx[static_cast<std::size_t>(k)] > 0) {
                const std::size_t b = c - d.stride(k);
                behind = flux[b * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
                g += js[b];
            } else {
                const double xi = u[c] * inv_h;
                const double sg = ghost_state(d, u[c]);
                behind = flux_scale(j, sg, std::abs(xi)) * xi;
                g += j.ds(sg, std::abs(xi)) * share;
            }
            g += (behind - own) * inv_h;
        }
        grad[c] = g;
    }
    return GridFunction(u.domain_ptr(), std::move(grad));
}

GridFunction constraint_gradient(const GridFunction& u, const ConstraintModel& G) {
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) g[c] = G.g(u[c]);
    return GridFunction(u.domain_ptr(), std::move(g));
}

GridFunction cutoff_test_function(const GridFunction& u, const GridFunction& v, double k) {
    if (!(k >= 1.0)) throw InvalidArgument("cutoff scale k must be at least 1");
    require_same_domain(u, v);
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) out[c] = cutoff(u[c] / k) * v[c];
    return GridFunction(u.domain_ptr(), std::move(out));
}

double el_residual(const GridFunction& u, double lambda, const GridFunction& phi, const Integrand& j,
                   const NonlinearityModel& F, const ConstraintModel& G) {
    const FirstVariation fv = directional_derivative(u, phi, j, F, G);
    return fv.j_part - fv.f_part - lambda * fv.g_part;
}

MultiplierTerms multiplier_terms(const GridFunction& u, const Integrand& j, const NonlinearityModel& F,
                                 const ConstraintModel& G, const GridFunction& v, double k) {
    if (!(k >= 1.0)) throw InvalidArgument("cutoff scale k must be at least 1");
    require_same_domain(u, v);
    const Domain& d = u.domain();
    const VectorField du = gradient(u);
    const VectorField dv = gradient(v);

    const std::vector<double> states = cell_states(u);

    MultiplierTerms t;
    t.i1 = flux_pairing(u, states, du, v, dv, j, [k](double s) { return cutoff(s / k); });
    t.i2 = state_pairing(u, states, du, v, [&j, k](double s, double tn) {
        return cutoff(s / k) * j.ds(s, tn) + cutoff_derivative(s / k) * j.dt(s, tn) * tn / k;
    });

    double i3 = 0.0;
    double den = 0.0;
    double v2 = 0.0;
    double g2 = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (!d.active(c)) continue;
        const double gu = G.g(u[c]);
        v2 += v[c] * v[c];
        g2 += gu * gu;
        if (v[c] == 0.0) continue;
        const double hc = cutoff(u[c] / k);
        i3 -= F.f(d.radius(c), u[c]) * hc * v[c];
        den += gu * hc * v[c];
    }
    const double vol = d.cell_volume();
    t.i3 = i3 * vol;
    t.denominator = den * vol;
    const double scale = std::sqrt(v2 * vol) * std::sqrt(g2 * vol);
    if (!(std::abs(t.denominator) >= 1e-10 * scale) || scale == 0.0) {
        throw DegenerateTestFunction("int g(u) H(u/k) v vanishes; choose a test function overlapping the support of u");
    }
    t.lambda = (t.i1 + t.i2 + t.i3) / t.denominator;
    return t;
}

double multiplier_estimate(const GridFunction& u, const Integrand& j, const NonlinearityModel& F,
                           const ConstraintModel& G, const GridFunction& v, double k) {
    return multiplier_terms(u, j, F, G, v, k).lambda;
}

double w1p_norm(const GridFunction& phi, double p) {
    return lp_norm(phi, p) + std::pow(gradient_pnorm(phi, p), 1.0 / p);
}

std::vector<GridFunction> bump_basket(const DomainPtr& domain, int count, std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("basket size must be positive");
    const double r = domain->extent();
    const int dim = domain->dimension();
    std::vector<GridFunction> basket;
    basket.reserve(static_cast<std::size_t>(count));
    if (dim == 1) {
        constexpr double radii[] = {0.15, 0.25, 0.35};
        for (int i = 0; i < count; ++i) {
            const double c = count == 1 ? 0.0 : -0.7 * r + 1.4 * r * i / (count - 1);
            const double rad = std::min(radii[i % 3] * r, 0.9 * (r - std::abs(c)));
            basket.push_back(smooth_bump(domain, Point{c, 0.0, 0.0}, rad));
        }
        return basket;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> size(0.15, 0.35);
    while (static_cast<int>(basket.size()) < count) {
        Point c{0.0, 0.0, 0.0};
        double n2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            c[static_cast<std::size_t>(k)] = 0.6 * r * unit(rng);
            n2 += c[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k)];
        }
        if (n2 > 0.36 * r * r) continue;
        const double rad = std::min(size(rng) * r, 0.9 * (r - std::sqrt(n2)));
        basket.push_back(smooth_bump(domain, c, rad));
    }
    return basket;
}

// --- monotone operator -------------------------------------------------------

MonotoneReport monotone_operator_check(const FluxOperator& flux, int samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidArgument("monotone_operator_check needs at least one sample");
    const GridFunction& u = flux.state();
    const Domain& d = u.domain();
    const int dim = d.dimension();

    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (d.active(c)) cells.push_back(c);
    }
    const VectorField du = gradient(u);
    double span_xi = 1.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) span_xi = std::max(span_xi, 2.0 * du.norm_at(c));

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_real_distribution<double> comp(-span_xi, span_xi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    MonotoneReport report;
    for (int i = 0; i < samples; ++i) {
        const std::size_t c = cells[pick(rng)];
        Point xi{0.0, 0.0, 0.0};
        Point xi2{0.0, 0.0, 0.0};
        for (int k = 0; k < dim; ++k) {
            xi[static_cast<std::size_t>(k)] = comp(rng);
            xi2[static_cast<std::size_t>(k)] = comp(rng);
        }
        const double mode = unit(rng);
        if (mode < 0.05) xi2 = xi;                     // equality case
        else if (mode < 0.10) xi = Point{0.0, 0.0, 0.0};  // b(x, 0) = 0 convention

        const Point b1 = flux(c, xi);
        const Point b2 = flux(c, xi2);
        double inner = 0.0;
        double diff2 = 0.0;
        double xn = 0.0;
        double bn = 0.0;
        for (int k = 0; k < dim; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            inner += (b1[kk] - b2[kk]) * (xi[kk] - xi2[kk]);
            diff2 += (xi[kk] - xi2[kk]) * (xi[kk] - xi2[kk]);
            xn += xi[kk] * xi[kk];
            bn += b1[kk] * b1[kk];
        }
        ++report.samples;
        report.min_inner = std::min(report.min_inner, inner);
        if (flux.cutoff_weight(c) > 0.0 && diff2 > 0.0) {
            ++report.strict_samples;
            if (!(inner > 0.0)) ++report.strict_failures;
        }
        const double bound = flux.bound(std::sqrt(xn));
        if (bound > 0.0) report.max_bound_ratio = std::max(report.max_bound_ratio, std::sqrt(bn) / bound);
    }
    return report;
}

// --- growth validation ------------------------------------------------------

double critical_exponent(double p, int dimension) noexcept {
    if (p >= dimension) return std::numeric_limits<double>::infinity();
    return dimension * p / (dimension - p);
}

bool GrowthReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const GrowthCheck& c) { return c.passed; });
}

const GrowthCheck* GrowthReport::find(std::string_view name) const noexcept {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

class SlackTracker {
public:
    SlackTracker(std::string name, double tol) : tol_(tol) { check_.name = std::move(name); }
    void observe(double slack, double scale = 1.0) {
        const double normalized = slack / std::max(1.0, scale);
        check_.worst_slack = std::min(check_.worst_slack, normalized);
        if (normalized < -tol_) check_.passed = false;
    }
    void strict(double slack, double scale = 1.0) {
        const double normalized = slack / std::max(1.0, scale);
        check_.worst_slack = std::min(check_.worst_slack, normalized);
        if (!(slack > 0.0)) check_.passed = false;
    }
    GrowthCheck done(std::string note = {}) {
        check_.note = std::move(note);
        return check_;
    }

private:
    GrowthCheck check_;
    double tol_;
};

GrowthCheck skipped(std::string name, std::string note) {
    GrowthCheck c;
    c.name = std::move(name);
    c.skipped = true;
    c.note = std::move(note);
    return c;
}

}  // namespace

GrowthReport growth_validate(const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
                             const GrowthSampling& box, int samples, std::uint64_t seed) {
    constexpr double tol = 1e-12;
    GrowthReport report;
    const double p = j.p();
    report.p_star = critical_exponent(p, box.dimension);
    report.p_star_infinite = std::isinf(report.p_star);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> s_dist(0.0, box.s_max);
    std::uniform_real_distribution<double> t_dist(0.0, box.t_max);
    std::uniform_real_distribution<double> r_dist(0.0, box.r_max);

    SlackTracker zero("vanishes_at_zero_gradient", tol);
    SlackTracker increasing("increasing_in_t", tol);
    SlackTracker convex("strictly_convex_in_t", tol);
    SlackTracker lower("lower_growth", tol);
    SlackTracker upper("upper_growth", tol);
    SlackTracker ds_growth("ds_growth", tol);
    SlackTracker dt_growth("dt_growth", tol);
    SlackTracker radial("f_radially_nonincreasing", tol);
    SlackTracker f_growth("f_critical_growth", tol);
    SlackTracker g_growth("g_growth", tol);
    SlackTracker nondegen("g_nondegenerate", tol);

    const double fc = F.sigma() * F.coefficient() * F.max_weight();
    for (int i = 0; i < samples; ++i) {
        const double s = s_dist(rng) * (i % 2 == 0 ? 1.0 : -1.0);
        const double t = t_dist(rng);
        double t2 = t_dist(rng);
        if (t2 == t) t2 = 0.5 * t;
        const double as = std::abs(s);
        const double tp = std::pow(t, p);

        const double jv = j.value(s, t);
        zero.observe(-std::abs(j.value(s, 0.0)));
        increasing.observe(j.dt(s, t));
        const double mid = j.value(s, 0.5 * (t + t2));
        const double chord = 0.5 * (jv + j.value(s, t2));
        convex.strict(chord - 0.5 * j.convexity_modulus(s, t, t2, box.t_max) - mid, chord);
        lower.observe(jv - j.alpha0() * tp, jv);
        upper.observe(j.alpha(as) * tp - jv, jv);
        ds_growth.observe(j.beta(as) * tp - std::abs(j.ds(s, t)), tp);
        dt_growth.observe(j.gamma(as) * std::pow(t, p - 1.0) - std::abs(j.dt(s, t)), std::pow(t, p - 1.0));

        if (!F.is_zero()) {
            // f(r, s) >= f(rho, s) for 0 <= s, r <= rho
            const double r1 = r_dist(rng);
            const double r2 = r_dist(rng);
            const double lo = std::min(r1, r2);
            const double hi = std::max(r1, r2);
            radial.observe(F.f(lo, as) - F.f(hi, as), F.f(lo, as));
            if (!report.p_star_infinite) {
                const double rhs = fc * (1.0 + std::pow(as, report.p_star - 1.0));
                f_growth.observe(rhs - std::abs(F.f(r1, s)), rhs);
            }
        }

        const double gv = std::abs(G.g(s));
        if (report.p_star_infinite) {
            if (as <= 1.0) g_growth.observe(G.q() * std::pow(as, p - 1.0) - gv, gv);
        } else {
            const double rhs = G.q() * (std::pow(as, p - 1.0) + std::pow(as, report.p_star - 1.0));
            g_growth.observe(rhs - gv, rhs);
        }
        if (s != 0.0) nondegen.strict(gv);
    }

    report.checks.push_back(zero.done());
    report.checks.push_back(increasing.done());
    report.checks.push_back(convex.done());
    report.checks.push_back(lower.done());
    report.checks.push_back(upper.done());
    report.checks.push_back(ds_growth.done());
    report.checks.push_back(dt_growth.done());
    if (F.is_zero()) {
        report.checks.push_back(skipped("f_radially_nonincreasing", "F = 0"));
        report.checks.push_back(skipped("f_critical_growth", "F = 0"));
    } else {
        report.checks.push_back(radial.done());
        report.checks.push_back(report.p_star_infinite ? skipped("f_critical_growth", "p >= N: p* = infinity, upper-critical growth not checked")
                                                       : f_growth.done());
    }
    report.checks.push_back(g_growth.done(report.p_star_infinite ? "p >= N: p* = infinity, checked on |s| <= 1 only" : ""));
    report.checks.push_back(nondegen.done());

    GrowthCheck qp;
    qp.name = "q_range";
    qp.worst_slack = G.q() - p;
    qp.passed = G.q() >= p && (report.p_star_infinite || G.q() <= report.p_star);
    report.checks.push_back(qp);

    if (F.family() == NonlinearityFamily::PurePower && !F.is_zero()) {
        const double sigma = F.sigma();
        const double upper_sigma = p + p * p / box.dimension;
        std::ostringstream os;
        if (box.kind == DomainKind::Box && !(sigma > p && sigma < upper_sigma)) {
            os << "sigma=" << sigma << " outside the scaling range (" << p << ", " << upper_sigma
               << "); the minimization may be ill-posed on R^N";
            report.warnings.push_back(os.str());
        } else if (box.kind == DomainKind::Ball && !(sigma > p)) {
            os << "sigma=" << sigma << " <= p=" << p;
            report.warnings.push_back(os.str());
        }
    }
    return report;
}

}  // namespace symm
