#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "symm/grid.hpp"

namespace symm {

/**
 * Integrand j(s, t) of the energy J(u) = int j(u, |Du|).
 *
 * Implementations must satisfy j(s, 0) = 0, t -> j(s, t) strictly convex and increasing, and
 * the growth envelopes
 *   alpha0 t^p <= j(s, t) <= alpha(|s|) t^p,  |j_s| <= beta(|s|) t^p,  |j_t| <= gamma(|s|) t^(p-1).
 * growth_validate() samples these before an integrand is used by the solver.
 */
class Integrand {
public:
    virtual ~Integrand() = default;

    virtual std::string name() const = 0;
    virtual double p() const = 0;
    virtual double value(double s, double t) const = 0;
    virtual double ds(double s, double t) const = 0;
    virtual double dt(double s, double t) const = 0;

    virtual double alpha0() const = 0;
    virtual double alpha(double tau) const = 0;
    virtual double beta(double tau) const = 0;
    virtual double gamma(double tau) const = 0;

    /// Lower bound on (j(s,t1) + j(s,t2))/2 - j(s,(t1+t2)/2) for t1, t2 in [0, t_max].
    virtual double convexity_modulus(double /*s*/, double /*t1*/, double /*t2*/, double /*t_max*/) const {
        return 0.0;
    }
};

enum class IntegrandFamily { PDirichlet, WeightedP };

std::string to_string(IntegrandFamily family);
IntegrandFamily parse_integrand_family(std::string_view name);

/// PDirichlet: t^p.  WeightedP: (1 + kappa s^2 / (1 + s^2)) t^p.
class IntegrandModel final : public Integrand {
public:
    IntegrandModel(IntegrandFamily family, double p, double kappa = 0.0);

    static IntegrandModel p_dirichlet(double p) { return IntegrandModel(IntegrandFamily::PDirichlet, p); }
    static IntegrandModel weighted_p(double p, double kappa) {
        return IntegrandModel(IntegrandFamily::WeightedP, p, kappa);
    }

    IntegrandFamily family() const noexcept { return family_; }
    double kappa() const noexcept { return kappa_; }

    std::string name() const override;
    double p() const override { return p_; }
    double value(double s, double t) const override;
    double ds(double s, double t) const override;
    double dt(double s, double t) const override;
    double alpha0() const override { return 1.0; }
    double alpha(double) const override { return 1.0 + kappa_; }
    double beta(double) const override { return kappa_; }
    double gamma(double) const override { return p_ * (1.0 + kappa_); }
    double convexity_modulus(double s, double t1, double t2, double t_max) const override;

private:
    double weight(double s) const noexcept;

    IntegrandFamily family_;
    double p_;
    double kappa_;
};

enum class NonlinearityFamily { Zero, PurePower, RadialWeighted };

/// Radial profile of the RadialWeighted family. Increasing breaks the monotonicity
/// f(r, s) >= f(rho, s) for r <= rho and exists as a negative control for growth_validate.
enum class RadialWeight { Decreasing, Increasing };

std::string to_string(NonlinearityFamily family);
NonlinearityFamily parse_nonlinearity_family(std::string_view name);

/// F(r, s) = c w(r) |s|^sigma with w = 1 (PurePower) or w(r) = 1 / (1 + r^2) (RadialWeighted).
class NonlinearityModel {
public:
    NonlinearityModel() = default;
    NonlinearityModel(NonlinearityFamily family, double sigma, double c,
                      RadialWeight weight = RadialWeight::Decreasing);

    static NonlinearityModel zero() { return {}; }
    static NonlinearityModel pure_power(double sigma, double c) {
        return NonlinearityModel(NonlinearityFamily::PurePower, sigma, c);
    }
    static NonlinearityModel radial_weighted(double sigma, double c, RadialWeight w = RadialWeight::Decreasing) {
        return NonlinearityModel(NonlinearityFamily::RadialWeighted, sigma, c, w);
    }

    NonlinearityFamily family() const noexcept { return family_; }
    double sigma() const noexcept { return sigma_; }
    double coefficient() const noexcept { return c_; }
    RadialWeight radial_weight() const noexcept { return weight_kind_; }
    bool is_zero() const noexcept { return family_ == NonlinearityFamily::Zero || c_ == 0.0; }

    double weight(double r) const noexcept;
    double max_weight() const noexcept;
    double F(double r, double s) const noexcept;
    double f(double r, double s) const noexcept;

private:
    NonlinearityFamily family_ = NonlinearityFamily::Zero;
    double sigma_ = 2.0;
    double c_ = 0.0;
    RadialWeight weight_kind_ = RadialWeight::Decreasing;
};

/// G(s) = |s|^q, g(s) = q |s|^(q-2) s.
class ConstraintModel {
public:
    explicit ConstraintModel(double q = 2.0);

    double q() const noexcept { return q_; }
    double G(double s) const noexcept;
    double g(double s) const noexcept;

private:
    double q_;
};

/// Smooth cutoff H: 1 on [-1, 1], 0 outside [-2, 2], cubic smoothstep between (|H'| <= 1.5).
double cutoff(double s) noexcept;
double cutoff_derivative(double s) noexcept;

struct CutoffSpec {
    double scale = 1.0;  ///< k >= 1; the cutoff is applied as H(u / k)
};

/// b(x, xi) = H(u(x)/k) j_t(u(x), |xi|) xi / |xi|, with b(x, 0) = 0.
class FluxOperator {
public:
    FluxOperator(GridFunction u, std::shared_ptr<const Integrand> j, CutoffSpec cutoff);

    const GridFunction& state() const noexcept { return u_; }
    const Integrand& integrand() const noexcept { return *j_; }
    const CutoffSpec& cutoff_spec() const noexcept { return cutoff_; }

    double cutoff_weight(std::size_t cell) const noexcept;
    Point operator()(std::size_t cell, const Point& xi) const noexcept;
    /// gamma(2k) |xi|^(p-1).
    double bound(double xi_norm) const noexcept;

private:
    GridFunction u_;
    std::shared_ptr<const Integrand> j_;
    CutoffSpec cutoff_;
};

// --- evaluators -------------------------------------------------------------
//
// The discrete J sums h^N j(s_c, |Du|_c) over every lattice cell c and every inflow ghost
// cell, where s_c is the mean of u over c and its forward neighbours (the edge midpoint
// in 1D). The symmetric stencil keeps J invariant under lattice reflections.

double j_energy(const GridFunction& u, const Integrand& j);
double f_term(const GridFunction& u, const NonlinearityModel& F);
double g_constraint(const GridFunction& u, const ConstraintModel& G);
double total_energy(const GridFunction& u, const Integrand& j, const NonlinearityModel& F);

/// First variation split into its pieces: int b.Dv + int j_s v, int f v and int g v.
struct FirstVariation {
    double j_part = 0.0;
    double f_part = 0.0;
    double g_part = 0.0;

    double energy() const noexcept { return j_part - f_part; }
};

/// J'(u)(v) = int j_t(s,|Du|) Du/|Du| . Dv + int j_s(s,|Du|) v_s, with v_s the stencil mean of
/// v; the exact derivative of the discrete J.
double directional_derivative(const GridFunction& u, const GridFunction& v, const Integrand& j);
FirstVariation directional_derivative(const GridFunction& u, const GridFunction& v, const Integrand& j,
                                      const NonlinearityModel& F, const ConstraintModel& G);

/// Cellwise L2 gradient of E: j_s - div_h b - f, with div_h the adjoint of the forward difference.
/// Satisfies h^N sum_c grad_c v_c == directional_derivative(u, v, j, F, G).energy().
GridFunction energy_gradient(const GridFunction& u, const Integrand& j, const NonlinearityModel& F);

/// g(u) cellwise: the L2 gradient of the constraint functional.
GridFunction constraint_gradient(const GridFunction& u, const ConstraintModel& G);

/// H(u / k) v.
GridFunction cutoff_test_function(const GridFunction& u, const GridFunction& v, double k);

/// int b.Dphi + int j_s phi - int f phi - lambda int g phi.
double el_residual(const GridFunction& u, double lambda, const GridFunction& phi, const Integrand& j,
                   const NonlinearityModel& F, const ConstraintModel& G);

struct MultiplierTerms {
    double i1 = 0.0;           ///< int H(s/k) j_t Du/|Du| . Dv
    double i2 = 0.0;           ///< int [H(s/k) j_s + H'(s/k) j_t |Du| / k] v_s
    double i3 = 0.0;           ///< -int f H(u/k) v
    double denominator = 0.0;  ///< int g(u) H(u/k) v
    double lambda = 0.0;
};

/// Multiplier obtained by testing the Euler-Lagrange identity with H(u/k) v.
/// Throws DegenerateTestFunction when |denominator| < 1e-10 ||v||_2 ||g(u)||_2.
MultiplierTerms multiplier_terms(const GridFunction& u, const Integrand& j, const NonlinearityModel& F,
                                 const ConstraintModel& G, const GridFunction& v, double k);
double multiplier_estimate(const GridFunction& u, const Integrand& j, const NonlinearityModel& F,
                           const ConstraintModel& G, const GridFunction& v, double k);

/// ||phi||_p + ||D phi||_p.
double w1p_norm(const GridFunction& phi, double p);

/// `count` smooth bumps inside the domain, deterministic for a given seed.
std::vector<GridFunction> bump_basket(const DomainPtr& domain, int count = 20, std::uint64_t seed = 0);

struct MonotoneReport {
    std::size_t samples = 0;
    double min_inner = std::numeric_limits<double>::infinity();
    std::size_t strict_samples = 0;       ///< samples with H(u/k) > 0 and xi != xi'
    std::size_t strict_failures = 0;      ///< of those, how many had inner product <= 0
    double max_bound_ratio = 0.0;         ///< max |b(x,xi)| / (gamma(2k) |xi|^(p-1))

    bool passed(double tol = 1e-12) const noexcept {
        return min_inner >= -tol && strict_failures == 0 && max_bound_ratio <= 1.0 + 1e-12;
    }
};

/// Samples (b(x,xi) - b(x,xi')).(xi - xi') over random cells and vectors.
MonotoneReport monotone_operator_check(const FluxOperator& flux, int samples, std::uint64_t seed);

/// p* = Np / (N - p), infinite when p >= N.
double critical_exponent(double p, int dimension) noexcept;

struct GrowthSampling {
    double s_max = 4.0;
    double t_max = 4.0;
    double r_max = 4.0;
    int dimension = 1;
    DomainKind kind = DomainKind::Box;
};

struct GrowthCheck {
    std::string name;
    double worst_slack = std::numeric_limits<double>::infinity();
    bool passed = true;
    bool skipped = false;
    std::string note;
};

struct GrowthReport {
    std::vector<GrowthCheck> checks;
    double p_star = std::numeric_limits<double>::infinity();
    bool p_star_infinite = true;
    std::vector<std::string> warnings;

    bool passed() const noexcept;
    const GrowthCheck* find(std::string_view name) const noexcept;
};

/// Samples every structural and growth condition on (j, F, G); report-only, never throws on violation.
GrowthReport growth_validate(const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
                             const GrowthSampling& sampling, int samples, std::uint64_t seed);

}  // namespace symm
