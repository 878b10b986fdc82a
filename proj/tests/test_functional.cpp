#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "symm/error.hpp"
#include "symm/functional.hpp"
#include "symm/rearrange.hpp"

using namespace symm;

namespace {

GridFunction smooth_random(const DomainPtr& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(0.2, 1.0), c(-0.3, 0.3), w(0.3, 0.6);
    const double amp = a(rng), cx = c(rng) * d->extent(), cy = c(rng) * d->extent(), r = w(rng) * d->extent();
    return GridFunction::sample(d, [=](const Point& x) {
        const double dx = x[0] - cx, dy = d->dimension() > 1 ? x[1] - cy : 0.0;
        return amp * smooth_bump_value(std::sqrt(dx * dx + dy * dy) / r) + 0.05 * amp * std::cos(x[0]);
    });
}

double dirichlet_pairing(const GridFunction& u, const GridFunction& v) {
    // 2 <Du, Dv> over lattice cells plus inflow edges.
    const VectorField du = gradient(u), dv = gradient(v);
    const Domain& d = u.domain();
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        for (int k = 0; k < d.dimension(); ++k) s += du(c, k) * dv(c, k);
    }
    for_each_inflow_edge(d, [&](std::size_t c, int) { s += u[c] * v[c] / (d.spacing() * d.spacing()); });
    return 2.0 * s * d.cell_volume();
}

}  // namespace

TEST(Models, Validation) {
    EXPECT_THROW(IntegrandModel::p_dirichlet(1.0), InvalidArgument);
    EXPECT_THROW(IntegrandModel::weighted_p(2.0, -0.1), InvalidArgument);
    EXPECT_THROW(NonlinearityModel::pure_power(0.5, 1.0), InvalidArgument);
    EXPECT_THROW(NonlinearityModel::pure_power(4.0, -1.0), InvalidArgument);
    EXPECT_THROW(ConstraintModel(0.5), InvalidArgument);
    EXPECT_THROW(parse_integrand_family("Lagrangian"), InvalidArgument);
    EXPECT_EQ(parse_nonlinearity_family("RadialWeighted"), NonlinearityFamily::RadialWeighted);
}

TEST(Models, WeightedPFormulas) {
    const IntegrandModel j = IntegrandModel::weighted_p(3.0, 0.5);
    const double s = 0.7, t = 1.3;
    const double w = 1.0 + 0.5 * s * s / (1.0 + s * s);
    EXPECT_NEAR(j.value(s, t), w * std::pow(t, 3.0), 1e-14);
    EXPECT_NEAR(j.ds(s, t), 0.5 * 2.0 * s / std::pow(1.0 + s * s, 2.0) * std::pow(t, 3.0), 1e-14);
    EXPECT_NEAR(j.dt(s, t), 3.0 * w * t * t, 1e-14);
    EXPECT_EQ(j.value(s, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(j.alpha(1.0), 1.5);
    EXPECT_DOUBLE_EQ(j.gamma(1.0), 4.5);
}

TEST(Models, NonlinearityAndConstraint) {
    const NonlinearityModel f = NonlinearityModel::radial_weighted(3.0, 2.0);
    EXPECT_NEAR(f.F(1.0, -2.0), 2.0 * 0.5 * 8.0, 1e-14);
    EXPECT_NEAR(f.f(1.0, -2.0), -3.0 * 2.0 * 0.5 * 4.0, 1e-14);
    EXPECT_TRUE(NonlinearityModel::zero().is_zero());
    const ConstraintModel g(3.0);
    EXPECT_DOUBLE_EQ(g.G(-2.0), 8.0);
    EXPECT_DOUBLE_EQ(g.g(-2.0), -12.0);
}

TEST(Cutoff, ShapeAndDerivative) {
    for (double s : {-1.0, 0.0, 0.5, 1.0}) EXPECT_EQ(cutoff(s), 1.0);
    for (double s : {2.0, -2.5, 7.0}) EXPECT_EQ(cutoff(s), 0.0);
    double worst = 0.0;
    for (double s = -2.5; s <= 2.5; s += 1e-3) {
        EXPECT_GE(cutoff(s), 0.0);
        EXPECT_LE(cutoff(s), 1.0);
        worst = std::max(worst, std::abs(cutoff_derivative(s)));
        const double fd = (cutoff(s + 1e-6) - cutoff(s - 1e-6)) / 2e-6;
        EXPECT_NEAR(cutoff_derivative(s), fd, 1e-5);
    }
    EXPECT_NEAR(worst, 1.5, 1e-3);
    EXPECT_NEAR(cutoff(1.5), 0.5, 1e-15);
}

TEST(Cutoff, TestFunction) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 8);
    const GridFunction v = GridFunction::sample(d, [](const Point& x) { return 1.0 + x[0]; });
    const GridFunction low = GridFunction::sample(d, [](const Point&) { return 0.9; });
    EXPECT_EQ(cutoff_test_function(low, v, 1.0), v);
    const GridFunction high = GridFunction::sample(d, [](const Point&) { return 4.0; });
    EXPECT_EQ(cutoff_test_function(high, v, 2.0), GridFunction::zeros(d));
    const GridFunction mid = GridFunction::sample(d, [](const Point& x) { return 1.0 + 0.4 * (x[0] + 1.0); });
    const GridFunction out = cutoff_test_function(mid, v, 1.0);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double tau = std::clamp(mid[c] - 1.0, 0.0, 1.0);
        EXPECT_NEAR(out[c], (1.0 - 3.0 * tau * tau + 2.0 * tau * tau * tau) * v[c], 1e-15);
    }
    EXPECT_THROW(cutoff_test_function(mid, v, 0.5), InvalidArgument);
}

TEST(Energy, HandExamples) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 4);  // h = 0.5
    const GridFunction u(d, {0.0, 1.0, 1.0, 0.0});
    EXPECT_DOUBLE_EQ(j_energy(u, IntegrandModel::p_dirichlet(2.0)), 4.0);
    EXPECT_DOUBLE_EQ(g_constraint(GridFunction(d, {1.0, 1.0, 1.0, 1.0}), ConstraintModel(2.0)), 2.0);
    const GridFunction zero = GridFunction::zeros(d);
    EXPECT_EQ(j_energy(zero, IntegrandModel::weighted_p(2.0, 0.5)), 0.0);
    EXPECT_EQ(f_term(zero, NonlinearityModel::pure_power(3.0, 1.0)), 0.0);
    EXPECT_EQ(g_constraint(zero, ConstraintModel(2.0)), 0.0);
    EXPECT_EQ(total_energy(u, IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero()), 4.0);
}

TEST(Energy, WeightedPWithZeroKappaIsDirichlet) {
    auto d = make_domain(DomainKind::Ball, 1.0, 2, 24);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 5; ++i) {
        const GridFunction u = smooth_random(d, rng);
        EXPECT_NEAR(j_energy(u, IntegrandModel::weighted_p(2.5, 0.0)), j_energy(u, IntegrandModel::p_dirichlet(2.5)),
                    1e-12 * j_energy(u, IntegrandModel::p_dirichlet(2.5)));
    }
}

TEST(Energy, OneDimensionalWeightedIsReflectionInvariant) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 64);
    std::mt19937_64 rng(2);
    const GridFunction u = smooth_random(d, rng);
    std::vector<double> rev(u.values().rbegin(), u.values().rend());
    const IntegrandModel j = IntegrandModel::weighted_p(2.0, 0.5);
    EXPECT_NEAR(j_energy(GridFunction(d, rev), j), j_energy(u, j), 1e-12 * j_energy(u, j));
}

TEST(Derivative, ZeroDirection) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 16);
    std::mt19937_64 rng(3);
    const GridFunction u = smooth_random(d, rng);
    EXPECT_EQ(directional_derivative(u, GridFunction::zeros(d), IntegrandModel::weighted_p(2.0, 0.5)), 0.0);
}

TEST(Derivative, DirichletIsBilinearForm) {
    std::mt19937_64 rng(4);
    for (auto d : {make_domain(DomainKind::Box, 1.0, 1, 32), make_domain(DomainKind::Ball, 1.0, 2, 16)}) {
        for (int i = 0; i < 5; ++i) {
            const GridFunction u = smooth_random(d, rng), v = smooth_random(d, rng);
            const double a = directional_derivative(u, v, IntegrandModel::p_dirichlet(2.0));
            EXPECT_NEAR(a, dirichlet_pairing(u, v), 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(Derivative, MatchesCentralDifferences) {
    std::mt19937_64 rng(5);
    const auto d1 = make_domain(DomainKind::Box, 1.0, 1, 48);
    const auto d2 = make_domain(DomainKind::Ball, 1.0, 2, 16);
    const IntegrandModel models[] = {IntegrandModel::p_dirichlet(2.0), IntegrandModel::p_dirichlet(3.0),
                                     IntegrandModel::weighted_p(2.0, 0.5), IntegrandModel::weighted_p(2.5, 1.0)};
    const NonlinearityModel f = NonlinearityModel::radial_weighted(3.0, 0.7);
    const ConstraintModel g(2.0);
    for (const auto& d : {d1, d2}) {
        for (const IntegrandModel& j : models) {
            const GridFunction u = smooth_random(d, rng), v = smooth_random(d, rng);
            const double t = 1e-4;
            const double fd = (total_energy(u + v.scaled(t), j, f) - total_energy(u - v.scaled(t), j, f)) / (2.0 * t);
            const double an = directional_derivative(u, v, j, f, g).energy();
            EXPECT_NEAR(an, fd, 1e-6 * std::abs(an)) << j.name();
        }
    }
}

TEST(Gradient, AgreesWithDirectionalDerivative) {
    std::mt19937_64 rng(6);
    for (auto d : {make_domain(DomainKind::Box, 1.0, 1, 40), make_domain(DomainKind::Ball, 1.2, 2, 14),
                   make_domain(DomainKind::Box, 1.0, 3, 6)}) {
        const IntegrandModel j = IntegrandModel::weighted_p(2.2, 0.8);
        const NonlinearityModel f = NonlinearityModel::pure_power(3.0, 0.5);
        const GridFunction u = smooth_random(d, rng), v = smooth_random(d, rng);
        const GridFunction grad = energy_gradient(u, j, f);
        double pairing = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c) {
            if (d->active(c)) pairing += grad[c] * v[c];
        }
        pairing *= d->cell_volume();
        const double dd = directional_derivative(u, v, j, f, ConstraintModel(2.0)).energy();
        EXPECT_NEAR(pairing, dd, 1e-10 * std::max(1.0, std::abs(dd)));
    }
}

TEST(Gradient, ConstraintGradientIsPointwise) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 8);
    const GridFunction u = GridFunction::sample(d, [](const Point& x) { return 1.0 + x[0]; });
    const GridFunction g = constraint_gradient(u, ConstraintModel(3.0));
    for (std::size_t c = 0; c < u.size(); ++c) EXPECT_DOUBLE_EQ(g[c], 3.0 * u[c] * u[c]);
}

TEST(ElResidual, AffineInLambda) {
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 64);
    std::mt19937_64 rng(7);
    const GridFunction u = smooth_random(d, rng), phi = smooth_random(d, rng);
    const IntegrandModel j = IntegrandModel::weighted_p(2.0, 0.5);
    const NonlinearityModel f = NonlinearityModel::pure_power(4.0, 1.0);
    const ConstraintModel g(2.0);
    const double r0 = el_residual(u, 0.0, phi, j, f, g);
    const double r1 = el_residual(u, 1.0, phi, j, f, g);
    const double r3 = el_residual(u, 3.0, phi, j, f, g);
    EXPECT_NEAR(r3 - r0, 3.0 * (r1 - r0), 1e-12 * std::max(1.0, std::abs(r3)));
    const double gphi = directional_derivative(u, phi, j, f, g).g_part;
    EXPECT_NEAR(r1 - r0, -gphi, 1e-12 * std::max(1.0, std::abs(gphi)));
    EXPECT_EQ(el_residual(GridFunction::zeros(d), 5.0, phi, j, f, g), 0.0);
}

TEST(ElResidual, EigenfunctionManufacturedSolution) {
    // The first variation of int |u'|^2 is -2u'' and g(u) = 2u, so cos(pi x / 2) solves the
    // identity with lambda = pi^2 / 4.
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 512);
    GridFunction u = GridFunction::sample(d, [](const Point& x) { return std::cos(M_PI * x[0] / 2.0); });
    u = u.scaled(1.0 / lp_norm(u, 2.0));
    const IntegrandModel j = IntegrandModel::p_dirichlet(2.0);
    const double lambda = M_PI * M_PI / 4.0;
    for (const GridFunction& phi : bump_basket(d, 20, 3)) {
        const double r = el_residual(u, lambda, phi, j, NonlinearityModel::zero(), ConstraintModel(2.0));
        EXPECT_LE(std::abs(r), 1e-3 * w1p_norm(phi, 2.0));
    }
}

TEST(Multiplier, EigenfunctionAndIndependenceOfTestFunction) {
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 512);
    GridFunction u = GridFunction::sample(d, [](const Point& x) { return std::cos(M_PI * x[0] / 2.0); });
    u = u.scaled(1.0 / lp_norm(u, 2.0));
    const IntegrandModel j = IntegrandModel::p_dirichlet(2.0);
    for (double c : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
        const GridFunction v = smooth_bump(d, Point{c, 0.0, 0.0}, 0.3);
        const double lambda = multiplier_estimate(u, j, NonlinearityModel::zero(), ConstraintModel(2.0), v, 2.0);
        EXPECT_NEAR(lambda, M_PI * M_PI / 4.0, 1e-2 * M_PI * M_PI / 4.0);
    }
}

TEST(Multiplier, TermsAndDegenerateTestFunction) {
    auto d = make_domain(DomainKind::Box, 2.0, 1, 128);
    const GridFunction u = smooth_bump(d, Point{-1.0, 0.0, 0.0}, 0.5).scaled(0.8);
    const MultiplierTerms t = multiplier_terms(u, IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(),
                                               ConstraintModel(2.0), smooth_bump(d, Point{-1.0, 0.0, 0.0}, 0.4), 2.0);
    EXPECT_EQ(t.i2, 0.0);
    EXPECT_EQ(t.i3, 0.0);
    EXPECT_GT(t.denominator, 0.0);
    const GridFunction far = smooth_bump(d, Point{1.2, 0.0, 0.0}, 0.3);
    EXPECT_THROW(multiplier_estimate(u, IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(),
                                     ConstraintModel(2.0), far, 2.0),
                 DegenerateTestFunction);
}

TEST(FluxOperator, MonotoneAndBounded) {
    auto d = make_domain(DomainKind::Box, 1.0, 2, 16);
    std::mt19937_64 rng(8);
    const GridFunction u = smooth_random(d, rng).scaled(3.0);
    for (auto j : {std::make_shared<IntegrandModel>(IntegrandModel::p_dirichlet(2.0)),
                   std::make_shared<IntegrandModel>(IntegrandModel::weighted_p(2.0, 0.5)),
                   std::make_shared<IntegrandModel>(IntegrandModel::p_dirichlet(1.5))}) {
        const FluxOperator b(u, j, CutoffSpec{1.0});
        const MonotoneReport r = monotone_operator_check(b, 10000, 7);
        EXPECT_TRUE(r.passed()) << j->name() << " min " << r.min_inner;
        EXPECT_GT(r.strict_samples, 0u);
        const Point zero{0.0, 0.0, 0.0};
        EXPECT_EQ(b(0, zero), zero);
    }
}

TEST(Growth, BuiltInModelsPass) {
    GrowthSampling box;
    box.dimension = 1;
    const GrowthReport a = growth_validate(IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(),
                                           ConstraintModel(2.0), box, 10000, 1);
    EXPECT_TRUE(a.passed());
    EXPECT_TRUE(a.p_star_infinite);
    ASSERT_NE(a.find("lower_growth"), nullptr);
    EXPECT_NEAR(a.find("lower_growth")->worst_slack, 0.0, 1e-12);
    EXPECT_NEAR(a.find("upper_growth")->worst_slack, 0.0, 1e-12);
    EXPECT_TRUE(a.find("f_critical_growth")->skipped);

    const GrowthReport b = growth_validate(IntegrandModel::weighted_p(2.0, 1.0), NonlinearityModel::radial_weighted(3.0, 1.0),
                                           ConstraintModel(2.0), box, 10000, 2);
    EXPECT_TRUE(b.passed());
}

TEST(Growth, IncreasingRadialWeightIsFlagged) {
    GrowthSampling box;
    box.dimension = 2;
    const GrowthReport r = growth_validate(IntegrandModel::p_dirichlet(2.0),
                                           NonlinearityModel::radial_weighted(3.0, 1.0, RadialWeight::Increasing),
                                           ConstraintModel(2.0), box, 2000, 3);
    EXPECT_FALSE(r.passed());
    ASSERT_NE(r.find("f_radially_nonincreasing"), nullptr);
    EXPECT_FALSE(r.find("f_radially_nonincreasing")->passed);
}

TEST(Growth, CriticalExponentAndScalingWarning) {
    EXPECT_TRUE(std::isinf(critical_exponent(2.0, 2)));
    EXPECT_DOUBLE_EQ(critical_exponent(2.0, 3), 6.0);
    GrowthSampling box;
    box.dimension = 1;
    const GrowthReport ok = growth_validate(IntegrandModel::p_dirichlet(2.0), NonlinearityModel::pure_power(4.0, 1.0),
                                            ConstraintModel(2.0), box, 100, 4);
    EXPECT_TRUE(ok.warnings.empty());
    const GrowthReport bad = growth_validate(IntegrandModel::p_dirichlet(2.0), NonlinearityModel::pure_power(8.0, 1.0),
                                             ConstraintModel(2.0), box, 100, 4);
    EXPECT_EQ(bad.warnings.size(), 1u);
}

TEST(Basket, DeterministicAndInside) {
    auto d = make_domain(DomainKind::Ball, 1.0, 2, 32);
    const auto a = bump_basket(d, 20, 9), b = bump_basket(d, 20, 9);
    ASSERT_EQ(a.size(), 20u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i], b[i]);
        EXPECT_GT(a[i].max(), 0.0);
    }
    EXPECT_THROW(bump_basket(d, 0), InvalidArgument);
}
