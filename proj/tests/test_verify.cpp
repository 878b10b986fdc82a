#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shooting.hpp"
#include "symm/error.hpp"
#include "symm/verify.hpp"

using namespace symm;

namespace {

GridFunction random_function(const DomainPtr& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return GridFunction::sample(d, [&](const Point&) { return unit(rng); });
}

GridFunction two_bumps(const DomainPtr& d, double separation, double radius) {
    return smooth_bump(d, Point{-0.5 * separation, 0.0, 0.0}, radius) +
           smooth_bump(d, Point{0.5 * separation, 0.0, 0.0}, radius);
}

SymmetryOptions quick_options() {
    SymmetryOptions o;
    o.extra_starts = 0;
    o.polarizer_count = 200;
    o.seed = 7;
    return o;
}

}  // namespace

TEST(Tolerances, ScaleWithSpacing) {
    auto d64 = make_domain(DomainKind::Box, 1.0, 1, 64);
    auto d256 = make_domain(DomainKind::Box, 3.0, 2, 256);
    EXPECT_DOUBLE_EQ(tolerance_grad(*d64), 0.05);
    EXPECT_DOUBLE_EQ(tolerance_grad(*d256), 0.0125);
    EXPECT_DOUBLE_EQ(tolerance_measure(*d64), 3.0 / 32.0);
    EXPECT_NEAR(tolerance_measure(*d256), 3.0 * std::pow(6.0 / 256.0, 2), 1e-15);
    const IdentityTolerances t = default_identity_tolerances(*d64);
    EXPECT_DOUBLE_EQ(t.symmetry, 0.02);
}

TEST(GradientDistance, ZeroOnSelfAndSymmetric) {
    auto d = make_domain(DomainKind::Ball, 1.0, 2, 16);
    std::mt19937_64 rng(1);
    const GridFunction u = random_function(d, rng), v = random_function(d, rng);
    EXPECT_EQ(gradient_distance(u, u, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(gradient_distance(u, v, 3.0), gradient_distance(v, u, 3.0));
    EXPECT_NEAR(gradient_distance(u, GridFunction::zeros(d), 2.0), std::sqrt(gradient_pnorm(u, 2.0)), 1e-12);
}

TEST(Translation, ExactShiftIsRecovered) {
    auto d = make_domain(DomainKind::Box, 2.0, 2, 32);
    const GridFunction star = smooth_bump(d, Point{}, 0.6);
    const Translation none = best_translation(star, star);
    EXPECT_EQ(none.shift, (LatticeIndex{0, 0, 0}));
    EXPECT_EQ(none.defect, 0.0);

    const GridFunction moved = shifted(star, LatticeIndex{3, -2, 0});
    const Translation t = best_translation(moved, star);
    EXPECT_EQ(t.shift, (LatticeIndex{3, -2, 0}));
    EXPECT_DOUBLE_EQ(t.tau[0], 3.0 * d->spacing());
    EXPECT_DOUBLE_EQ(t.tau[1], -2.0 * d->spacing());
    EXPECT_NEAR(t.defect, 0.0, 1e-15);
}

TEST(Translation, NoisyCopyLandsWithinOneCell) {
    auto d = make_domain(DomainKind::Box, 2.0, 1, 128);
    const GridFunction star = smooth_bump(d, Point{}, 0.6);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> noise(0.0, 0.02);
    const GridFunction moved = shifted(star, LatticeIndex{9, 0, 0});
    const GridFunction noisy = moved + GridFunction::sample(d, [&](const Point&) { return noise(rng); });
    const Translation t = best_translation(noisy, star);
    EXPECT_LE(std::abs(t.shift[0] - 9), 1);
    EXPECT_LT(t.defect, 0.1);
}

TEST(Translation, ShiftedDropsMassPastTheLattice) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 4);
    const GridFunction u(d, {1.0, 2.0, 3.0, 4.0});
    EXPECT_EQ(shifted(u, LatticeIndex{1, 0, 0}), GridFunction(d, {0.0, 1.0, 2.0, 3.0}));
    EXPECT_EQ(shifted(u, LatticeIndex{-2, 0, 0}), GridFunction(d, {3.0, 4.0, 0.0, 0.0}));
}

TEST(PolyaSzego, RandomFixturesNeverBeatTheRearrangement) {
    std::mt19937_64 rng(3);
    const IntegrandModel models[] = {IntegrandModel::p_dirichlet(2.0), IntegrandModel::p_dirichlet(3.0),
                                     IntegrandModel::weighted_p(2.0, 0.5)};
    auto d1 = make_domain(DomainKind::Box, 1.0, 1, 128);
    auto d2 = make_domain(DomainKind::Ball, 1.0, 2, 24);
    for (int trial = 0; trial < 100; ++trial) {
        const GridFunction u = random_function(trial % 4 == 3 ? d2 : d1, rng);
        for (const IntegrandModel& j : models) {
            const PolyaSzegoReport r = polya_szego_check(u, j);
            EXPECT_TRUE(r.passed) << j.name() << " trial " << trial << " slack " << r.slack;
            EXPECT_DOUBLE_EQ(r.slack, r.original - r.rearranged);
        }
    }
}

TEST(PolyaSzego, RadialFunctionHasZeroSlack) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 64);
    const PolyaSzegoReport r = polya_szego_check(smooth_bump(d, Point{}, 0.7), IntegrandModel::weighted_p(2.0, 0.5));
    EXPECT_NEAR(r.slack, 0.0, 1e-12 * r.original);
}

TEST(PolarizationIdentity, TiltedBumpGapHalvesWithSpacing) {
    ProfileSpec spec;
    spec.extent = 2.0;
    spec.cells_per_axis = 128;
    spec.profile = [](const Point& x) {
        const double r = std::abs(x[0] - 0.6) / 0.9;
        return r < 1.0 ? smooth_bump_value(r) * (1.0 + 0.5 * (x[0] - 0.6)) : 0.0;
    };
    const PolarizationIdentityReport r =
        polarization_identity_check(spec, HalfSpace::axis_aligned(1, 0, 1, 0.75), IntegrandModel::p_dirichlet(2.0),
                                    NonlinearityModel::radial_weighted(2.0, 1.0), ConstraintModel(2.0), 3);
    ASSERT_EQ(r.levels.size(), 3u);
    ASSERT_EQ(r.ratios_j.size(), 2u);
    EXPECT_FALSE(r.exact_zero);
    EXPECT_TRUE(r.passed);
    for (double ratio : r.ratios_j) {
        EXPECT_GE(ratio, 1.5);
        EXPECT_LE(ratio, 3.0);
    }
    for (const PolarizationLevel& l : r.levels) {
        EXPECT_LE(l.delta_g, 1e-12);
        EXPECT_GE(l.delta_f, -1e-12);
    }
    EXPECT_EQ(r.levels[2].cells_per_axis, 512);
}

TEST(PolarizationIdentity, MirrorSymmetricProfileIsExactlyFixed) {
    ProfileSpec spec;
    spec.extent = 1.0;
    spec.cells_per_axis = 64;
    spec.profile = [](const Point& x) { return smooth_bump_value(std::abs(x[0] - 0.25) / 0.5); };
    const PolarizationIdentityReport r =
        polarization_identity_check(spec, HalfSpace::axis_aligned(1, 0, 1, 0.25), IntegrandModel::p_dirichlet(2.0),
                                    NonlinearityModel::zero(), ConstraintModel(2.0), 2);
    EXPECT_TRUE(r.exact_zero);
    EXPECT_TRUE(r.passed);
}

TEST(PolarizationIdentity, RejectsHalfSpaceThatLosesExactness) {
    ProfileSpec spec;
    spec.cells_per_axis = 16;
    spec.profile = [](const Point&) { return 1.0; };
    EXPECT_THROW(polarization_identity_check(spec, HalfSpace::axis_aligned(1, 0, 1, 0.3),
                                             IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(),
                                             ConstraintModel(2.0), 2),
                 InvalidArgument);
}

TEST(IdentityCase, RearrangementItselfIsSymmetric) {
    auto d = make_domain(DomainKind::Box, 1.0, 2, 32);
    // A cone; the smooth bump has a flat band near its support edge that counts as critical.
    const GridFunction cone = GridFunction::sample(d, [](const Point& x) {
        return std::max(0.0, 1.0 - std::hypot(x[0], x[1]) / 0.7);
    });
    const GridFunction star = schwarz_rearrange(cone);
    const IdentityCaseReport r = identity_case_check(star, 2.0);
    EXPECT_EQ(r.verdict, Verdict::SymmetricUpToTranslation) << r.reason;
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_EQ(r.translation.defect, 0.0);
}

TEST(IdentityCase, ShiftedBumpReportsItsTranslation) {
    auto d = make_domain(DomainKind::Box, 2.0, 1, 256);
    const GridFunction u = smooth_bump(d, Point{0.3125, 0.0, 0.0}, 0.5);
    const IdentityCaseReport r = identity_case_check(u, 2.0);
    EXPECT_EQ(r.verdict, Verdict::SymmetricUpToTranslation) << r.reason;
    EXPECT_NEAR(r.translation.tau[0], 0.3125, 0.5 * d->spacing());
    EXPECT_LE(r.translation.defect, 1e-12);
}

TEST(IdentityCase, TwoBumpsAreNotSymmetric) {
    auto d = make_domain(DomainKind::Box, 2.0, 1, 256);
    const IdentityCaseReport r = identity_case_check(two_bumps(d, 1.2, 0.4), 2.0);
    EXPECT_NE(r.verdict, Verdict::SymmetricUpToTranslation);
    EXPECT_GT(r.delta, r.tolerances.grad);
}

TEST(IdentityCase, RejectsNegativeInput) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 8);
    EXPECT_THROW(identity_case_check(GridFunction::zeros(d).scaled(1.0) - smooth_bump(d, Point{}, 0.5), 2.0),
                 InvalidArgument);
}

TEST(Counterexample, FixtureHasTheAdvertisedStructure) {
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 256);
    const CounterexampleFixture fx = make_counterexample_fixture(d);
    EXPECT_EQ(schwarz_rearrange(fx.u), fx.u_star);
    EXPECT_NEAR(std::sqrt(gradient_pnorm(fx.u, 2.0)), std::sqrt(gradient_pnorm(fx.u_star, 2.0)), 1e-12);
    EXPECT_GT(critical_set_measure(fx.u_star), 0.0);
    EXPECT_NEAR(fx.shelf_width, 2.0 * 32 * d->spacing(), 1e-15);
    EXPECT_EQ(fx.cap_shift, 16);

    const IdentityCaseReport r = identity_case_check(fx.u, 2.0);
    EXPECT_EQ(r.verdict, Verdict::InconclusivePositiveCriticalSet) << r.reason;
    EXPECT_GT(r.translation.defect, 0.1);

    EXPECT_THROW(make_counterexample_fixture(make_domain(DomainKind::Ball, 1.0, 1, 32)), InvalidArgument);
    EXPECT_THROW(make_counterexample_fixture(make_domain(DomainKind::Ball, 1.0, 2, 64)), InvalidArgument);
}

TEST(Counterexample, PipelineDoesNotClaimSymmetry) {
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 256);
    const CounterexampleFixture fx = make_counterexample_fixture(d);
    const SymmetryReport r = analyze_function(fx.u, IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(),
                                              ConstraintModel(2.0), quick_options());
    EXPECT_EQ(r.verdict, Verdict::InconclusivePositiveCriticalSet) << r.reason;
    EXPECT_TRUE(std::isnan(r.lambda));
    ASSERT_TRUE(r.u_star.has_value());
    EXPECT_EQ(*r.u_star, fx.u_star);
}

TEST(SymmetryExperiment, EigenfunctionIsSymmetric) {
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 128);
    const SymmetryReport r = run_symmetry_experiment(IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(),
                                                     ConstraintModel(2.0), d, quick_options());
    EXPECT_EQ(r.verdict, Verdict::SymmetricUpToTranslation) << r.reason;
    EXPECT_TRUE(r.solver_converged);
    EXPECT_NEAR(r.lambda, M_PI * M_PI / 4.0, 2e-2 * M_PI * M_PI / 4.0);
    EXPECT_LE(r.symmetry_defect, 1e-10);
    for (const InvariantCheck& c : r.invariants) EXPECT_TRUE(c.passed) << c.name;
    ASSERT_NE(r.find("constraint_exact"), nullptr);
    EXPECT_EQ(r.find("no_such_check"), nullptr);
    EXPECT_EQ(r.j_energy.size(), r.grad_distance.size());
    EXPECT_EQ(r.j_energy.size(), r.constraint.size());
}

TEST(SymmetryExperiment, ThreadCountDoesNotChangeTheResult) {
    auto d = make_domain(DomainKind::Ball, 1.0, 1, 96);
    SymmetryOptions o = quick_options();
    o.extra_starts = 3;
    const IntegrandModel j = IntegrandModel::weighted_p(2.0, 0.5);
    const ConstraintModel g(2.0);
    o.threads = 1;
    const SymmetryReport a = run_symmetry_experiment(j, NonlinearityModel::zero(), g, d, o);
    o.threads = 4;
    const SymmetryReport b = run_symmetry_experiment(j, NonlinearityModel::zero(), g, d, o);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.j_energy, b.j_energy);
    EXPECT_EQ(*a.u, *b.u);
    ASSERT_EQ(a.basins.size(), 4u);
    for (std::size_t k = 0; k < a.basins.size(); ++k) EXPECT_EQ(a.basins[k].energy, b.basins[k].energy);
}

TEST(SymmetryExperiment, OffCenterGroundStateIsTranslated) {
    // Twice the width of the bundled NLS box at the same spacing; the wall barely pulls the bump.
    auto d = make_domain(DomainKind::Box, 24.0, 1, 2048);
    SymmetryOptions o = quick_options();
    o.init.center = Point{3.0, 0.0, 0.0};
    o.init.radius_fraction = 0.125;
    // Only offsets between 0 and the bump center move it inward.
    o.polarizer_count = 2000;
    const SymmetryReport r = run_symmetry_experiment(IntegrandModel::p_dirichlet(2.0),
                                                     NonlinearityModel::pure_power(4.0, 1.0), ConstraintModel(2.0), d, o);
    EXPECT_EQ(r.verdict, Verdict::SymmetricUpToTranslation) << r.reason;
    ASSERT_EQ(r.translation.size(), 1u);
    EXPECT_GT(std::abs(r.translation[0]), 1.0);
    EXPECT_LE(r.symmetry_defect, 0.02);
}

TEST(SymmetryExperiment, GroundStateAgreesWithShooting) {
    auto d = make_domain(DomainKind::Box, 12.0, 1, 1024);
    SymmetryOptions o = quick_options();
    const SymmetryReport r = run_symmetry_experiment(IntegrandModel::p_dirichlet(2.0),
                                                     NonlinearityModel::pure_power(4.0, 1.0), ConstraintModel(2.0), d, o);
    ASSERT_EQ(r.verdict, Verdict::SymmetricUpToTranslation) << r.reason;
    const oracle::GroundState gs = oracle::nls_ground_state(4.0, 1.0, 1.0);
    const GridFunction ref = GridFunction::sample(d, [&](const Point& x) { return gs(x[0]); });
    EXPECT_LE(lp_norm(*r.u_star - ref, 2.0) / lp_norm(ref, 2.0), 2e-2);
    for (double g : r.constraint) EXPECT_NEAR(g, 1.0, 1e-12);
}

TEST(AnalyzeFunction, RejectsNegativeInput) {
    auto d = make_domain(DomainKind::Box, 1.0, 1, 16);
    const GridFunction u = GridFunction::zeros(d) - smooth_bump(d, Point{}, 0.5);
    EXPECT_THROW(analyze_function(u, IntegrandModel::p_dirichlet(2.0), NonlinearityModel::zero(), ConstraintModel(2.0),
                                  quick_options()),
                 InvalidArgument);
}

TEST(Verdict, StringRoundTrip) {
    for (Verdict v : {Verdict::SymmetricUpToTranslation, Verdict::InconclusivePositiveCriticalSet, Verdict::Failed}) {
        EXPECT_EQ(parse_verdict(to_string(v)), v);
    }
    EXPECT_THROW(parse_verdict("maybe"), InvalidArgument);
}
