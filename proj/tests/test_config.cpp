#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "symm/config.hpp"
#include "symm/error.hpp"

using namespace symm;

namespace {

const char* kMinimal = R"(
name = "mini"
[domain]
kind = "ball"
extent = 1.0
dimension = 1
cells_per_axis = 64
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "t.toml");
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, MinimalUsesDefaults) {
    const ExperimentConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.name, "mini");
    EXPECT_EQ(c.domain.kind, DomainKind::Ball);
    EXPECT_EQ(c.domain.cells_per_axis, 64);
    EXPECT_EQ(c.model.j_family, IntegrandFamily::PDirichlet);
    EXPECT_EQ(c.model.p, 2.0);
    EXPECT_EQ(c.model.f_family, NonlinearityFamily::Zero);
    EXPECT_EQ(c.experiment.kind, ExperimentKind::Symmetry);
    EXPECT_EQ(c.experiment.polarizer_count, 500);
    EXPECT_EQ(c.experiment.expected_verdict(), Verdict::SymmetricUpToTranslation);
    EXPECT_TRUE(c.output.traces);
    EXPECT_FALSE(c.output.record_runtime);
}

TEST(Config, FullDocumentRoundTripsThroughJson) {
    const std::string text = std::string(kMinimal) + R"(
[model.j]
family = "WeightedP"
p = 2.5
kappa = 0.5
[model.F]
family = "RadialWeighted"
sigma = 3.0
c = 0.5
weight = "decreasing"
[model.G]
q = 3.0
[solver]
grad_tol = 1e-7
max_iters = 500
metric_length = 0.0
[experiment]
kind = "identity_case"
seed = 11
grad_eps = 0.01
expect = "Inconclusive_PositiveCriticalSet"
[experiment.tolerances]
grad = 0.1
symmetry = 0.05
[experiment.profile]
family = "tent"
center = [0.25]
radius = 0.4
[output]
traces = false
)";
    const ExperimentConfig c = parse_config(text);
    EXPECT_EQ(c.model.j_family, IntegrandFamily::WeightedP);
    EXPECT_EQ(c.model.kappa, 0.5);
    EXPECT_EQ(c.model.q, 3.0);
    EXPECT_EQ(c.solver.grad_tol, 1e-7);
    EXPECT_EQ(c.solver.max_iters, 500);
    EXPECT_EQ(c.solver.metric_length, 0.0);
    EXPECT_EQ(c.experiment.kind, ExperimentKind::IdentityCase);
    EXPECT_EQ(c.experiment.seed, 11u);
    EXPECT_EQ(c.experiment.grad_eps, 0.01);
    EXPECT_EQ(c.experiment.expected_verdict(), Verdict::InconclusivePositiveCriticalSet);
    EXPECT_EQ(c.experiment.profile.family, ProfileFamily::Tent);
    EXPECT_EQ(c.experiment.profile.center[0], 0.25);
    EXPECT_FALSE(c.output.traces);

    const IdentityTolerances t = c.identity_tolerances(*c.domain.build());
    EXPECT_EQ(t.grad, 0.1);
    EXPECT_EQ(t.symmetry, 0.05);
    EXPECT_EQ(t.measure, tolerance_measure(*c.domain.build()));

    const nlohmann::json j = to_json(c);
    EXPECT_EQ(j["model"]["j"]["family"], "WeightedP");
    EXPECT_EQ(j["experiment"]["kind"], "identity_case");
    EXPECT_EQ(j["solver"]["max_iters"], 500);
}

TEST(Config, CounterexampleExpectsInconclusive) {
    const ExperimentConfig c = parse_config(std::string(kMinimal) + "[experiment]\nkind = \"counterexample\"\n");
    EXPECT_EQ(c.experiment.expected_verdict(), Verdict::InconclusivePositiveCriticalSet);
}

TEST(Config, ErrorsNameLineAndField) {
    const std::string unknown = error_of(std::string(kMinimal) + "[solver]\ngrad_toll = 1e-6\n");
    EXPECT_NE(unknown.find("t.toml:9:"), std::string::npos) << unknown;
    EXPECT_NE(unknown.find("solver.grad_toll"), std::string::npos) << unknown;

    const std::string type = error_of(std::string(kMinimal) + "[model.j]\np = \"two\"\n");
    EXPECT_NE(type.find("t.toml:9:"), std::string::npos) << type;
    EXPECT_NE(type.find("model.j.p"), std::string::npos) << type;

    const std::string range = error_of(std::string(kMinimal) + "[experiment]\npolarizer_count = 0\n");
    EXPECT_NE(range.find("experiment.polarizer_count"), std::string::npos) << range;

    const std::string syntax = error_of("name = \"x\"\n[domain\n");
    EXPECT_NE(syntax.find("t.toml:2"), std::string::npos) << syntax;
}

TEST(Config, RejectsInvalidDocuments) {
    const std::string base = kMinimal;
    for (const std::string& text : {
             std::string("name = \"x\"\n"),                                   // no [domain]
             base + "[model.j]\nfamily = \"Dirichlet\"\n",                    // unknown family
             base + "[model.j]\np = 0.5\n",                                   // p <= 1
             base + "[model.F]\nfamily = \"PurePower\"\nsigma = 4.0\nc = -1.0\n",
             base + "[experiment]\nkind = \"sideways\"\n",
             base + "[experiment]\nseed = -3\n",
             base + "[experiment]\ninit_center = [0.0, 0.0]\n",              // wrong length
             base + "[experiment]\nrefinements = 9\n",
             base + "[experiment]\nexpect = \"Probably\"\n",
             base + "[experiment.tolerances]\ngrad = 0.0\n",
             base + "[experiment]\nkind = \"counterexample\"\n" + "[domain.extra]\n",
             base + "[solver]\nbacktrack_factor = 2.0\n",
             base + "[output]\ntraces = 1\n",
             base + "bogus = 1\n",
         }) {
        EXPECT_THROW(parse_config(text), FormatError) << text;
    }
    EXPECT_THROW(parse_config("name = \"a/b\"\n[domain]\nkind = \"ball\"\n"), FormatError);
    EXPECT_THROW(parse_config("name = \"\"\n[domain]\nkind = \"ball\"\n"), FormatError);
}

TEST(Config, CounterexampleNeedsAFineOneDimensionalGrid) {
    const std::string coarse = R"(
[domain]
kind = "ball"
dimension = 1
cells_per_axis = 32
[experiment]
kind = "counterexample"
)";
    EXPECT_THROW(parse_config(coarse), FormatError);
    std::string planar = coarse;
    planar.replace(planar.find("dimension = 1"), 13, "dimension = 2");
    planar.replace(planar.find("32"), 2, "64");
    EXPECT_THROW(parse_config(planar), FormatError);
}

TEST(Config, BundledConfigsParse) {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SYMM_CONFIG_DIR)) {
        if (entry.path().extension() != ".toml") continue;
        EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 7);
}

TEST(Config, MissingFileIsAFormatError) { EXPECT_THROW(load_config("/nonexistent/x.toml"), FormatError); }

TEST(Profiles, FamiliesEvaluate) {
    ProfileConfig p;
    p.family = ProfileFamily::Tent;
    p.radius = 0.5;
    EXPECT_DOUBLE_EQ(p.function()(Point{0.25, 0.0, 0.0}), 0.5);
    p.family = ProfileFamily::TwoBump;
    p.separation = 1.0;
    EXPECT_DOUBLE_EQ(p.function()(Point{0.5, 0.0, 0.0}), 1.0);
    EXPECT_EQ(p.function()(Point{0.0, 0.0, 0.0}), 0.0);
    p.family = ProfileFamily::TiltedBump;
    p.tilt = 3.0;  // |tilt| r >= 1 would go negative
    EXPECT_THROW(p.function(), InvalidArgument);
    EXPECT_EQ(parse_profile_family("tilted_bump"), ProfileFamily::TiltedBump);
}
