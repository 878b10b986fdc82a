#include "symm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "symm/error.hpp"

namespace symm {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Symmetry: return "symmetry";
        case ExperimentKind::PolyaSzego: return "polya_szego";
        case ExperimentKind::PolarizationIdentity: return "polarization_identity";
        case ExperimentKind::IdentityCase: return "identity_case";
        case ExperimentKind::Counterexample: return "counterexample";
    }
    return "symmetry";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (ExperimentKind k : {ExperimentKind::Symmetry, ExperimentKind::PolyaSzego, ExperimentKind::PolarizationIdentity,
                             ExperimentKind::IdentityCase, ExperimentKind::Counterexample}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidArgument("unknown experiment kind '" + std::string(name) +
                          "' (expected symmetry, polya_szego, polarization_identity, identity_case or counterexample)");
}

std::string to_string(ProfileFamily family) {
    switch (family) {
        case ProfileFamily::Bump: return "bump";
        case ProfileFamily::TiltedBump: return "tilted_bump";
        case ProfileFamily::Tent: return "tent";
        case ProfileFamily::TwoBump: return "two_bump";
    }
    return "bump";
}

ProfileFamily parse_profile_family(std::string_view name) {
    for (ProfileFamily f : {ProfileFamily::Bump, ProfileFamily::TiltedBump, ProfileFamily::Tent, ProfileFamily::TwoBump}) {
        if (to_string(f) == name) return f;
    }
    throw InvalidArgument("unknown profile family '" + std::string(name) +
                          "' (expected bump, tilted_bump, tent or two_bump)");
}

NonlinearityModel ModelSpec::nonlinearity() const {
    if (f_family == NonlinearityFamily::Zero) return NonlinearityModel::zero();
    return NonlinearityModel(f_family, sigma, c, weight);
}

namespace {

double distance(const Point& x, const Point& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - c[k]) * (x[k] - c[k]);
    return std::sqrt(s);
}

}  // namespace

std::function<double(const Point&)> ProfileConfig::function() const {
    if (!(radius > 0.0) || !(amplitude >= 0.0)) throw InvalidArgument("profile needs radius > 0 and amplitude >= 0");
    if (family == ProfileFamily::TiltedBump && !(std::abs(tilt) * radius < 1.0)) {
        throw InvalidArgument("tilted bump needs |tilt| * radius < 1");
    }
    const ProfileConfig p = *this;
    switch (family) {
        case ProfileFamily::Bump:
            return [p](const Point& x) { return p.amplitude * smooth_bump_value(distance(x, p.center) / p.radius); };
        case ProfileFamily::TiltedBump:
            return [p](const Point& x) {
                return p.amplitude * smooth_bump_value(distance(x, p.center) / p.radius) *
                       (1.0 + p.tilt * (x[0] - p.center[0]));
            };
        case ProfileFamily::Tent:
            return [p](const Point& x) { return p.amplitude * std::max(0.0, 1.0 - distance(x, p.center) / p.radius); };
        case ProfileFamily::TwoBump:
            return [p](const Point& x) {
                Point a = p.center;
                Point b = p.center;
                a[0] -= 0.5 * p.separation;
                b[0] += 0.5 * p.separation;
                return p.amplitude *
                       (smooth_bump_value(distance(x, a) / p.radius) + smooth_bump_value(distance(x, b) / p.radius));
            };
    }
    return [](const Point&) { return 0.0; };
}

HalfSpace HalfSpaceSpec::build(int dimension) const {
    if (static_cast<int>(normal.size()) != dimension) {
        throw InvalidArgument("half-space normal has " + std::to_string(normal.size()) + " components, domain has " +
                              std::to_string(dimension));
    }
    double n2 = 0.0;
    for (double a : normal) n2 += a * a;
    if (!(n2 > 0.0)) throw InvalidArgument("half-space normal must be nonzero");
    std::vector<double> unit(normal);
    for (double& a : unit) a /= std::sqrt(n2);
    return HalfSpace(unit, offset);
}

Verdict ExperimentSpec::expected_verdict() const {
    if (expect) return *expect;
    return kind == ExperimentKind::Counterexample ? Verdict::InconclusivePositiveCriticalSet
                                                  : Verdict::SymmetricUpToTranslation;
}

IdentityTolerances ExperimentConfig::identity_tolerances(const Domain& domain) const {
    IdentityTolerances t = default_identity_tolerances(domain);
    if (experiment.tol_grad) t.grad = *experiment.tol_grad;
    if (experiment.tol_measure) t.measure = *experiment.tol_measure;
    if (experiment.tol_symmetry) t.symmetry = *experiment.tol_symmetry;
    return t;
}

SymmetryOptions ExperimentConfig::symmetry_options(int threads) const {
    SymmetryOptions o;
    o.solver = solver;
    o.init.center = experiment.init_center;
    o.init.radius_fraction = experiment.init_radius;
    o.extra_starts = experiment.extra_starts;
    o.extra_start_max_iters = experiment.extra_start_max_iters;
    o.seed = experiment.seed;
    o.polarizer_count = experiment.polarizer_count;
    o.polarizer_steps = experiment.polarizer_steps;
    o.polarizer_tol = experiment.polarizer_tol;
    o.grad_eps = experiment.grad_eps;
    if (experiment.tol_grad || experiment.tol_measure || experiment.tol_symmetry) {
        o.tolerances = identity_tolerances(*domain.build());
    }
    o.threads = threads;
    return o;
}

// --- TOML reading -------------------------------------------------------------

namespace {

class Section {
public:
    Section(const toml::table* table, std::string path, std::string_view source)
        : table_(table), path_(std::move(path)), source_(source) {}

    bool present() const noexcept { return table_ != nullptr; }

    [[noreturn]] void fail(std::string_view key, const toml::node* node, const std::string& what) const {
        std::ostringstream os;
        os << source_;
        const toml::node* at = node ? node : static_cast<const toml::node*>(table_);
        if (at && at->source().begin.line > 0) os << ":" << at->source().begin.line;
        os << ": field '" << field(key) << "': " << what;
        throw FormatError(os.str());
    }

    const toml::node* node(std::string_view key) {
        used_.insert(std::string(key));
        return table_ ? table_->get(key) : nullptr;
    }

    double number(std::string_view key, double fallback) {
        const toml::node* n = node(key);
        if (!n) return fallback;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
            if (!std::isfinite(*v)) fail(key, n, "must be finite");
            return *v;
        }
        fail(key, n, "expected a number");
    }

    std::optional<double> optional_number(std::string_view key) {
        if (!table_ || !table_->get(key)) {
            used_.insert(std::string(key));
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    long long integer(std::string_view key, long long fallback) {
        const toml::node* n = node(key);
        if (!n) return fallback;
        if (!n->is_integer()) fail(key, n, "expected an integer");
        return *n->value<long long>();
    }

    bool boolean(std::string_view key, bool fallback) {
        const toml::node* n = node(key);
        if (!n) return fallback;
        if (!n->is_boolean()) fail(key, n, "expected true or false");
        return *n->value<bool>();
    }

    std::optional<std::string> string(std::string_view key) {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        if (!n->is_string()) fail(key, n, "expected a string");
        return *n->value<std::string>();
    }

    std::optional<std::vector<double>> numbers(std::string_view key) {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        const toml::array* arr = n->as_array();
        if (!arr) fail(key, n, "expected an array of numbers");
        std::vector<double> out;
        for (const toml::node& e : *arr) {
            auto v = e.value<double>();
            if (!v || !(e.is_floating_point() || e.is_integer()) || !std::isfinite(*v)) {
                fail(key, &e, "expected an array of finite numbers");
            }
            out.push_back(*v);
        }
        return out;
    }

    Section child(std::string_view key) {
        const toml::node* n = node(key);
        if (n && !n->is_table()) fail(key, n, "expected a table");
        return Section(n ? n->as_table() : nullptr, field(key), source_);
    }

    /// Rejects keys that were never asked for.
    void finish() const {
        if (!table_) return;
        for (const auto& [k, v] : *table_) {
            if (!used_.count(std::string(k.str()))) fail(k.str(), &v, "unknown key");
        }
    }

    template <class Fn>
    auto guarded(std::string_view key, Fn&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const InvalidArgument& e) {
            fail(key, table_ ? table_->get(key) : nullptr, e.what());
        }
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

private:
    const toml::table* table_;
    std::string path_;
    std::string_view source_;
    std::set<std::string> used_;
};

int to_int(Section& s, std::string_view key, long long fallback) {
    const long long v = s.integer(key, fallback);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        s.fail(key, s.node(key), "out of range");
    }
    return static_cast<int>(v);
}

Point to_point(Section& s, std::string_view key, const std::vector<double>& v, int dimension) {
    if (static_cast<int>(v.size()) != dimension) {
        s.fail(key, s.node(key), "expected " + std::to_string(dimension) + " components");
    }
    Point p{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < v.size(); ++k) p[k] = v[k];
    return p;
}

void positive(Section& s, std::string_view key, double v) {
    if (!(v > 0.0)) s.fail(key, s.node(key), "must be positive");
}

}  // namespace

ExperimentConfig parse_config(std::string_view toml_text, std::string_view source_name) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source_name << ":" << e.source().begin.line << ": " << e.description();
        throw FormatError(os.str());
    }

    ExperimentConfig cfg;
    Section top(&root, "", source_name);
    if (auto name = top.string("name")) cfg.name = *name;
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
        top.fail("name", top.node("name"), "must be a non-empty file stem");
    }

    Section dom = top.child("domain");
    if (!dom.present()) top.fail("domain", nullptr, "missing [domain] table");
    if (auto kind = dom.string("kind")) cfg.domain.kind = dom.guarded("kind", [&] { return parse_domain_kind(*kind); });
    cfg.domain.extent = dom.number("extent", cfg.domain.extent);
    cfg.domain.dimension = to_int(dom, "dimension", cfg.domain.dimension);
    cfg.domain.cells_per_axis = to_int(dom, "cells_per_axis", cfg.domain.cells_per_axis);
    dom.guarded("cells_per_axis", [&] { return cfg.domain.build(); });
    dom.finish();
    const int dim = cfg.domain.dimension;

    Section model = top.child("model");
    {
        Section j = model.child("j");
        if (auto f = j.string("family")) cfg.model.j_family = j.guarded("family", [&] { return parse_integrand_family(*f); });
        cfg.model.p = j.number("p", cfg.model.p);
        cfg.model.kappa = j.number("kappa", cfg.model.kappa);
        j.guarded("p", [&] { return cfg.model.integrand(); });
        j.finish();

        Section f = model.child("F");
        if (auto fam = f.string("family")) {
            cfg.model.f_family = f.guarded("family", [&] { return parse_nonlinearity_family(*fam); });
        }
        cfg.model.sigma = f.number("sigma", cfg.model.sigma);
        cfg.model.c = f.number("c", cfg.model.c);
        if (auto w = f.string("weight")) {
            if (*w == "decreasing") cfg.model.weight = RadialWeight::Decreasing;
            else if (*w == "increasing") cfg.model.weight = RadialWeight::Increasing;
            else f.fail("weight", f.node("weight"), "expected decreasing or increasing");
        }
        f.guarded("sigma", [&] { return cfg.model.nonlinearity(); });
        f.finish();

        Section g = model.child("G");
        cfg.model.q = g.number("q", cfg.model.q);
        g.guarded("q", [&] { return cfg.model.constraint(); });
        g.finish();
    }
    model.finish();

    Section sol = top.child("solver");
    SolverOptions& so = cfg.solver;
    so.max_iters = to_int(sol, "max_iters", so.max_iters);
    so.step0 = sol.number("step0", so.step0);
    so.backtrack_factor = sol.number("backtrack_factor", so.backtrack_factor);
    so.armijo_c = sol.number("armijo_c", so.armijo_c);
    so.grad_tol = sol.number("grad_tol", so.grad_tol);
    so.constraint_tol = sol.number("constraint_tol", so.constraint_tol);
    so.enforce_nonneg = sol.boolean("enforce_nonneg", so.enforce_nonneg);
    so.energy_floor = sol.number("energy_floor", so.energy_floor);
    so.metric_length = sol.number("metric_length", so.metric_length);
    sol.guarded("max_iters", [&] {
        so.validate();
        return 0;
    });
    sol.finish();

    Section ex = top.child("experiment");
    ExperimentSpec& e = cfg.experiment;
    if (auto kind = ex.string("kind")) e.kind = ex.guarded("kind", [&] { return parse_experiment_kind(*kind); });
    {
        const long long seed = ex.integer("seed", 0);
        if (seed < 0) ex.fail("seed", ex.node("seed"), "must be nonnegative");
        e.seed = static_cast<std::uint64_t>(seed);
    }
    e.polarizer_count = to_int(ex, "polarizer_count", e.polarizer_count);
    e.polarizer_steps = to_int(ex, "polarizer_steps", e.polarizer_steps);
    if (e.polarizer_count < 1) ex.fail("polarizer_count", ex.node("polarizer_count"), "must be at least 1");
    if (e.polarizer_steps < 1) ex.fail("polarizer_steps", ex.node("polarizer_steps"), "must be at least 1");
    e.polarizer_tol = ex.number("polarizer_tol", e.polarizer_tol);
    positive(ex, "polarizer_tol", e.polarizer_tol);
    e.extra_starts = to_int(ex, "extra_starts", e.extra_starts);
    if (e.extra_starts < 0) ex.fail("extra_starts", ex.node("extra_starts"), "must be nonnegative");
    e.extra_start_max_iters = to_int(ex, "extra_start_max_iters", e.extra_start_max_iters);
    if (e.extra_start_max_iters < 1) ex.fail("extra_start_max_iters", ex.node("extra_start_max_iters"), "must be positive");
    if (auto c = ex.numbers("init_center")) e.init_center = to_point(ex, "init_center", *c, dim);
    e.init_radius = ex.number("init_radius", e.init_radius);
    positive(ex, "init_radius", e.init_radius);
    e.grad_eps = ex.optional_number("grad_eps");
    if (e.grad_eps) positive(ex, "grad_eps", *e.grad_eps);
    if (auto v = ex.string("expect")) e.expect = ex.guarded("expect", [&] { return parse_verdict(*v); });
    e.refinements = to_int(ex, "refinements", e.refinements);
    if (e.refinements < 2 || e.refinements > 6) ex.fail("refinements", ex.node("refinements"), "must lie in [2, 6]");

    {
        Section tol = ex.child("tolerances");
        e.tol_grad = tol.optional_number("grad");
        e.tol_measure = tol.optional_number("measure");
        e.tol_symmetry = tol.optional_number("symmetry");
        if (e.tol_grad) positive(tol, "grad", *e.tol_grad);
        if (e.tol_measure) positive(tol, "measure", *e.tol_measure);
        if (e.tol_symmetry) positive(tol, "symmetry", *e.tol_symmetry);
        tol.finish();
    }
    {
        Section pr = ex.child("profile");
        ProfileConfig& p = e.profile;
        if (auto f = pr.string("family")) p.family = pr.guarded("family", [&] { return parse_profile_family(*f); });
        if (auto c = pr.numbers("center")) p.center = to_point(pr, "center", *c, dim);
        p.radius = pr.number("radius", p.radius);
        p.amplitude = pr.number("amplitude", p.amplitude);
        p.tilt = pr.number("tilt", p.tilt);
        p.separation = pr.number("separation", p.separation);
        positive(pr, "radius", p.radius);
        if (p.amplitude < 0.0) pr.fail("amplitude", pr.node("amplitude"), "must be nonnegative");
        if (p.family == ProfileFamily::TiltedBump && !(std::abs(p.tilt) * p.radius < 1.0)) {
            pr.fail("tilt", pr.node("tilt"), "|tilt| * radius must be below 1 to keep the profile nonnegative");
        }
        pr.finish();
    }
    {
        Section hs = ex.child("halfspace");
        if (auto n = hs.numbers("normal")) e.halfspace.normal = *n;
        else e.halfspace.normal.assign(static_cast<std::size_t>(dim), 0.0), e.halfspace.normal[0] = 1.0;
        e.halfspace.offset = hs.number("offset", e.halfspace.offset);
        hs.guarded("normal", [&] { return e.halfspace.build(dim); });
        hs.finish();
    }
    if (e.kind == ExperimentKind::Counterexample && (dim != 1 || cfg.domain.cells_per_axis < 64)) {
        ex.fail("kind", ex.node("kind"), "the counterexample fixture needs a 1D domain with at least 64 cells");
    }
    ex.finish();

    Section out = top.child("output");
    cfg.output.traces = out.boolean("traces", cfg.output.traces);
    cfg.output.grid_functions = out.boolean("grid_functions", cfg.output.grid_functions);
    cfg.output.record_runtime = out.boolean("record_runtime", cfg.output.record_runtime);
    out.finish();

    top.finish();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    const int dim = cfg.domain.dimension;
    auto point = [dim](const Point& p) {
        json a = json::array();
        for (int k = 0; k < dim; ++k) a.push_back(p[static_cast<std::size_t>(k)]);
        return a;
    };
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

    json j;
    j["name"] = cfg.name;
    j["domain"] = {{"kind", to_string(cfg.domain.kind)},
                   {"extent", cfg.domain.extent},
                   {"dimension", dim},
                   {"cells_per_axis", cfg.domain.cells_per_axis}};
    j["model"] = {
        {"j", {{"family", to_string(cfg.model.j_family)}, {"p", cfg.model.p}, {"kappa", cfg.model.kappa}}},
        {"F",
         {{"family", to_string(cfg.model.f_family)},
          {"sigma", cfg.model.sigma},
          {"c", cfg.model.c},
          {"weight", cfg.model.weight == RadialWeight::Decreasing ? "decreasing" : "increasing"}}},
        {"G", {{"q", cfg.model.q}}}};
    const SolverOptions& so = cfg.solver;
    j["solver"] = {{"max_iters", so.max_iters},         {"step0", so.step0},
                   {"backtrack_factor", so.backtrack_factor}, {"armijo_c", so.armijo_c},
                   {"grad_tol", so.grad_tol},           {"constraint_tol", so.constraint_tol},
                   {"enforce_nonneg", so.enforce_nonneg}, {"energy_floor", so.energy_floor},
                   {"metric_length", so.metric_length}};
    const ExperimentSpec& e = cfg.experiment;
    j["experiment"] = {
        {"kind", to_string(e.kind)},
        {"seed", e.seed},
        {"polarizer_count", e.polarizer_count},
        {"polarizer_steps", e.polarizer_steps},
        {"polarizer_tol", e.polarizer_tol},
        {"extra_starts", e.extra_starts},
        {"extra_start_max_iters", e.extra_start_max_iters},
        {"init_center", point(e.init_center)},
        {"init_radius", e.init_radius},
        {"grad_eps", opt(e.grad_eps)},
        {"expect", to_string(e.expected_verdict())},
        {"refinements", e.refinements},
        {"tolerances", {{"grad", opt(e.tol_grad)}, {"measure", opt(e.tol_measure)}, {"symmetry", opt(e.tol_symmetry)}}},
        {"profile",
         {{"family", to_string(e.profile.family)},
          {"center", point(e.profile.center)},
          {"radius", e.profile.radius},
          {"amplitude", e.profile.amplitude},
          {"tilt", e.profile.tilt},
          {"separation", e.profile.separation}}},
        {"halfspace", {{"normal", e.halfspace.normal}, {"offset", e.halfspace.offset}}}};
    j["output"] = {{"traces", cfg.output.traces},
                   {"grid_functions", cfg.output.grid_functions},
                   {"record_runtime", cfg.output.record_runtime}};
    return j;
}

}  // namespace symm
