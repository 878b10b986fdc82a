#include "symm/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "symm/error.hpp"

namespace symm {

std::string to_string(DomainKind kind) { return kind == DomainKind::Ball ? "ball" : "box"; }

DomainKind parse_domain_kind(std::string_view name) {
    if (name == "ball" || name == "Ball") return DomainKind::Ball;
    if (name == "box" || name == "Box") return DomainKind::Box;
    throw InvalidArgument("unknown domain kind '" + std::string(name) + "' (expected ball or box)");
}

Domain::Domain(DomainKind kind, double extent, int dimension, int cells_per_axis)
    : kind_(kind), extent_(extent), dimension_(dimension), n_(cells_per_axis) {
    if (!(extent > 0.0) || !std::isfinite(extent)) throw InvalidArgument("domain extent must be positive");
    if (dimension < 1 || dimension > kMaxDimension) throw InvalidArgument("domain dimension must be 1, 2 or 3");
    if (cells_per_axis < 4) throw InvalidArgument("cells_per_axis must be at least 4");

    h_ = 2.0 * extent / n_;
    cell_volume_ = std::pow(h_, dimension_);

    std::size_t total = 1;
    for (int k = dimension_ - 1; k >= 0; --k) {
        strides_[static_cast<std::size_t>(k)] = total;
        total *= static_cast<std::size_t>(n_);
    }
    mask_.assign(total, 1);
    if (kind_ == DomainKind::Ball) {
        // |center| < R  <=>  distance_key < n^2, exactly.
        const long long limit = static_cast<long long>(n_) * n_;
        for (std::size_t c = 0; c < total; ++c) mask_[c] = distance_key(c) < limit ? 1 : 0;
    }
    active_count_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

LatticeIndex Domain::index_of(std::size_t cell) const noexcept {
    LatticeIndex idx{0, 0, 0};
    for (int k = 0; k < dimension_; ++k) {
        const std::size_t s = strides_[static_cast<std::size_t>(k)];
        idx[static_cast<std::size_t>(k)] = static_cast<int>(cell / s);
        cell %= s;
    }
    return idx;
}

std::size_t Domain::cell_of(const LatticeIndex& idx) const noexcept {
    std::size_t cell = 0;
    for (int k = 0; k < dimension_; ++k) {
        cell += static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]) * strides_[static_cast<std::size_t>(k)];
    }
    return cell;
}

bool Domain::in_lattice(const LatticeIndex& idx) const noexcept {
    for (int k = 0; k < dimension_; ++k) {
        const int i = idx[static_cast<std::size_t>(k)];
        if (i < 0 || i >= n_) return false;
    }
    return true;
}

Point Domain::center(std::size_t cell) const noexcept {
    const LatticeIndex idx = index_of(cell);
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < dimension_; ++k) x[static_cast<std::size_t>(k)] = coordinate(idx[static_cast<std::size_t>(k)]);
    return x;
}

double Domain::radius(std::size_t cell) const noexcept {
    return 0.5 * h_ * std::sqrt(static_cast<double>(distance_key(cell)));
}

long long Domain::distance_key(std::size_t cell) const noexcept {
    const LatticeIndex idx = index_of(cell);
    long long key = 0;
    for (int k = 0; k < dimension_; ++k) {
        const long long m = 2LL * idx[static_cast<std::size_t>(k)] + 1 - n_;
        key += m * m;
    }
    return key;
}

bool Domain::same_lattice(const Domain& other) const noexcept {
    return kind_ == other.kind_ && extent_ == other.extent_ && dimension_ == other.dimension_ && n_ == other.n_;
}

DomainPtr make_domain(DomainKind kind, double extent, int dimension, int cells_per_axis) {
    return std::make_shared<const Domain>(kind, extent, dimension, cells_per_axis);
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) throw InvalidArgument("GridFunction requires a domain");
    if (values_.size() != domain_->cell_count()) {
        throw InvalidArgument("GridFunction has " + std::to_string(values_.size()) + " values, domain has " +
                              std::to_string(domain_->cell_count()) + " cells");
    }
    for (std::size_t c = 0; c < values_.size(); ++c) {
        if (!std::isfinite(values_[c])) throw InvalidArgument("GridFunction value is not finite");
        if (!domain_->active(c) && values_[c] != 0.0) {
            throw InvalidArgument("GridFunction must vanish on inactive cells");
        }
    }
}

GridFunction GridFunction::zeros(DomainPtr domain) {
    const std::size_t n = domain->cell_count();
    return GridFunction(std::move(domain), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(DomainPtr domain, const std::function<double(const Point&)>& f) {
    std::vector<double> v(domain->cell_count(), 0.0);
    for (std::size_t c = 0; c < v.size(); ++c) {
        if (domain->active(c)) v[c] = f(domain->center(c));
    }
    return GridFunction(std::move(domain), std::move(v));
}

bool GridFunction::nonnegative() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x >= 0.0; });
}

double GridFunction::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

GridFunction GridFunction::scaled(double factor) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= factor;
    return GridFunction(domain_, std::move(v));
}

namespace {
void require_same(const GridFunction& a, const GridFunction& b) {
    if (!a.domain().same_lattice(b.domain())) throw InvalidArgument("grid functions live on different domains");
}
}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_same(a, b);
    std::vector<double> v(a.values_);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] += b.values_[c];
    return GridFunction(a.domain_, std::move(v));
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require_same(a, b);
    std::vector<double> v(a.values_);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] -= b.values_[c];
    return GridFunction(a.domain_, std::move(v));
}

bool GridFunction::operator==(const GridFunction& other) const {
    return domain_->same_lattice(*other.domain_) && values_ == other.values_;
}

// ---------------------------------------------------------------------------

VectorField::VectorField(DomainPtr domain, std::vector<double> components)
    : domain_(std::move(domain)), components_(std::move(components)) {
    if (components_.size() != domain_->cell_count() * static_cast<std::size_t>(domain_->dimension())) {
        throw InvalidArgument("VectorField size does not match domain");
    }
    for (double x : components_) {
        if (!std::isfinite(x)) throw InvalidArgument("VectorField component is not finite");
    }
}

double VectorField::norm_at(std::size_t cell) const noexcept {
    double s = 0.0;
    for (double x : at(cell)) s += x * x;
    return std::sqrt(s);
}

VectorField gradient(const GridFunction& u) {
    const Domain& d = u.domain();
    const int dim = d.dimension();
    const int n = d.cells_per_axis();
    const double inv_h = 1.0 / d.spacing();
    std::vector<double> comps(d.cell_count() * static_cast<std::size_t>(dim), 0.0);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const LatticeIndex idx = d.index_of(c);
        for (int k = 0; k < dim; ++k) {
            const bool last = idx[static_cast<std::size_t>(k)] == n - 1;
            const double next = last ? 0.0 : u[c + d.stride(k)];
            comps[c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = (next - u[c]) * inv_h;
        }
    }
    return VectorField(u.domain_ptr(), std::move(comps));
}

double integrate(std::span<const double> values, const Domain& domain) {
    if (values.size() != domain.cell_count()) throw InvalidArgument("integrate: size does not match domain");
    double s = 0.0;
    for (std::size_t c = 0; c < values.size(); ++c) {
        if (domain.active(c)) s += values[c];
    }
    return s * domain.cell_volume();
}

double integrate(const GridFunction& u) { return integrate(u.values(), u.domain()); }

double lp_norm(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
    const Domain& d = u.domain();
    double s = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (d.active(c)) s += std::pow(std::abs(u[c]), p);
    }
    return std::pow(s * d.cell_volume(), 1.0 / p);
}

double superlevel_measure(const GridFunction& u, double t) {
    const Domain& d = u.domain();
    std::size_t count = 0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (d.active(c) && u[c] > t) ++count;
    }
    return static_cast<double>(count) * d.cell_volume();
}

double gradient_pnorm(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("gradient_pnorm requires p >= 1");
    const Domain& d = u.domain();
    const VectorField du = gradient(u);
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) s += std::pow(du.norm_at(c), p);
    const double inv_h = 1.0 / d.spacing();
    for_each_inflow_edge(d, [&](std::size_t c, int) { s += std::pow(std::abs(u[c]) * inv_h, p); });
    return s * d.cell_volume();
}

double edge_pnorm_sum(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("edge_pnorm_sum requires p >= 1");
    const Domain& d = u.domain();
    const VectorField du = gradient(u);
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        for (double x : du.at(c)) s += std::pow(std::abs(x), p);
    }
    const double inv_h = 1.0 / d.spacing();
    for_each_inflow_edge(d, [&](std::size_t c, int) { s += std::pow(std::abs(u[c]) * inv_h, p); });
    return s;
}

double tail_norm(const GridFunction& u, double p, double shell) {
    const Domain& d = u.domain();
    const double inner = (1.0 - shell) * d.extent();
    double s = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c)) continue;
        const Point x = d.center(c);
        double r = 0.0;
        if (d.kind() == DomainKind::Ball) {
            r = d.radius(c);
        } else {
            for (int k = 0; k < d.dimension(); ++k) r = std::max(r, std::abs(x[static_cast<std::size_t>(k)]));
        }
        if (r > inner) s += std::pow(std::abs(u[c]), p);
    }
    return std::pow(s * d.cell_volume(), 1.0 / p);
}

double smooth_bump_value(double rho) {
    if (rho >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
}

GridFunction smooth_bump(DomainPtr domain, const Point& center, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("bump radius must be positive");
    const int dim = domain->dimension();
    return GridFunction::sample(std::move(domain), [&](const Point& x) {
        double r2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double dx = x[static_cast<std::size_t>(k)] - center[static_cast<std::size_t>(k)];
            r2 += dx * dx;
        }
        return smooth_bump_value(std::sqrt(r2) / radius);
    });
}

// ---------------------------------------------------------------------------

namespace {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line) {
    // strtod handles every form to_chars emits and rounds correctly.
    std::string s(text);
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw FormatError("line " + std::to_string(line) + ": expected a real number, got '" + s + "'");
    }
    return v;
}

}  // namespace

void write_csv(const GridFunction& u, std::ostream& out) {
    const Domain& d = u.domain();
    out << "N," << d.dimension() << ",kind," << to_string(d.kind()) << ",extent," << format_double(d.extent())
        << ",n," << d.cells_per_axis() << '\n';
    for (double v : u.values()) out << format_double(v) << '\n';
}

GridFunction read_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw FormatError("line 1: missing header");
    std::vector<std::string> fields;
    {
        std::stringstream ss(header);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
    }
    if (!fields.empty()) {
        auto& last = fields.back();
        while (!last.empty() && (last.back() == '\r' || last.back() == ' ')) last.pop_back();
    }
    if (fields.size() != 8 || fields[0] != "N" || fields[2] != "kind" || fields[4] != "extent" || fields[6] != "n") {
        throw FormatError("line 1: header must be N,<dim>,kind,<ball|box>,extent,<R>,n,<cells>");
    }
    int dim = 0;
    int n = 0;
    try {
        dim = std::stoi(fields[1]);
        n = std::stoi(fields[7]);
    } catch (const std::exception&) {
        throw FormatError("line 1: dimension and n must be integers");
    }
    DomainPtr domain;
    try {
        domain = make_domain(parse_domain_kind(fields[3]), parse_double(fields[5], 1), dim, n);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("line 1: ") + e.what());
    }

    std::vector<double> values;
    values.reserve(domain->cell_count());
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        values.push_back(parse_double(line, lineno));
    }
    if (values.size() != domain->cell_count()) {
        throw FormatError("expected " + std::to_string(domain->cell_count()) + " values, found " +
                          std::to_string(values.size()));
    }
    try {
        return GridFunction(domain, std::move(values));
    } catch (const InvalidArgument& e) {
        throw FormatError(e.what());
    }
}

void write_csv_file(const GridFunction& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_csv(u, out);
}

GridFunction read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return read_csv(in);
}

}  // namespace symm
