#include "symm/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "symm/error.hpp"

namespace symm {

HalfSpace::HalfSpace(std::span<const double> normal, double offset)
    : dimension_(static_cast<int>(normal.size())), offset_(offset) {
    if (dimension_ < 1 || dimension_ > kMaxDimension) throw InvalidArgument("half-space normal must have 1-3 components");
    double norm2 = 0.0;
    for (std::size_t k = 0; k < normal.size(); ++k) {
        if (!std::isfinite(normal[k])) throw InvalidArgument("half-space normal is not finite");
        normal_[k] = normal[k];
        norm2 += normal[k] * normal[k];
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw InvalidArgument("half-space normal must be a unit vector");
    if (!(offset > 0.0) || !std::isfinite(offset)) {
        throw InvalidArgument("half-space offset must be positive (origin in the interior)");
    }
}

HalfSpace HalfSpace::axis_aligned(int dimension, int axis, int sign, double offset) {
    if (axis < 0 || axis >= dimension) throw InvalidArgument("half-space axis out of range");
    std::vector<double> a(static_cast<std::size_t>(dimension), 0.0);
    a[static_cast<std::size_t>(axis)] = sign >= 0 ? 1.0 : -1.0;
    return HalfSpace(a, offset);
}

double HalfSpace::dot(const Point& x) const noexcept {
    double s = 0.0;
    for (int k = 0; k < dimension_; ++k) s += normal_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
    return s;
}

Point HalfSpace::reflect(const Point& x) const noexcept {
    const double t = 2.0 * (dot(x) - offset_);
    Point y = x;
    for (int k = 0; k < dimension_; ++k) y[static_cast<std::size_t>(k)] -= t * normal_[static_cast<std::size_t>(k)];
    return y;
}

std::optional<int> HalfSpace::axis() const noexcept {
    std::optional<int> found;
    for (int k = 0; k < dimension_; ++k) {
        const double a = normal_[static_cast<std::size_t>(k)];
        if (a == 0.0) continue;
        if (std::abs(a) != 1.0 || found) return std::nullopt;
        found = k;
    }
    return found;
}

int HalfSpace::axis_sign() const noexcept {
    const auto k = axis();
    return k && normal_[static_cast<std::size_t>(*k)] < 0.0 ? -1 : 1;
}

namespace {

// Twice the offset in units of h, when integral.
std::optional<long long> doubled_offset_steps(const HalfSpace& h, const Domain& d) {
    const double m = 2.0 * h.offset() / d.spacing();
    const double r = std::round(m);
    if (std::abs(m - r) > 1e-9 * std::max(1.0, std::abs(m))) return std::nullopt;
    return static_cast<long long>(r);
}

GridFunction polarize_exact(const GridFunction& u, int axis, int sign, long long m) {
    const Domain& d = u.domain();
    const int n = d.cells_per_axis();
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c)) continue;
        LatticeIndex idx = d.index_of(c);
        const int j = idx[static_cast<std::size_t>(axis)];
        // s x_k <= b  <=>  s (2j + 1 - n) <= m   (both sides scaled by 2/h)
        const bool in_h = sign * (2LL * j + 1 - n) <= m;
        const long long jr = sign * m + n - 1 - j;
        double mirrored = 0.0;
        if (jr >= 0 && jr < n) {
            idx[static_cast<std::size_t>(axis)] = static_cast<int>(jr);
            mirrored = u[d.cell_of(idx)];
        }
        out[c] = in_h ? std::max(u[c], mirrored) : std::min(u[c], mirrored);
    }
    return GridFunction(u.domain_ptr(), std::move(out));
}

double interpolate(const GridFunction& u, const Point& x) {
    const Domain& d = u.domain();
    const int dim = d.dimension();
    const int n = d.cells_per_axis();
    std::array<int, kMaxDimension> base{0, 0, 0};
    std::array<double, kMaxDimension> frac{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) {
        const double xi = (x[static_cast<std::size_t>(k)] + d.extent()) / d.spacing() - 0.5;
        const double fl = std::floor(xi);
        if (fl < -1.0 || fl > n) return 0.0;
        base[static_cast<std::size_t>(k)] = static_cast<int>(fl);
        frac[static_cast<std::size_t>(k)] = xi - fl;
    }
    double value = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
        LatticeIndex idx{0, 0, 0};
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            const bool up = (corner >> k) & 1;
            idx[static_cast<std::size_t>(k)] = base[static_cast<std::size_t>(k)] + (up ? 1 : 0);
            w *= up ? frac[static_cast<std::size_t>(k)] : 1.0 - frac[static_cast<std::size_t>(k)];
        }
        if (w == 0.0 || !d.in_lattice(idx)) continue;
        value += w * u[d.cell_of(idx)];
    }
    return value;
}

GridFunction polarize_interpolated(const GridFunction& u, const HalfSpace& h) {
    const Domain& d = u.domain();
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!d.active(c)) continue;
        const Point x = d.center(c);
        const double mirrored = interpolate(u, h.reflect(x));
        out[c] = h.contains(x) ? std::max(u[c], mirrored) : std::min(u[c], mirrored);
    }
    return GridFunction(u.domain_ptr(), std::move(out));
}

void require_nonnegative(const GridFunction& u, const char* what) {
    if (!u.nonnegative()) throw InvalidArgument(std::string(what) + " requires a nonnegative function");
}

}  // namespace

bool is_lattice_exact(const HalfSpace& h, const Domain& domain) {
    return h.dimension() == domain.dimension() && h.axis().has_value() && doubled_offset_steps(h, domain).has_value();
}

std::string to_string(PolarizerMode mode) { return mode == PolarizerMode::LatticeExact ? "LatticeExact" : "General"; }

PolarizerMode parse_polarizer_mode(std::string_view name) {
    if (name == "LatticeExact" || name == "lattice_exact") return PolarizerMode::LatticeExact;
    if (name == "General" || name == "general") return PolarizerMode::General;
    throw InvalidArgument("unknown polarizer mode '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const HalfSpace& h) {
    std::vector<double> a(h.normal().begin(), h.normal().begin() + h.dimension());
    j = nlohmann::json{{"normal", a}, {"offset", h.offset()}};
}

void to_json(nlohmann::json& j, const PolarizerSequence& seq) {
    j = nlohmann::json{{"mode", to_string(seq.mode)}, {"seed", seq.seed}, {"entries", seq.entries}};
}

void from_json(const nlohmann::json& j, PolarizerSequence& seq) {
    try {
        seq.mode = parse_polarizer_mode(j.at("mode").get<std::string>());
        seq.seed = j.at("seed").get<std::uint64_t>();
        seq.entries.clear();
        for (const auto& e : j.at("entries")) {
            const auto a = e.at("normal").get<std::vector<double>>();
            seq.entries.emplace_back(a, e.at("offset").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("polarizer sequence: ") + e.what());
    }
}

GridFunction polarize(const GridFunction& u, const HalfSpace& h) {
    require_nonnegative(u, "polarize");
    const Domain& d = u.domain();
    if (h.dimension() != d.dimension()) throw InvalidArgument("half-space dimension does not match domain");
    if (const auto axis = h.axis()) {
        if (const auto m = doubled_offset_steps(h, d)) return polarize_exact(u, *axis, h.axis_sign(), *m);
    }
    return polarize_interpolated(u, h);
}

GridFunction schwarz_rearrange(const GridFunction& u) {
    require_nonnegative(u, "schwarz_rearrange");
    const Domain& d = u.domain();
    std::vector<std::size_t> cells;
    cells.reserve(d.active_count());
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (d.active(c)) cells.push_back(c);
    }
    std::vector<double> sorted;
    sorted.reserve(cells.size());
    for (std::size_t c : cells) sorted.push_back(u[c]);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    std::vector<long long> key(d.cell_count());
    for (std::size_t c : cells) key[c] = d.distance_key(c);
    std::stable_sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

    std::vector<double> out(d.cell_count(), 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) out[cells[i]] = sorted[i];
    return GridFunction(u.domain_ptr(), std::move(out));
}

PolarizerSequence polarizer_sequence(PolarizerMode mode, std::uint64_t seed, int count, const Domain& domain) {
    if (count < 1) throw InvalidArgument("polarizer count must be at least 1");
    const int dim = domain.dimension();
    const double h = domain.spacing();
    const double r = domain.extent();
    std::mt19937_64 rng(seed);
    PolarizerSequence seq{mode, seed, {}};
    seq.entries.reserve(static_cast<std::size_t>(count));

    if (mode == PolarizerMode::LatticeExact) {
        const long long max_steps = static_cast<long long>(std::floor((r - h) / h + 1e-9));
        if (max_steps < 1) throw InvalidArgument("grid too coarse for lattice-exact polarizers");
        std::uniform_int_distribution<int> pick_normal(0, 2 * dim - 1);
        std::uniform_int_distribution<long long> pick_offset(1, max_steps);
        for (int i = 0; i < count; ++i) {
            const int code = pick_normal(rng);
            const long long steps = pick_offset(rng);
            seq.entries.push_back(HalfSpace::axis_aligned(dim, code / 2, code % 2 == 0 ? 1 : -1,
                                                          static_cast<double>(steps) * h));
        }
        return seq;
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        std::vector<double> a(static_cast<std::size_t>(dim));
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& x : a) {
                x = gauss(rng);
                norm += x * x;
            }
        } while (norm < 1e-24);
        norm = std::sqrt(norm);
        for (double& x : a) x /= norm;
        const double b = 0.5 * r * (1.0 - unit(rng));  // (0, R/2]
        seq.entries.emplace_back(a, b);
    }
    return seq;
}

IteratedPolarization iterated_polarization(const GridFunction& u, const PolarizerSequence& seq, double tol,
                                           int max_steps, const IteratedPolarizationOptions& opts) {
    if (seq.entries.empty()) throw InvalidArgument("empty polarizer sequence");
    if (max_steps < 1) throw InvalidArgument("max_steps must be at least 1");
    const GridFunction u_star = schwarz_rearrange(u);
    const double scale = lp_norm(u, opts.p);

    IteratedPolarization out{u, {}};
    for (int m = 0; m < max_steps; ++m) {
        out.result = polarize(out.result, seq.entries[static_cast<std::size_t>(m) % seq.entries.size()]);
        const double dist = lp_norm(out.result - u_star, opts.p);
        out.trace.distance.push_back(dist);
        out.trace.gradient_pnorm.push_back(gradient_pnorm(out.result, opts.p));
        if (opts.energy) out.trace.energy.push_back(opts.energy(out.result));
        if (opts.observer) opts.observer(m + 1, out.result);
        if (dist <= tol * scale) {
            out.trace.reached_tolerance = true;
            break;
        }
    }
    return out;
}

double default_grad_eps(const GridFunction& u_star) {
    const double top = u_star.max();
    const double eps = 1e-8 * top / u_star.domain().spacing();
    return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

double critical_set_measure(const GridFunction& u_star, double grad_eps) {
    if (!(grad_eps > 0.0)) throw InvalidArgument("grad_eps must be positive");
    const Domain& d = u_star.domain();
    const VectorField du = gradient(u_star);
    const double ceiling = u_star.max() - grad_eps * d.spacing();
    std::size_t count = 0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (!d.active(c)) continue;
        const double v = u_star[c];
        if (du.norm_at(c) <= grad_eps && v > 0.0 && v < ceiling) ++count;
    }
    return static_cast<double>(count) * d.cell_volume();
}

double critical_set_measure(const GridFunction& u_star) { return critical_set_measure(u_star, default_grad_eps(u_star)); }

}  // namespace symm
