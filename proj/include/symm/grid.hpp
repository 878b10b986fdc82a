#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symm {

inline constexpr int kMaxDimension = 3;

using Point = std::array<double, kMaxDimension>;
using LatticeIndex = std::array<int, kMaxDimension>;

enum class DomainKind { Ball, Box };

std::string to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

/**
 * Regular lattice of n^N cells covering [-extent, extent]^N.
 *
 * Cell c has center -extent + (i_k + 1/2) h along every axis k, with h = 2 extent / n.
 * Cells are numbered row-major (axis 0 slowest). A Ball domain masks out cells whose
 * center lies outside the open ball of radius extent; a Box keeps every cell active and
 * stands in for R^N with zero extension past the lattice.
 */
class Domain {
public:
    Domain(DomainKind kind, double extent, int dimension, int cells_per_axis);

    DomainKind kind() const noexcept { return kind_; }
    double extent() const noexcept { return extent_; }
    int dimension() const noexcept { return dimension_; }
    int cells_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double cell_volume() const noexcept { return cell_volume_; }
    std::size_t cell_count() const noexcept { return mask_.size(); }
    std::size_t active_count() const noexcept { return active_count_; }
    /// Active measure h^N * #active, the midpoint-rule |Omega|.
    double measure() const noexcept { return cell_volume_ * static_cast<double>(active_count_); }

    bool active(std::size_t cell) const noexcept { return mask_[cell] != 0; }
    std::size_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }

    LatticeIndex index_of(std::size_t cell) const noexcept;
    std::size_t cell_of(const LatticeIndex& idx) const noexcept;
    bool in_lattice(const LatticeIndex& idx) const noexcept;

    Point center(std::size_t cell) const noexcept;
    double coordinate(int i) const noexcept { return -extent_ + (i + 0.5) * h_; }
    double radius(std::size_t cell) const noexcept;

    /// Exact integer key proportional to |center|^2: sum_k (2 i_k + 1 - n)^2.
    long long distance_key(std::size_t cell) const noexcept;

    bool same_lattice(const Domain& other) const noexcept;

private:
    DomainKind kind_;
    double extent_;
    int dimension_;
    int n_;
    double h_;
    double cell_volume_;
    std::size_t active_count_ = 0;
    std::array<std::size_t, kMaxDimension> strides_{};
    std::vector<unsigned char> mask_;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(DomainKind kind, double extent, int dimension, int cells_per_axis);

/// Cell values of a function on a Domain; finite everywhere and zero on inactive cells.
class GridFunction {
public:
    GridFunction(DomainPtr domain, std::vector<double> values);

    static GridFunction zeros(DomainPtr domain);
    /// Samples f at active cell centers; inactive cells are set to zero.
    static GridFunction sample(DomainPtr domain, const std::function<double(const Point&)>& f);

    const Domain& domain() const noexcept { return *domain_; }
    const DomainPtr& domain_ptr() const noexcept { return domain_; }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t cell) const noexcept { return values_[cell]; }
    std::size_t size() const noexcept { return values_.size(); }

    bool nonnegative() const noexcept;
    double max() const noexcept;
    double min() const noexcept;

    GridFunction scaled(double factor) const;

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator*(double factor, const GridFunction& a) { return a.scaled(factor); }

    bool operator==(const GridFunction& other) const;

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

/// Forward differences, N components per lattice cell (interleaved).
class VectorField {
public:
    VectorField(DomainPtr domain, std::vector<double> components);

    const Domain& domain() const noexcept { return *domain_; }
    int dimension() const noexcept { return domain_->dimension(); }
    std::size_t size() const noexcept { return domain_->cell_count(); }

    double operator()(std::size_t cell, int axis) const noexcept {
        return components_[cell * static_cast<std::size_t>(dimension()) + static_cast<std::size_t>(axis)];
    }
    std::span<const double> at(std::size_t cell) const noexcept {
        return std::span<const double>(components_).subspan(cell * static_cast<std::size_t>(dimension()),
                                                            static_cast<std::size_t>(dimension()));
    }
    double norm_at(std::size_t cell) const noexcept;

private:
    DomainPtr domain_;
    std::vector<double> components_;
};

/**
 * Forward difference (u(x + h e_k) - u(x)) / h on every lattice cell, reading zero past the
 * lattice and on masked cells. Inactive cells adjacent to the support carry the entry jump.
 */
VectorField gradient(const GridFunction& u);

/// Calls fn(cell, axis) for each lattice cell on the lower face of an axis. These are the
/// edges entering the lattice from the zero extension, with difference u(cell) / h.
template <class Fn>
void for_each_inflow_edge(const Domain& domain, Fn&& fn) {
    for (std::size_t cell = 0; cell < domain.cell_count(); ++cell) {
        const LatticeIndex idx = domain.index_of(cell);
        for (int k = 0; k < domain.dimension(); ++k) {
            if (idx[static_cast<std::size_t>(k)] == 0) fn(cell, k);
        }
    }
}

/// Midpoint quadrature h^N * sum over active cells.
double integrate(std::span<const double> values, const Domain& domain);
double integrate(const GridFunction& u);

double lp_norm(const GridFunction& u, double p);

/// h^N * #{active cells with u > t}.
double superlevel_measure(const GridFunction& u, double t);

/// ||Du||_p^p over the zero-extended lattice: lattice cells plus the inflow edges.
double gradient_pnorm(const GridFunction& u, double p);

/// sum over every lattice edge (including inflow edges) of |difference / h|^p, unweighted.
double edge_pnorm_sum(const GridFunction& u, double p);

/// ||u||_p restricted to the outer shell (|x| > (1 - shell) R on balls, max_k |x_k| > (1 - shell) L on boxes).
double tail_norm(const GridFunction& u, double p, double shell = 0.1);

/// C-infinity bump exp(1 - 1 / (1 - |x - c|^2 / r^2)), peak 1, support radius r.
GridFunction smooth_bump(DomainPtr domain, const Point& center, double radius);
double smooth_bump_value(double rho);

/// CSV: header `N,<dim>,kind,<ball|box>,extent,<R>,n,<cells>` then one value per line,
/// row-major. Values are written with 17 significant digits so reading back is bit-exact.
void write_csv(const GridFunction& u, std::ostream& out);
GridFunction read_csv(std::istream& in);
void write_csv_file(const GridFunction& u, const std::string& path);
GridFunction read_csv_file(const std::string& path);

}  // namespace symm
