#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "symm/grid.hpp"

namespace symm {

/// Closed half-space {x : a.x <= b} with unit normal a and offset b > 0, so the origin is interior.
class HalfSpace {
public:
    HalfSpace(std::span<const double> normal, double offset);

    /// Half-space with normal sign * e_axis.
    static HalfSpace axis_aligned(int dimension, int axis, int sign, double offset);

    int dimension() const noexcept { return dimension_; }
    const Point& normal() const noexcept { return normal_; }
    double offset() const noexcept { return offset_; }

    bool contains(const Point& x) const noexcept { return dot(x) <= offset_; }
    /// x_H = x - 2 (a.x - b) a.
    Point reflect(const Point& x) const noexcept;

    /// Axis index when the normal is +-e_k, otherwise nullopt.
    std::optional<int> axis() const noexcept;
    int axis_sign() const noexcept;

private:
    double dot(const Point& x) const noexcept;

    int dimension_;
    Point normal_{0.0, 0.0, 0.0};
    double offset_;
};

/// Reflection maps cell centers onto cell centers: axis normal and 2b/h integral.
bool is_lattice_exact(const HalfSpace& h, const Domain& domain);

enum class PolarizerMode { LatticeExact, General };

std::string to_string(PolarizerMode mode);
PolarizerMode parse_polarizer_mode(std::string_view name);

struct PolarizerSequence {
    PolarizerMode mode = PolarizerMode::LatticeExact;
    std::uint64_t seed = 0;
    std::vector<HalfSpace> entries;
};

void to_json(nlohmann::json& j, const HalfSpace& h);
void from_json(const nlohmann::json& j, PolarizerSequence& seq);
void to_json(nlohmann::json& j, const PolarizerSequence& seq);

/**
 * Polarization u^H: max{u(x), u(x_H)} on H, min{u(x), u(x_H)} off H, for the zero extension
 * of u restricted back to the domain. Lattice-exact half-spaces use the exact cell pairing;
 * any other half-space reads u(x_H) by multilinear interpolation (zero past the lattice).
 */
GridFunction polarize(const GridFunction& u, const HalfSpace& h);

/**
 * Discrete Schwarz symmetrization: active-cell values sorted descending are assigned to
 * active cells ordered by (distance to origin, row-major index). Exact integer distance
 * keys make the tie rule independent of rounding.
 */
GridFunction schwarz_rearrange(const GridFunction& u);

/**
 * LatticeExact: normals uniform on {+-e_k}, offsets uniform on {h, 2h, ..., floor((R-h)/h) h}.
 * General: normals uniform on the unit sphere, offsets uniform in (0, R/2].
 */
PolarizerSequence polarizer_sequence(PolarizerMode mode, std::uint64_t seed, int count, const Domain& domain);

struct PolarizationTrace {
    std::vector<double> distance;          ///< ||u_m - u*||_p
    std::vector<double> gradient_pnorm;    ///< ||Du_m||_p^p
    std::vector<double> energy;            ///< supplied energy of u_m; empty when none given
    bool reached_tolerance = false;
};

struct IteratedPolarizationOptions {
    double p = 2.0;
    std::function<double(const GridFunction&)> energy;
    /// Called as observer(m, u_m) after each step m >= 1.
    std::function<void(int, const GridFunction&)> observer;
};

struct IteratedPolarization {
    GridFunction result;
    PolarizationTrace trace;
};

/// u_m = u^{H_1 ... H_m}; stops when ||u_m - u*||_p <= tol ||u||_p or after max_steps.
/// The sequence is reused cyclically when max_steps exceeds its length.
IteratedPolarization iterated_polarization(const GridFunction& u, const PolarizerSequence& seq, double tol,
                                           int max_steps, const IteratedPolarizationOptions& opts = {});

/// 1e-8 max(u*) / h.
double default_grad_eps(const GridFunction& u_star);

/// h^N #{active cells : |Du*| <= eps and 0 < u* < max u* - eps h}.
double critical_set_measure(const GridFunction& u_star, double grad_eps);
double critical_set_measure(const GridFunction& u_star);

}  // namespace symm
