#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "symm/functional.hpp"
#include "symm/grid.hpp"

namespace symm {

struct SolverOptions {
    int max_iters = 200000;
    double step0 = 1e-4;
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    double grad_tol = 1e-6;
    double constraint_tol = 1e-10;
    bool enforce_nonneg = true;
    /// Length ell of the descent metric <v, (I + ell^2 A) v>, A the discrete Laplacian.
    /// 0 selects the plain L2 gradient.
    double metric_length = 1.0;
    /// EnergyDiverged is thrown once an accepted iterate falls below this value.
    double energy_floor = -1e8;

    void validate() const;
};

struct MinimizeResult {
    GridFunction u;
    double lambda = 0.0;  ///< multiplier_estimate at u
    double energy = 0.0;
    std::vector<double> energy_trace;
    double constraint_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double projected_gradient_norm = 0.0;
    /// <grad E, g(u)> / <g(u), g(u)> at u; agrees with lambda at a critical point.
    double lambda_from_gradient = 0.0;
};

/// c u with c = (int G(u))^(-1/q). Throws ZeroConstraintMass when int G(u) <= 1e-14.
GridFunction project_to_constraint(const GridFunction& u, const ConstraintModel& G);

/// Centered smooth bump (radius 0.5 R) scaled onto the constraint.
GridFunction default_init(const DomainPtr& domain, const ConstraintModel& G);

/**
 * Projected gradient descent on E over {int G(u) = 1, u >= 0}.
 *
 * Each step moves along the tangential gradient taken in the metric (I + ell^2 A), clamps
 * to u >= 0 and rescales onto the constraint. Convergence is measured on the L2 tangential
 * gradient, whatever the metric. The trial step starts from a Barzilai-Borwein estimate and
 * backtracks until E(u_new) <= E(u) - (c / tau) ||u_new - u||^2. Not converging is reported
 * through `converged == false` with the best iterate.
 */
MinimizeResult minimize(const Integrand& j, const NonlinearityModel& F, const ConstraintModel& G,
                        const DomainPtr& domain, const GridFunction& init, const SolverOptions& opts);

/// Test function and cutoff scale used to report the multiplier of a solver output:
/// a bump of radius R/4 at the maximum of u and k = max(1, max u).
GridFunction multiplier_test_function(const GridFunction& u);
double multiplier_cutoff_scale(const GridFunction& u);

}  // namespace symm
