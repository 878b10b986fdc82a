#pragma once

#include <vector>

namespace oracle {

/// Even decaying solution of u'' = -lambda u - (c sigma / 2) u^(sigma-1) on [0, x_max],
/// normalized so that 2 int_0^x_max u^2 = mass. Found by RK4 shooting: an inner bisection on
/// u(0) for fixed lambda and an outer bisection on lambda for the mass.
struct GroundState {
    double lambda = 0.0;
    double amplitude = 0.0;
    double dx = 0.0;
    std::vector<double> u;  ///< u(k dx), k = 0..

    /// Linear interpolation in |x|, zero past the table.
    double operator()(double x) const;
};

GroundState nls_ground_state(double sigma, double c, double mass, double x_max = 12.0, double dx = 1e-3);

}  // namespace oracle
