#include "shooting.hpp"

#include <cmath>

namespace oracle {

namespace {

struct Shot {
    std::vector<double> u;
    int outcome = 0;  // +1 crossed zero (too high), -1 turned back up (too low), 0 ran out
};

Shot shoot(double a, double lambda, double sigma, double c, double x_max, double dx) {
    auto accel = [&](double u) { return -lambda * u - 0.5 * c * sigma * std::pow(std::abs(u), sigma - 2.0) * u; };
    Shot s;
    double u = a;
    double v = 0.0;
    s.u.push_back(u);
    const int steps = static_cast<int>(x_max / dx);
    for (int k = 0; k < steps; ++k) {
        const double k1u = v, k1v = accel(u);
        const double k2u = v + 0.5 * dx * k1v, k2v = accel(u + 0.5 * dx * k1u);
        const double k3u = v + 0.5 * dx * k2v, k3v = accel(u + 0.5 * dx * k2u);
        const double k4u = v + dx * k3v, k4v = accel(u + dx * k3u);
        u += dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (u < 0.0) {
            s.outcome = +1;
            return s;
        }
        if (v > 0.0) {
            s.outcome = -1;
            return s;
        }
        s.u.push_back(u);
    }
    return s;
}

// Bisection on u(0); the separatrix is the decaying solution.
std::vector<double> decaying(double lambda, double sigma, double c, double x_max, double dx, double& amplitude) {
    double lo = 0.0, hi = 1.0;
    while (shoot(hi, lambda, sigma, c, x_max, dx).outcome != +1) hi *= 2.0;
    Shot best;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        Shot s = shoot(mid, lambda, sigma, c, x_max, dx);
        if (s.outcome == +1) hi = mid;
        else lo = mid;
        best = std::move(s);
    }
    amplitude = 0.5 * (lo + hi);
    // Past the point where the bisected shot loses accuracy the solution is exponentially small.
    best.u.resize(static_cast<std::size_t>(x_max / dx) + 1, 0.0);
    return best.u;
}

double mass_of(const std::vector<double>& u, double dx) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) s += 0.5 * dx * (u[k] * u[k] + u[k + 1] * u[k + 1]);
    return 2.0 * s;
}

}  // namespace

double GroundState::operator()(double x) const {
    const double t = std::abs(x) / dx;
    const auto k = static_cast<std::size_t>(t);
    if (k + 1 >= u.size()) return 0.0;
    const double w = t - static_cast<double>(k);
    return (1.0 - w) * u[k] + w * u[k + 1];
}

GroundState nls_ground_state(double sigma, double c, double mass, double x_max, double dx) {
    // Mass grows with |lambda| for subcritical powers; bracket and bisect.
    double lo = -1e-3, hi = -1.0;
    double amp = 0.0;
    while (mass_of(decaying(hi, sigma, c, x_max, dx, amp), dx) < mass) hi *= 2.0;
    GroundState g;
    g.dx = dx;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> u = decaying(mid, sigma, c, x_max, dx, amp);
        if (mass_of(u, dx) < mass) lo = mid;
        else hi = mid;
        g.lambda = mid;
        g.amplitude = amp;
        g.u = std::move(u);
    }
    return g;
}

}  // namespace oracle
