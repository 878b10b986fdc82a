#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "symm/grid.hpp"

namespace oracle {

/// Active-cell values, sorted descending.
inline std::vector<double> sorted_values(const symm::GridFunction& u) {
    std::vector<double> v;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (u.domain().active(c)) v.push_back(u[c]);
    }
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

/// Counts active cells above t directly.
inline double superlevel_count_measure(const symm::GridFunction& u, double t) {
    std::size_t n = 0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (u.domain().active(c) && u[c] > t) ++n;
    }
    return static_cast<double>(n) * u.domain().cell_volume();
}

/// Sum of |u_a - u_b|^p / h^p over every lattice edge, reading zero past the lattice and on
/// masked cells, times h^N. Walks the index space with no reuse of library stencils.
inline double edge_energy(const symm::GridFunction& u, double p) {
    const symm::Domain& d = u.domain();
    const int n = d.cells_per_axis();
    const int dim = d.dimension();
    auto value = [&](symm::LatticeIndex idx) {
        for (int k = 0; k < dim; ++k) {
            if (idx[static_cast<std::size_t>(k)] < 0 || idx[static_cast<std::size_t>(k)] >= n) return 0.0;
        }
        return u[d.cell_of(idx)];
    };
    double s = 0.0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const symm::LatticeIndex idx = d.index_of(c);
        double grad2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            symm::LatticeIndex nb = idx;
            nb[static_cast<std::size_t>(k)] += 1;
            const double diff = (value(nb) - value(idx)) / d.spacing();
            grad2 += diff * diff;
        }
        s += std::pow(grad2, 0.5 * p);
        for (int k = 0; k < dim; ++k) {
            if (idx[static_cast<std::size_t>(k)] == 0) s += std::pow(std::abs(value(idx)) / d.spacing(), p);
        }
    }
    return s * d.cell_volume();
}

}  // namespace oracle
