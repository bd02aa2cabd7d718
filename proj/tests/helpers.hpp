#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "pshenv/domain.hpp"
#include "pshenv/grid.hpp"
#include "pshenv/stencil.hpp"

namespace testing {

inline pshenv::DomainSpec unit_ball(int n) {
    return pshenv::DomainSpec::ball(n, std::vector<double>(2 * n, 0.0), 1.0);
}

inline pshenv::GridPtr ball_grid(int n, double h) {
    return pshenv::build_grid(unit_ball(n), h, pshenv::StencilSet::standard(n));
}

/// Node holding the given real coordinates (which must be lattice points).
inline std::size_t node_at(const pshenv::Grid& g, std::initializer_list<double> x) {
    std::vector<std::int64_t> k;
    for (double v : x) k.push_back(std::llround(v / g.spacing()));
    return g.find(k);
}

inline double norm2(const pshenv::Grid& g, std::size_t i) {
    auto x = g.coords(i);
    double s = 0.0;
    for (int a = 0; a < g.axes(); ++a) s += x[a] * x[a];
    return s;
}

}  // namespace testing
