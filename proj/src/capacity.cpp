#include "pshenv/capacity.hpp"

#include <cmath>
#include <numbers>

#include "pshenv/error.hpp"

namespace pshenv {

GridSet closed_ball_nodes(GridPtr grid, const std::vector<double>& center, double radius) {
    if (static_cast<int>(center.size()) != grid->axes())
        throw Error(ErrorCode::InvalidArgument, "ball center has wrong number of components");
    GridSet s(grid);
    for (std::size_t i : grid->interior()) {
        auto x = grid->coords(i);
        double q = 0.0;
        for (int a = 0; a < grid->axes(); ++a) q += (x[a] - center[a]) * (x[a] - center[a]);
        if (q <= radius * radius) s.insert(i);
    }
    return s;
}

EnvelopeResult relative_extremal(const GridSet& E, const EnvelopeOptions& options) {
    if (E.empty()) throw Error(ErrorCode::EmptySet, "relative extremal function of an empty set");
    const GridPtr& grid = E.grid_ptr();
    GridFunction obstacle(grid, 0.0);
    for (std::size_t i : grid->interior())
        if (E.contains(i)) obstacle[i] = -1.0;
    auto zero = DensityField::constant(grid, 0.0);
    return envelope_obstacle(obstacle, zero, options);
}

CapacityResult capacity(const GridSet& E, const EnvelopeOptions& options) {
    CapacityResult c;
    if (E.empty()) return c;
    c.extremal = relative_extremal(E, options);
    c.value = ma_integral(c.extremal.value);
    return c;
}

double ball_capacity_exact(int n, double r) {
    return std::pow(2.0 * std::numbers::pi / std::log(1.0 / r), n);
}

}  // namespace pshenv
