#pragma once

#include <vector>

#include "pshenv/envelope.hpp"

namespace pshenv {

/// Interior nodes with |x - center| <= radius (closed ball).
GridSet closed_ball_nodes(GridPtr grid, const std::vector<double>& center, double radius);

/// h_E = P(-chi_E, 0, Omega): obstacle -1 on E and 0 elsewhere (band
/// included), density 0. Throws EmptySet.
EnvelopeResult relative_extremal(const GridSet& E, const EnvelopeOptions& options = {});

struct CapacityResult {
    double value = 0.0;
    EnvelopeResult extremal;
};

/// Cap(E, Omega) = ma_integral(h_E) over the whole interior. The empty set
/// has capacity 0 here (no solve), unlike relative_extremal.
CapacityResult capacity(const GridSet& E, const EnvelopeOptions& options = {});

/// (2 pi / log(1/r))^n, the capacity of the closed ball of radius r in the
/// unit ball of C^n.
double ball_capacity_exact(int n, double r);

}  // namespace pshenv
