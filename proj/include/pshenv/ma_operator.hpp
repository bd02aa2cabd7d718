#pragma once

#include <cstddef>

#include "pshenv/grid.hpp"
#include "pshenv/ma_kernel.hpp"

namespace pshenv {

/// Normalization of the complex Monge-Ampere measure: for smooth u,
/// (dd^c u)^n = c_n det(d^2 u / dz_j dzbar_k) dlambda with c_n = 4^n n!.
/// With n = 1 the density is the plain Laplacian.
struct MAConvention {
    static constexpr double c(int n) { return ma_constant(n); }
};

/// [u(z+h xi) + u(z-h xi) + u(z+ih xi) + u(z-ih xi) - 4u(z)] / (h^2 |xi|^2)
/// for stencil direction index d. Throws MissingNeighbor unless `node` is
/// interior (every neighbor of an interior node is interior or band).
double line_laplacian(const GridFunction& u, std::size_t node, int d);

/// Discrete density of (dd^c u)^n at interior nodes; zero on band nodes,
/// NaN on exterior nodes.
GridFunction ma_density(const GridFunction& u);

struct PshReport {
    bool psh = true;
    double worst = 0.0;  // smallest line Laplacian seen
    std::size_t node = Grid::npos;
    int direction = -1;
};

/// True iff every complex-line Laplacian at every interior node is >= -tol.
PshReport is_discretely_psh(const GridFunction& u, double tol);

/// sum over region of ma_density(u) * h^{2n}, pairwise summation in
/// row-major order. Throws GridMismatch when region lives on another grid.
double ma_integral(const GridFunction& u, const GridSet* region = nullptr);

}  // namespace pshenv
