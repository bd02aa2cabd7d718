#include "pshenv/ma_operator.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "pshenv/error.hpp"

namespace pshenv {

double line_laplacian(const GridFunction& u, std::size_t node, int d) {
    const Grid& g = u.grid();
    if (node >= g.size() || !g.is_interior(node))
        throw Error(ErrorCode::MissingNeighbor, "line Laplacian requested at a non-interior node");
    if (d < 0 || d >= static_cast<int>(g.stencil().directions().size()))
        throw Error(ErrorCode::InvalidArgument, "direction index out of range");
    MaKernel k(g);
    return k.gather(u.values().data(), node).line_laplacian(d, u[node]);
}

GridFunction ma_density(const GridFunction& u) {
    const Grid& g = u.grid();
    std::vector<double> out(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i : g.band()) out[i] = 0.0;
    MaKernel k(g);
    const double* v = u.values().data();
    const auto& nodes = g.interior();
    const auto count = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        std::size_t i = nodes[static_cast<std::size_t>(t)];
        out[i] = k.density(v, i);
    }
    return GridFunction(u.grid_ptr(), std::move(out));
}

PshReport is_discretely_psh(const GridFunction& u, double tol) {
    const Grid& g = u.grid();
    MaKernel k(g);
    PshReport rep;
    rep.worst = std::numeric_limits<double>::infinity();
    const double* v = u.values().data();
    for (std::size_t i : g.interior()) {
        auto ls = k.gather(v, i);
        for (int d = 0; d < ls.ndirs; ++d) {
            double l = ls.line_laplacian(d, v[i]);
            if (l < rep.worst) {
                rep.worst = l;
                rep.node = i;
                rep.direction = d;
            }
        }
    }
    rep.psh = rep.worst >= -tol;
    return rep;
}

double ma_integral(const GridFunction& u, const GridSet* region) {
    const Grid& g = u.grid();
    if (region && !region->grid().same_as(g))
        throw Error(ErrorCode::GridMismatch, "region lives on a different grid");
    auto dens = ma_density(u);
    std::vector<double> terms;
    terms.reserve(g.interior().size());
    for (std::size_t i : g.interior())
        if (!region || region->contains(i)) terms.push_back(dens[i]);
    return pairwise_sum(terms) * std::pow(g.spacing(), 2 * g.dim());
}

}  // namespace pshenv
