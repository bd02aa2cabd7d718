#include "pshenv/density.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "pshenv/error.hpp"

namespace pshenv {

DensityField DensityField::from_values(GridFunction values, double p, std::string source) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw Error(ErrorCode::ValidationError, "density exponent p must be a finite number > 1");
    const Grid& g = values.grid();
    for (std::size_t i : g.interior()) {
        if (!std::isfinite(values[i]))
            throw Error(ErrorCode::ValidationError, "density '" + source + "' is not finite");
        if (values[i] < 0.0) {
            std::ostringstream msg;
            msg << "density must be >= 0 ('" << source << "' is " << values[i] << " at a grid node)";
            throw Error(ErrorCode::ValidationError, msg.str());
        }
    }
    DensityField d;
    d.f_ = std::move(values);
    d.p_ = p;
    d.source_ = std::move(source);
    return d;
}

DensityField DensityField::from_expression(const Expression& expr, GridPtr grid, double p) {
    return from_values(sample(expr, std::move(grid)), p, expr.text());
}

DensityField DensityField::constant(GridPtr grid, double value, double p) {
    std::ostringstream s;
    s << value;
    return from_values(GridFunction(std::move(grid), value), p, s.str());
}

namespace {

double lp_sum(const Grid& g, double p, auto&& value) {
    std::vector<double> terms;
    terms.reserve(g.interior().size());
    for (std::size_t i : g.interior()) terms.push_back(std::pow(std::abs(value(i)), p));
    double vol = std::pow(g.spacing(), 2 * g.dim());
    return std::pow(pairwise_sum(terms) * vol, 1.0 / p);
}

}  // namespace

double DensityField::lp_norm() const {
    return lp_sum(grid(), p_, [&](std::size_t i) { return f_[i]; });
}

double lp_distance(const DensityField& a, const DensityField& b, double p) {
    if (!a.grid().same_as(b.grid()))
        throw Error(ErrorCode::GridMismatch, "densities live on different grids");
    return lp_sum(a.grid(), p, [&](std::size_t i) { return a[i] - b[i]; });
}

}  // namespace pshenv
