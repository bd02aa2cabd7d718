#pragma once

#include <string>

#include "pshenv/grid.hpp"

namespace pshenv {

/// Nonnegative density f of a measure f dlambda, sampled on a grid, with the
/// exponent p of the L^p norm it is measured in.
class DensityField {
public:
    DensityField() = default;

    /// Throws ValidationError when a value at an interior node is negative,
    /// or p <= 1.
    static DensityField from_values(GridFunction values, double p = 2.0, std::string source = "grid");
    static DensityField from_expression(const Expression& expr, GridPtr grid, double p = 2.0);
    static DensityField constant(GridPtr grid, double value, double p = 2.0);

    const GridFunction& values() const { return f_; }
    const Grid& grid() const { return f_.grid(); }
    double operator[](std::size_t node) const { return f_[node]; }
    double p() const { return p_; }
    const std::string& source() const { return source_; }

    /// (sum_interior f^p h^{2n})^{1/p}.
    double lp_norm() const;

    double max_interior() const { return f_.max_interior(); }

private:
    GridFunction f_;
    double p_ = 2.0;
    std::string source_;
};

/// Discrete L^p norm of a - b over the interior. Throws GridMismatch.
double lp_distance(const DensityField& a, const DensityField& b, double p);

}  // namespace pshenv
