#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pshenv/domain.hpp"
#include "pshenv/expression.hpp"
#include "pshenv/stencil.hpp"

namespace pshenv {

enum class NodeClass : std::uint8_t { Exterior = 0, Interior = 1, Band = 2 };

/// Uniform lattice h*Z^{2n} restricted to a box around a domain.
///
/// Nodes are stored densely in row-major order (last real axis fastest).
/// Node k has real coordinates (base + k) * h, so grids of different domains
/// built with the same h share one global lattice.
class Grid {
public:
    int dim() const { return n_; }
    int axes() const { return 2 * n_; }
    double spacing() const { return h_; }
    const StencilSet& stencil() const { return stencil_; }

    std::size_t size() const { return cls_.size(); }
    std::span<const std::int64_t> base() const { return {base_.data(), std::size_t(axes())}; }
    std::span<const std::int64_t> counts() const { return {counts_.data(), std::size_t(axes())}; }
    std::span<const std::int64_t> strides() const { return {strides_.data(), std::size_t(axes())}; }
    std::span<const NodeClass> classes() const { return cls_; }
    NodeClass cls(std::size_t node) const { return cls_[node]; }
    bool is_interior(std::size_t node) const { return cls_[node] == NodeClass::Interior; }

    /// Interior / band node indices in row-major order.
    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<std::size_t>& band() const { return band_; }

    /// Interior nodes split by color; each list is in row-major order.
    const std::vector<std::vector<std::size_t>>& color_classes() const { return colors_; }

    /// Flat index offsets for direction d: +xi, -xi, +i xi, -i xi.
    const std::array<std::ptrdiff_t, 4>& taps(int d) const { return taps_[d]; }

    /// Local multi-index of a node (0-based per axis).
    std::array<std::int64_t, 4> local_index(std::size_t node) const;
    /// Global lattice index (base + local).
    std::array<std::int64_t, 4> lattice_index(std::size_t node) const;
    std::array<double, 4> coords(std::size_t node) const;
    /// Node with the given global lattice index, or npos when outside the box.
    std::size_t find(std::span<const std::int64_t> lattice) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Same shape, spacing, base, classes and stencil.
    bool same_as(const Grid& other) const;

    /// Builds a grid from raw parts (used by the file reader and by
    /// translations). Recomputes interior/band lists and colors.
    static std::shared_ptr<const Grid> assemble(int n, double h, std::array<std::int64_t, 4> base,
                                                std::array<std::int64_t, 4> counts,
                                                std::vector<NodeClass> classes,
                                                StencilSet stencil);

private:
    void index_nodes();

    int n_ = 1;
    double h_ = 0.0;
    StencilSet stencil_;
    std::array<std::int64_t, 4> base_{};
    std::array<std::int64_t, 4> counts_{1, 1, 1, 1};
    std::array<std::int64_t, 4> strides_{};
    std::vector<NodeClass> cls_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> band_;
    std::vector<std::vector<std::size_t>> colors_;
    std::vector<std::array<std::ptrdiff_t, 4>> taps_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Classifies the lattice h*Z^{2n} against spec: interior where rho < 0,
/// band where a non-interior node is one stencil offset from an interior
/// node, exterior otherwise.
/// Throws EmptyInterior, UnboundedDomain.
GridPtr build_grid(const DomainSpec& spec, double h, const StencilSet& stencil);

/// Real field on a grid: finite on interior and band nodes, NaN elsewhere.
class GridFunction {
public:
    GridFunction() = default;
    /// Fills interior and band nodes with `value`.
    explicit GridFunction(GridPtr grid, double value = 0.0);
    GridFunction(GridPtr grid, std::vector<double> values);

    const GridPtr& grid_ptr() const { return grid_; }
    const Grid& grid() const { return *grid_; }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }
    double operator[](std::size_t node) const { return v_[node]; }
    double& operator[](std::size_t node) { return v_[node]; }

    /// Max over interior nodes (band excluded).
    double max_interior() const;
    double min_interior() const;

private:
    GridPtr grid_;
    std::vector<double> v_;
};

/// Boolean membership over interior nodes.
class GridSet {
public:
    GridSet() = default;
    explicit GridSet(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    bool contains(std::size_t node) const { return flags_[node] != 0; }
    /// Throws InvalidArgument if the node is not interior.
    void insert(std::size_t node);
    void erase(std::size_t node) { flags_[node] = 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<std::size_t> nodes() const;
    std::span<const std::uint8_t> flags() const { return flags_; }

    static GridSet all_interior(GridPtr grid);

private:
    GridPtr grid_;
    std::vector<std::uint8_t> flags_;
};

/// Evaluates expr at interior and band nodes. Throws EvaluationError on
/// non-finite values.
GridFunction sample(const Expression& expr, GridPtr grid);

/// Interprets `a` (2n reals) as a lattice offset; throws NonLatticeOffset
/// when some component is not an integer multiple of h.
std::array<std::int64_t, 4> lattice_offset(const Grid& grid, std::span<const double> a);

/// The same grid moved by lattice vector `a` (exact relabeling).
GridPtr translate_grid(const Grid& grid, std::span<const double> a);

/// v(z + a) = u(z) on the translated grid; no interpolation.
GridFunction translate_function(const GridFunction& u, std::span<const double> a);

/// max |u - v| over a region of interior nodes; the whole interior when
/// region is null. Throws GridMismatch, EmptyRegion.
double sup_diff(const GridFunction& u, const GridFunction& v, const GridSet* region = nullptr);

/// Values of u at the interior and band nodes of `target`, which must lie on
/// the same lattice (same h) with every such node defined in u's grid.
/// Throws GridMismatch otherwise.
GridFunction restrict_to(const GridFunction& u, GridPtr target);

/// Interior nodes all of whose stencil neighbors are interior.
GridSet full_stencil_nodes(GridPtr grid);

/// Interior nodes at Euclidean distance >= distance from every band node.
GridSet nodes_away_from_band(GridPtr grid, double distance);

/// Pairwise (cascade) summation in index order; fixed association so the
/// result does not depend on how the values were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace pshenv
