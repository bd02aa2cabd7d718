#include "pshenv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pshenv/error.hpp"

namespace pshenv {

std::array<std::int64_t, 4> Grid::local_index(std::size_t node) const {
    std::array<std::int64_t, 4> k{};
    auto rest = static_cast<std::int64_t>(node);
    for (int a = axes() - 1; a >= 0; --a) {
        k[a] = rest % counts_[a];
        rest /= counts_[a];
    }
    return k;
}

std::array<std::int64_t, 4> Grid::lattice_index(std::size_t node) const {
    auto k = local_index(node);
    for (int a = 0; a < axes(); ++a) k[a] += base_[a];
    return k;
}

std::array<double, 4> Grid::coords(std::size_t node) const {
    auto k = lattice_index(node);
    std::array<double, 4> x{};
    for (int a = 0; a < axes(); ++a) x[a] = static_cast<double>(k[a]) * h_;
    return x;
}

std::size_t Grid::find(std::span<const std::int64_t> lattice) const {
    std::size_t node = 0;
    for (int a = 0; a < axes(); ++a) {
        std::int64_t k = lattice[a] - base_[a];
        if (k < 0 || k >= counts_[a]) return npos;
        node += static_cast<std::size_t>(k * strides_[a]);
    }
    return node;
}

bool Grid::same_as(const Grid& o) const {
    if (this == &o) return true;
    return n_ == o.n_ && h_ == o.h_ && base_ == o.base_ && counts_ == o.counts_ &&
           cls_ == o.cls_ && stencil_.directions() == o.stencil_.directions();
}

void Grid::index_nodes() {
    const int d = axes();
    std::int64_t stride = 1;
    for (int a = d - 1; a >= 0; --a) {
        strides_[a] = stride;
        stride *= counts_[a];
    }
    for (int a = d; a < 4; ++a) strides_[a] = 0;

    taps_.clear();
    for (const auto& dir : stencil_.directions()) {
        auto p = dir.real_offset(false);
        auto q = dir.real_offset(true);
        std::ptrdiff_t op = 0, oq = 0;
        for (int a = 0; a < d; ++a) {
            op += static_cast<std::ptrdiff_t>(p[a] * strides_[a]);
            oq += static_cast<std::ptrdiff_t>(q[a] * strides_[a]);
        }
        taps_.push_back({op, -op, oq, -oq});
    }

    interior_.clear();
    band_.clear();
    const auto& col = stencil_.coloring();
    colors_.assign(static_cast<std::size_t>(col.count), {});
    for (std::size_t i = 0; i < cls_.size(); ++i) {
        if (cls_[i] == NodeClass::Band) band_.push_back(i);
        if (cls_[i] != NodeClass::Interior) continue;
        interior_.push_back(i);
        auto k = local_index(i);
        std::int64_t c = 0;
        for (int a = 0; a < d; ++a) c += col.weights[a] * k[a];
        colors_[static_cast<std::size_t>(c % col.count)].push_back(i);
    }
}

GridPtr Grid::assemble(int n, double h, std::array<std::int64_t, 4> base,
                       std::array<std::int64_t, 4> counts, std::vector<NodeClass> classes,
                       StencilSet stencil) {
    auto g = std::make_shared<Grid>();
    g->n_ = n;
    g->h_ = h;
    g->base_ = base;
    g->counts_ = counts;
    for (int a = 2 * n; a < 4; ++a) g->counts_[a] = 1;
    std::size_t total = 1;
    for (int a = 0; a < 2 * n; ++a) total *= static_cast<std::size_t>(counts[a]);
    if (classes.size() != total)
        throw Error(ErrorCode::InvalidArgument, "classification array has wrong size");
    g->cls_ = std::move(classes);
    g->stencil_ = std::move(stencil);
    g->index_nodes();
    return g;
}

GridPtr build_grid(const DomainSpec& spec, double h, const StencilSet& stencil) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "spacing h must be positive");
    if (stencil.dim() != spec.dim())
        throw Error(ErrorCode::InvalidStencil, "stencil dimension does not match domain");
    const int d = spec.axes();
    const int width = stencil.width();
    const std::int64_t margin = width + 1;
    auto lo = spec.bbox_lo();
    auto hi = spec.bbox_hi();
    std::array<std::int64_t, 4> base{}, counts{1, 1, 1, 1};
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) {
        auto k0 = static_cast<std::int64_t>(std::floor(lo[a] / h)) - margin;
        auto k1 = static_cast<std::int64_t>(std::ceil(hi[a] / h)) + margin;
        base[a] = k0;
        counts[a] = k1 - k0 + 1;
        total *= static_cast<std::size_t>(counts[a]);
    }
    if (total > (std::size_t{1} << 31))
        throw Error(ErrorCode::InvalidArgument, "grid too large; increase h");

    std::vector<NodeClass> cls(total, NodeClass::Exterior);
    // Classification is a pure function of the node coordinates, so the
    // array is identical for identical (spec, h, stencil).
    {
        std::array<std::int64_t, 4> k{};
        double x[4];
        for (std::size_t i = 0; i < total; ++i) {
            for (int a = 0; a < d; ++a) x[a] = static_cast<double>(base[a] + k[a]) * h;
            if (spec.rho(std::span<const double>(x, d)) < 0.0) cls[i] = NodeClass::Interior;
            for (int a = d - 1; a >= 0; --a) {
                if (++k[a] < counts[a]) break;
                k[a] = 0;
            }
        }
    }

    auto grid = Grid::assemble(spec.dim(), h, base, counts, std::move(cls), stencil);
    if (grid->interior().empty())
        throw Error(ErrorCode::EmptyInterior, "no lattice node satisfies rho < 0 at h = " + std::to_string(h));

    std::vector<NodeClass> classes(grid->classes().begin(), grid->classes().end());
    for (std::size_t node : grid->interior()) {
        auto k = grid->local_index(node);
        for (int a = 0; a < d; ++a)
            if (k[a] < width || k[a] >= counts[a] - width)
                throw Error(ErrorCode::UnboundedDomain,
                            "interior node reaches the bounding-box margin");
        for (int dir = 0; dir < static_cast<int>(stencil.directions().size()); ++dir)
            for (std::ptrdiff_t off : grid->taps(dir)) {
                auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + off);
                if (classes[j] == NodeClass::Exterior) classes[j] = NodeClass::Band;
            }
    }
    return Grid::assemble(spec.dim(), h, base, counts, std::move(classes), stencil);
}

GridFunction::GridFunction(GridPtr grid, double value) : grid_(std::move(grid)) {
    v_.assign(grid_->size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i : grid_->interior()) v_[i] = value;
    for (std::size_t i : grid_->band()) v_[i] = value;
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size())
        throw Error(ErrorCode::GridMismatch, "value array does not match grid size");
}

double GridFunction::max_interior() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i : grid_->interior()) m = std::max(m, v_[i]);
    return m;
}

double GridFunction::min_interior() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i : grid_->interior()) m = std::min(m, v_[i]);
    return m;
}

GridSet::GridSet(GridPtr grid) : grid_(std::move(grid)), flags_(grid_->size(), 0) {}

void GridSet::insert(std::size_t node) {
    if (!grid_->is_interior(node))
        throw Error(ErrorCode::InvalidArgument, "grid sets contain interior nodes only");
    flags_[node] = 1;
}

std::size_t GridSet::count() const {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> GridSet::nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flags_.size(); ++i)
        if (flags_[i]) out.push_back(i);
    return out;
}

GridSet GridSet::all_interior(GridPtr grid) {
    GridSet s(grid);
    for (std::size_t i : grid->interior()) s.flags_[i] = 1;
    return s;
}

GridFunction sample(const Expression& expr, GridPtr grid) {
    if (expr.dim() != grid->dim())
        throw Error(ErrorCode::InvalidArgument, "expression dimension does not match grid");
    GridFunction u(grid, 0.0);
    const auto d = static_cast<std::size_t>(grid->axes());
    auto eval = [&](std::size_t node) {
        auto x = grid->coords(node);
        double v = expr(std::span<const double>(x.data(), d));
        if (!std::isfinite(v))
            throw Error(ErrorCode::EvaluationError,
                        "'" + expr.text() + "' is not finite at a grid node");
        u[node] = v;
    };
    for (std::size_t i : grid->interior()) eval(i);
    for (std::size_t i : grid->band()) eval(i);
    return u;
}

std::array<std::int64_t, 4> lattice_offset(const Grid& grid, std::span<const double> a) {
    if (static_cast<int>(a.size()) != grid.axes())
        throw Error(ErrorCode::InvalidArgument, "offset has wrong number of components");
    std::array<std::int64_t, 4> m{};
    for (int k = 0; k < grid.axes(); ++k) {
        double q = a[k] / grid.spacing();
        double r = std::round(q);
        if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
            throw Error(ErrorCode::NonLatticeOffset, "offset component is not a multiple of h");
        m[k] = static_cast<std::int64_t>(r);
    }
    return m;
}

GridPtr translate_grid(const Grid& grid, std::span<const double> a) {
    auto m = lattice_offset(grid, a);
    auto base = grid.base();
    auto counts = grid.counts();
    std::array<std::int64_t, 4> b{}, c{1, 1, 1, 1};
    for (int k = 0; k < grid.axes(); ++k) {
        b[k] = base[k] + m[k];
        c[k] = counts[k];
    }
    return Grid::assemble(grid.dim(), grid.spacing(), b, c,
                          std::vector<NodeClass>(grid.classes().begin(), grid.classes().end()),
                          grid.stencil());
}

GridFunction translate_function(const GridFunction& u, std::span<const double> a) {
    auto g = translate_grid(u.grid(), a);
    return GridFunction(g, std::vector<double>(u.values().begin(), u.values().end()));
}

double sup_diff(const GridFunction& u, const GridFunction& v, const GridSet* region) {
    if (!u.grid().same_as(v.grid()) || (region && !region->grid().same_as(u.grid())))
        throw Error(ErrorCode::GridMismatch, "functions live on different grids");
    double m = 0.0;
    std::size_t seen = 0;
    for (std::size_t i : u.grid().interior()) {
        if (region && !region->contains(i)) continue;
        ++seen;
        m = std::max(m, std::abs(u[i] - v[i]));
    }
    if (seen == 0) throw Error(ErrorCode::EmptyRegion, "sup_diff over an empty region");
    return m;
}

GridFunction restrict_to(const GridFunction& u, GridPtr target) {
    const Grid& src = u.grid();
    if (src.spacing() != target->spacing() || src.dim() != target->dim())
        throw Error(ErrorCode::GridMismatch, "grids do not share a lattice");
    GridFunction out(target, 0.0);
    const auto d = static_cast<std::size_t>(target->axes());
    auto copy = [&](std::size_t i) {
        auto k = target->lattice_index(i);
        std::size_t j = src.find(std::span<const std::int64_t>(k.data(), d));
        if (j == Grid::npos || src.cls(j) == NodeClass::Exterior)
            throw Error(ErrorCode::GridMismatch, "target node is not defined on the source grid");
        out[i] = u[j];
    };
    for (std::size_t i : target->interior()) copy(i);
    for (std::size_t i : target->band()) copy(i);
    return out;
}

GridSet full_stencil_nodes(GridPtr grid) {
    GridSet out(grid);
    const int ndirs = static_cast<int>(grid->stencil().directions().size());
    for (std::size_t i : grid->interior()) {
        bool full = true;
        for (int d = 0; d < ndirs && full; ++d)
            for (std::ptrdiff_t off : grid->taps(d))
                if (!grid->is_interior(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off))) full = false;
        if (full) out.insert(i);
    }
    return out;
}

GridSet nodes_away_from_band(GridPtr grid, double distance) {
    GridSet out(grid);
    const int d = grid->axes();
    const auto reach = static_cast<std::int64_t>(std::ceil(distance / grid->spacing()));
    const double r2 = (distance / grid->spacing()) * (distance / grid->spacing());
    // Offsets strictly closer than `distance`, in lattice units.
    std::vector<std::array<std::int64_t, 4>> ball;
    std::array<std::int64_t, 4> k{};
    for (int a = 0; a < d; ++a) k[a] = -reach;
    while (true) {
        double q = 0.0;
        for (int a = 0; a < d; ++a) q += static_cast<double>(k[a] * k[a]);
        if (q < r2) ball.push_back(k);
        int a = d - 1;
        while (a >= 0 && ++k[a] > reach) k[a--] = -reach;
        if (a < 0) break;
    }
    for (std::size_t i : grid->interior()) {
        auto base = grid->lattice_index(i);
        bool ok = true;
        for (const auto& o : ball) {
            std::array<std::int64_t, 4> q{};
            for (int a = 0; a < d; ++a) q[a] = base[a] + o[a];
            std::size_t j = grid->find(std::span<const std::int64_t>(q.data(), static_cast<std::size_t>(d)));
            if (j == Grid::npos || grid->cls(j) != NodeClass::Interior) {
                ok = false;
                break;
            }
        }
        if (ok) out.insert(i);
    }
    return out;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace pshenv
