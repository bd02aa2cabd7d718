#include "pshenv/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "pshenv/error.hpp"

namespace pshenv {

std::string to_string(EnvelopeMethod m) { return m == EnvelopeMethod::Obstacle ? "obstacle" : "berman"; }

EnvelopeTolerances EnvelopeTolerances::for_grid(const Grid& g, double tol) {
    if (!(tol > 0.0)) tol = default_tol(g.dim());
    const double h = g.spacing();
    EnvelopeTolerances t;
    t.tol = tol;
    t.contact = 10.0 * tol;
    t.ma = std::max(1e-6, 10.0 * tol / (h * h));
    t.psh = t.ma;
    return t;
}

namespace {

void fill_sets(EnvelopeResult& r, const GridFunction& u, const DensityField& f) {
    const GridPtr& grid = u.grid_ptr();
    r.contact = GridSet(grid);
    r.active = GridSet(grid);
    auto dens = ma_density(r.value);
    for (std::size_t i : grid->interior()) {
        if (std::abs(r.value[i] - u[i]) <= r.tolerances.contact) r.contact.insert(i);
        if (std::abs(dens[i] - f[i]) <= r.tolerances.ma) r.active.insert(i);
    }
}

double max_diff(const GridFunction& a, const GridFunction& b) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i : a.grid().interior()) m = std::max(m, a[i] - b[i]);
    return m;
}

}  // namespace

EnvelopeResult envelope_obstacle(const GridFunction& u, const DensityField& f, const EnvelopeOptions& options) {
    if (!u.grid().same_as(f.grid())) throw Error(ErrorCode::GridMismatch, "obstacle and density grids differ");
    EnvelopeResult r;
    r.method = EnvelopeMethod::Obstacle;
    r.tolerances = EnvelopeTolerances::for_grid(u.grid(), options.solve.tol);
    SolveOptions so = options.solve;
    so.tol = r.tolerances.tol;
    auto rhs = RHSSpec::constant(f);
    auto sol = solve_obstacle(rhs, u, u, so);
    require_converged(sol.report, "obstacle iteration");
    r.value = std::move(sol.u);
    r.report = sol.report;
    r.total_iterations = sol.report.iterations;
    r.total_seconds = sol.report.seconds;

    if (options.check_maximality) {
        double top = u.max_interior();
        for (std::size_t i : u.grid().band()) top = std::max(top, u[i]);
        GridFunction init(u.grid_ptr(), top);
        auto again = solve_obstacle(rhs, u, init, so);
        require_converged(again.report, "obstacle iteration from sup(u)");
        r.maximality_gap = sup_diff(again.u, r.value);
        r.total_iterations += again.report.iterations;
        r.total_seconds += again.report.seconds;
    }
    fill_sets(r, u, f);
    return r;
}

std::vector<double> geometric_schedule(int k) {
    if (k < 0 || k > 60) throw Error(ErrorCode::InvalidArgument, "schedule exponent out of range");
    std::vector<double> js;
    for (int e = 0; e <= k; ++e) js.push_back(std::ldexp(1.0, e));
    return js;
}

SubsolutionCheck check_subsolution(const GridFunction& u, const DensityField& g, double ma_tol) {
    SubsolutionCheck c;
    auto dens = ma_density(u);
    c.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i : u.grid().interior()) {
        double e = dens[i] - g[i];
        if (e > c.worst_excess) {
            c.worst_excess = e;
            c.node = i;
        }
    }
    c.ok = c.worst_excess <= ma_tol;
    return c;
}

EnvelopeResult envelope_berman(const GridFunction& u, const DensityField& f, const DensityField& g,
                               const std::vector<double>& j_schedule, const EnvelopeOptions& options,
                               const GridFunction* reference) {
    if (j_schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty j schedule");
    if (!u.grid().same_as(f.grid()) || !u.grid().same_as(g.grid()))
        throw Error(ErrorCode::GridMismatch, "obstacle and density grids differ");
    EnvelopeResult r;
    r.method = EnvelopeMethod::Berman;
    r.tolerances = EnvelopeTolerances::for_grid(u.grid(), options.solve.tol);
    r.subsolution = check_subsolution(u, g, r.tolerances.ma);
    SolveOptions so = options.solve;
    so.tol = r.tolerances.tol;

    GridFunction current = u;
    for (std::size_t k = 0; k < j_schedule.size(); ++k) {
        auto rhs = RHSSpec::penalized(g, f, u, j_schedule[k]);
        auto sol = solve_dirichlet(rhs, u, current, so);
        require_converged(sol.report, "penalized solve at j = " + std::to_string(j_schedule[k]));
        BermanStep step;
        step.j = j_schedule[k];
        step.report = sol.report;
        step.above_obstacle = max_diff(sol.u, u);
        step.drop_from_previous = k == 0 ? 0.0 : max_diff(current, sol.u);
        if (reference) step.gap_to_reference = sup_diff(sol.u, *reference);
        r.total_iterations += sol.report.iterations;
        r.total_seconds += sol.report.seconds;
        r.trace.push_back(step);
        r.report = sol.report;
        current = std::move(sol.u);
    }
    r.value = std::move(current);
    fill_sets(r, u, f);
    return r;
}

GridFunction inf_convolution(const GridFunction& u, double m, double r) {
    if (!(r > 0.0) || !(m >= 0.0)) throw Error(ErrorCode::InvalidArgument, "inf-convolution needs r > 0, m >= 0");
    const Grid& g = u.grid();
    const int d = g.axes();
    const double h = g.spacing();
    const auto reach = static_cast<std::int64_t>(std::ceil(r / h));
    struct Offset {
        std::ptrdiff_t flat;
        std::array<std::int64_t, 4> k;
        double len;
    };
    std::vector<Offset> offsets;
    {
        std::array<std::int64_t, 4> k{};
        for (int a = 0; a < d; ++a) k[a] = -reach;
        while (true) {
            double q = 0.0;
            std::ptrdiff_t flat = 0;
            for (int a = 0; a < d; ++a) {
                q += static_cast<double>(k[a] * k[a]);
                flat += static_cast<std::ptrdiff_t>(k[a] * g.strides()[a]);
            }
            double len = std::sqrt(q) * h;
            if (len < r) offsets.push_back({flat, k, len});
            int a = d - 1;
            while (a >= 0 && ++k[a] > reach) k[a--] = -reach;
            if (a < 0) break;
        }
    }
    auto defined = [&](std::size_t node, const Offset& o, std::size_t& target) {
        auto li = g.local_index(node);
        for (int a = 0; a < d; ++a) {
            std::int64_t q = li[a] + o.k[a];
            if (q < 0 || q >= g.counts()[a]) return false;
        }
        target = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + o.flat);
        return g.cls(target) != NodeClass::Exterior;
    };

    std::vector<NodeClass> cls(g.size(), NodeClass::Exterior);
    std::size_t inner = 0;
    for (std::size_t i : g.interior()) {
        bool all = true;
        std::size_t t = 0;
        for (const auto& o : offsets)
            if (!defined(i, o, t)) {
                all = false;
                break;
            }
        if (all) {
            cls[i] = NodeClass::Interior;
            ++inner;
        }
    }
    if (inner == 0) throw Error(ErrorCode::OffsetLeavesDomain, "no node keeps every offset |xi| < r inside the domain");
    const int ndirs = static_cast<int>(g.stencil().directions().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (cls[i] != NodeClass::Interior) continue;
        for (int dd = 0; dd < ndirs; ++dd)
            for (std::ptrdiff_t off : g.taps(dd)) {
                auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off);
                if (cls[j] == NodeClass::Exterior) cls[j] = NodeClass::Band;
            }
    }
    std::array<std::int64_t, 4> base{}, counts{1, 1, 1, 1};
    for (int a = 0; a < d; ++a) {
        base[a] = g.base()[a];
        counts[a] = g.counts()[a];
    }
    auto ig = Grid::assemble(g.dim(), h, base, counts, std::move(cls), g.stencil());
    GridFunction out(ig, 0.0);
    auto eval = [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t t = 0;
        for (const auto& o : offsets)
            if (defined(i, o, t)) best = std::min(best, u[t] + m * o.len);
        out[i] = best;
    };
    for (std::size_t i : ig->interior()) eval(i);
    for (std::size_t i : ig->band()) eval(i);
    return out;
}

ConstraintReport check_constraints(const EnvelopeResult& r, const GridFunction& u, const DensityField& f) {
    ConstraintReport c;
    c.above_obstacle = max_diff(r.value, u);
    c.psh = is_discretely_psh(r.value, r.tolerances.psh);
    auto dens = ma_density(r.value);
    auto full = full_stencil_nodes(r.value.grid_ptr());
    c.ma_deficit = -std::numeric_limits<double>::infinity();
    for (std::size_t i : r.value.grid().interior())
        if (full.contains(i)) c.ma_deficit = std::max(c.ma_deficit, f[i] - dens[i]);
    c.ok = c.above_obstacle <= 2.0 * r.tolerances.tol && c.psh.psh && c.ma_deficit <= r.tolerances.ma;
    return c;
}

IdempotenceReport envelope_idempotence_check(const GridFunction& u, const DensityField& f,
                                             const EnvelopeOptions& options) {
    auto zero = DensityField::constant(u.grid_ptr(), 0.0, f.p());
    auto direct = envelope_obstacle(u, f, options);
    auto psh_part = envelope_obstacle(u, zero, options);
    auto twice = envelope_obstacle(psh_part.value, f, options);
    IdempotenceReport rep;
    rep.tol = direct.tolerances.tol;
    rep.sup_diff = sup_diff(twice.value, direct.value);
    rep.pass = rep.sup_diff <= 5.0 * rep.tol;
    rep.iterations = direct.total_iterations + psh_part.total_iterations + twice.total_iterations;
    return rep;
}

}  // namespace pshenv
