#include "pshenv/sweep.hpp"

#include <algorithm>
#include <cmath>

namespace pshenv {

SweepProblem::SweepProblem(const RHSSpec& rhs, const GridFunction* obstacle, double tol)
    : grid_(&rhs.grid()), kernel_(rhs.grid()), rhs_(&rhs), f_(rhs.f().values().values().data()), tol_(tol) {
    tol_local_ = tol / 10.0;
    const double h = grid_->spacing();
    obstacle_scale_ = 4.0 / (h * h);
    t0_ = grid_->taps(0);
    inv0_ = 1.0 / (h * h * static_cast<double>(grid_->stencil().directions()[0].norm2()));
    if (obstacle) obstacle_ = obstacle->values().data();
    if (rhs.is_penalized()) {
        g_ = rhs.g().values().values().data();
        u0_ = rhs.u0().values().data();
        j_ = rhs.j();
        double lo = rhs.u0().min_interior(), hi = rhs.u0().max_interior();
        for (std::size_t i : grid_->band()) {
            lo = std::min(lo, rhs.u0()[i]);
            hi = std::max(hi, rhs.u0()[i]);
        }
        bracket_ = std::max(1.0, 10.0 * (hi - lo));
    }
}

double SweepProblem::unconstrained(const double* u, std::size_t i, bool& bracket_failed) const {
    LocalStencil ls = kernel_.gather(u, i);
    if (!g_) return ls.solve_constant(f_[i]);
    NodeRHS r;
    r.f = f_[i];
    r.g = g_[i];
    r.u0 = u0_[i];
    r.j = j_;
    r.penalized = true;
    r.bracket = bracket_;
    double mn = r.g == 0.0 ? 0.0 : kernel_.min_neighbor(u, i);
    LocalResult res = solve_local(ls, r, tol_local_, u[i], mn);
    if (res.status != LocalStatus::Ok) bracket_failed = true;
    return res.value;
}

double SweepProblem::update(const double* u, std::size_t i, bool& bracket_failed) const {
    double s = unconstrained(u, i, bracket_failed);
    return obstacle_ ? std::min(s, obstacle_[i]) : s;
}

double SweepProblem::residual(const double* u, std::size_t i) const {
    if (obstacle_) {
        bool ignored = false;
        double t = std::min(obstacle_[i], unconstrained(u, i, ignored));
        return std::abs(u[i] - t) * obstacle_scale_;
    }
    LocalStencil ls = kernel_.gather(u, i);
    return std::abs(ls.density(u[i]) - (*rhs_)(i, u[i]));
}

namespace {

template <class Update>
SweepStats serial_loop(const SweepProblem& p, double* u, Update&& update) {
    SweepStats st;
    for (const auto& color : p.grid().color_classes()) {
        for (std::size_t i : color) {
            double s = update(i);
            double d = s - u[i];
            st.max_up = std::max(st.max_up, d);
            st.max_down = std::max(st.max_down, -d);
            u[i] = s;
        }
    }
    return st;
}

template <class Update>
SweepStats parallel_loop(const SweepProblem& p, double* u, Update&& update) {
    double up = 0.0, down = 0.0;
    for (const auto& color : p.grid().color_classes()) {
        const std::size_t* nodes = color.data();
        const auto count = static_cast<std::ptrdiff_t>(color.size());
#pragma omp parallel for schedule(static) reduction(max : up, down)
        for (std::ptrdiff_t t = 0; t < count; ++t) {
            std::size_t i = nodes[t];
            double s = update(i);
            double d = s - u[i];
            up = std::max(up, d);
            down = std::max(down, -d);
            u[i] = s;
        }
    }
    SweepStats st;
    st.max_up = up;
    st.max_down = down;
    return st;
}

}  // namespace

SweepStats sweep_serial(const SweepProblem& p, double* u) {
    if (p.planar_constant())
        return serial_loop(p, u, [&](std::size_t i) { return p.planar_update(u, i); });
    bool failed = false;
    SweepStats st = p.planar_penalized()
                        ? serial_loop(p, u, [&](std::size_t i) { return p.planar_penalized_update(u, i, failed); })
                        : serial_loop(p, u, [&](std::size_t i) { return p.update(u, i, failed); });
    st.bracket_failed = failed;
    return st;
}

SweepStats sweep_parallel(const SweepProblem& p, double* u) {
    if (p.planar_constant())
        return parallel_loop(p, u, [&](std::size_t i) { return p.planar_update(u, i); });
    // Bracket failures are rare and sticky; a relaxed flag is enough.
    int failed = 0;
    const bool planar = p.planar_penalized();
    SweepStats st = parallel_loop(p, u, [&](std::size_t i) {
        bool f = false;
        double s = planar ? p.planar_penalized_update(u, i, f) : p.update(u, i, f);
        if (f) {
#pragma omp atomic write
            failed = 1;
        }
        return s;
    });
    st.bracket_failed = failed != 0;
    return st;
}

double residual_sup(const SweepProblem& p, const double* u, SweepMode mode) {
    const auto& nodes = p.grid().interior();
    const auto count = static_cast<std::ptrdiff_t>(nodes.size());
    double m = 0.0;
    if (mode == SweepMode::Sequential) {
        for (std::size_t i : nodes) m = std::max(m, p.residual(u, i));
        return m;
    }
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t t = 0; t < count; ++t) m = std::max(m, p.residual(u, nodes[static_cast<std::size_t>(t)]));
    return m;
}

}  // namespace pshenv
