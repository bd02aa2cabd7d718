#include "pshenv/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "pshenv/error.hpp"
#include "pshenv/sweep.hpp"

namespace pshenv {

RHSSpec RHSSpec::constant(DensityField f) {
    RHSSpec r;
    r.f_ = std::move(f);
    return r;
}

RHSSpec RHSSpec::penalized(DensityField g, DensityField f, GridFunction u0, double j) {
    if (!(j >= 0.0) || !std::isfinite(j))
        throw Error(ErrorCode::NonMonotoneRHS, "penalization exponent j must be finite and >= 0");
    if (!g.grid().same_as(f.grid()) || !u0.grid().same_as(f.grid()))
        throw Error(ErrorCode::GridMismatch, "penalized right-hand side fields live on different grids");
    RHSSpec r;
    r.f_ = std::move(f);
    r.g_ = std::move(g);
    r.u0_ = std::move(u0);
    r.j_ = j;
    r.penalized_ = true;
    return r;
}

double RHSSpec::operator()(std::size_t node, double s) const {
    if (!penalized_) return f_[node];
    return at(node, 1.0)(s);
}

NodeRHS RHSSpec::at(std::size_t node, double bracket) const {
    NodeRHS r;
    r.f = f_[node];
    r.bracket = bracket;
    if (penalized_) {
        r.g = g_[node];
        r.u0 = u0_[node];
        r.j = j_;
        r.penalized = true;
    }
    return r;
}

std::string to_string(SweepMode mode) { return mode == SweepMode::Sequential ? "seq" : "redblack"; }

SweepMode parse_sweep_mode(const std::string& text) {
    if (text == "seq") return SweepMode::Sequential;
    if (text == "redblack") return SweepMode::RedBlack;
    throw Error(ErrorCode::InvalidArgument, "unknown sweep mode '" + text + "' (expected seq or redblack)");
}

double default_tol(int n) { return n == 1 ? 1e-8 : 1e-7; }

void require_converged(const SolveReport& report, const std::string& what) {
    if (report.converged) return;
    std::ostringstream msg;
    msg << what << " did not converge in " << report.iterations << " sweeps (update " << report.update
        << ", residual " << report.residual << ", tol " << report.tol << ")";
    throw Error(ErrorCode::MaxIterExceeded, msg.str());
}

double local_solve(const LocalStencil& ls, const NodeRHS& rhs, double tol_local, double guess,
                   double min_neighbor) {
    LocalResult r = solve_local(ls, rhs, tol_local, guess, min_neighbor);
    if (r.status == LocalStatus::BracketFailure)
        throw Error(ErrorCode::BracketFailure, "no sign change below the constant-density root");
    return r.value;
}

namespace {

SolveResult run_sweeps(const RHSSpec& rhs, const GridFunction* obstacle, const GridFunction& band_source,
                       const GridFunction& init, const SolveOptions& opt) {
    const Grid& g = rhs.grid();
    if (!band_source.grid().same_as(g) || !init.grid().same_as(g))
        throw Error(ErrorCode::GridMismatch, "solver inputs live on different grids");
    const double tol = opt.tol > 0.0 ? opt.tol : default_tol(g.dim());
    const double h = g.spacing();
    const double residual_trigger = tol * h * h / 4.0;

    std::vector<double> u(init.values().begin(), init.values().end());
    for (std::size_t i : g.band()) u[i] = band_source[i];

    SweepProblem problem(rhs, obstacle, tol);
    SolveReport rep;
    rep.tol = tol;
    bool went_up = false, went_down = false;
    const double slack = tol / 10.0;
    auto t0 = std::chrono::steady_clock::now();

    while (rep.iterations < opt.max_iter) {
        SweepStats st = opt.mode == SweepMode::Sequential ? sweep_serial(problem, u.data())
                                                          : sweep_parallel(problem, u.data());
        ++rep.iterations;
        if (st.bracket_failed)
            throw Error(ErrorCode::BracketFailure, "local solve found no bracket (non-finite neighbor data?)");
        went_up = went_up || st.max_up > slack;
        went_down = went_down || st.max_down > slack;
        rep.update = st.update();
        if (!std::isfinite(rep.update))
            throw Error(ErrorCode::EvaluationError, "solver produced non-finite values");
        if (rep.update <= residual_trigger) {
            rep.residual = residual_sup(problem, u.data(), opt.mode);
            if (rep.residual <= tol && rep.update <= tol) {
                rep.converged = true;
                break;
            }
        }
    }
    if (!rep.converged) rep.residual = residual_sup(problem, u.data(), opt.mode);
    rep.monotone_sweeps_ok = !(went_up && went_down);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {GridFunction(init.grid_ptr(), std::move(u)), rep};
}

}  // namespace

SolveResult solve_dirichlet(const RHSSpec& rhs, const GridFunction& boundary, const GridFunction& init,
                            const SolveOptions& options) {
    return run_sweeps(rhs, nullptr, boundary, init, options);
}

SolveResult solve_obstacle(const RHSSpec& rhs, const GridFunction& obstacle, const GridFunction& init,
                           const SolveOptions& options) {
    if (!obstacle.grid().same_as(rhs.grid()))
        throw Error(ErrorCode::GridMismatch, "obstacle lives on a different grid");
    return run_sweeps(rhs, &obstacle, obstacle, init, options);
}

ResidualNorms residual(const GridFunction& u, const RHSSpec& rhs) {
    const Grid& g = rhs.grid();
    if (!u.grid().same_as(g)) throw Error(ErrorCode::GridMismatch, "u and rhs live on different grids");
    SweepProblem problem(rhs, nullptr, default_tol(g.dim()));
    std::vector<double> terms;
    terms.reserve(g.interior().size());
    ResidualNorms out;
    for (std::size_t i : g.interior()) {
        double r = problem.residual(u.values().data(), i);
        out.sup = std::max(out.sup, r);
        terms.push_back(r);
    }
    out.l1 = pairwise_sum(terms) * std::pow(g.spacing(), 2 * g.dim());
    return out;
}

}  // namespace pshenv
