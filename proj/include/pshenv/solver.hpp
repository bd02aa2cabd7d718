#pragma once

#include <string>

#include "pshenv/density.hpp"
#include "pshenv/grid.hpp"
#include "pshenv/ma_kernel.hpp"

namespace pshenv {

/// Right-hand side F(z, s) of (dd^c u)^n = F(z, u) dlambda:
/// either f(z), or max(g(z) e^{j (s - u0(z))}, f(z)).
class RHSSpec {
public:
    static RHSSpec constant(DensityField f);
    /// Throws NonMonotoneRHS when j < 0 (F would decrease in s) and
    /// GridMismatch when the fields do not share one grid.
    static RHSSpec penalized(DensityField g, DensityField f, GridFunction u0, double j);

    bool is_penalized() const { return penalized_; }
    const DensityField& f() const { return f_; }
    const DensityField& g() const { return g_; }
    const GridFunction& u0() const { return u0_; }
    double j() const { return j_; }
    const Grid& grid() const { return f_.grid(); }

    double operator()(std::size_t node, double s) const;
    NodeRHS at(std::size_t node, double bracket) const;

private:
    DensityField f_, g_;
    GridFunction u0_;
    double j_ = 0.0;
    bool penalized_ = false;
};

enum class SweepMode {
    Sequential,  // serial reference kernel
    RedBlack,    // OpenMP, parallel within each color class
};

std::string to_string(SweepMode mode);
/// "seq" or "redblack"; throws InvalidArgument otherwise.
SweepMode parse_sweep_mode(const std::string& text);

/// 1e-8 for n = 1, 1e-7 for n = 2.
double default_tol(int n);

struct SolveOptions {
    double tol = 0.0;  // 0 selects default_tol(n)
    long max_iter = 1'000'000;
    SweepMode mode = SweepMode::RedBlack;
};

struct SolveReport {
    long iterations = 0;
    double residual = 0.0;  // sup-residual at exit
    double update = 0.0;    // sup-update of the last sweep
    double seconds = 0.0;
    bool monotone_sweeps_ok = true;  // every sweep moved nodes in one common direction
    bool converged = false;
    double tol = 0.0;
};

/// Throws MaxIterExceeded when the report did not converge.
void require_converged(const SolveReport& report, const std::string& what);

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

/// Gauss-Seidel on the colored ordering. Band values are taken from
/// `boundary`, interior start values from `init`. Stops when the sup-update
/// and the sup-residual are both <= tol; otherwise returns the last iterate
/// with converged = false after max_iter sweeps.
SolveResult solve_dirichlet(const RHSSpec& rhs, const GridFunction& boundary, const GridFunction& init,
                            const SolveOptions& options = {});

/// Discrete obstacle problem: sweeps w <- min(obstacle, local solve) with
/// band values from the obstacle. The residual is |w - min(u, T w)| scaled
/// by 4 / h^2 into density units.
SolveResult solve_obstacle(const RHSSpec& rhs, const GridFunction& obstacle, const GridFunction& init,
                           const SolveOptions& options = {});

struct ResidualNorms {
    double sup = 0.0;
    double l1 = 0.0;  // sum |r| h^{2n}
};

/// |MA_local(u) - F(., u)| over the interior.
ResidualNorms residual(const GridFunction& u, const RHSSpec& rhs);

/// Node-level inversion. Throws BracketFailure when no bracket is found.
double local_solve(const LocalStencil& ls, const NodeRHS& rhs, double tol_local, double guess,
                   double min_neighbor);

}  // namespace pshenv
