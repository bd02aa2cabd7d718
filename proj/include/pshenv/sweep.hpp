#pragma once

// Single Gauss-Seidel sweeps over the colored ordering. Exposed for the
// solver, the tests and the kernel benchmark.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pshenv/ma_kernel.hpp"
#include "pshenv/solver.hpp"

namespace pshenv {

class SweepProblem {
public:
    /// obstacle may be null (pure Dirichlet problem).
    SweepProblem(const RHSSpec& rhs, const GridFunction* obstacle, double tol);

    const Grid& grid() const { return *grid_; }
    double tol() const { return tol_; }

    /// New value of interior node i given the current array.
    double update(const double* u, std::size_t i, bool& bracket_failed) const;
    /// Same without the obstacle cap.
    double unconstrained(const double* u, std::size_t i, bool& bracket_failed) const;

    /// Nodewise residual in density units.
    double residual(const double* u, std::size_t i) const;

    bool planar_penalized() const { return grid_->dim() == 1 && g_; }
    /// n = 1 penalized node: G(s) = (S - 4s)/h^2 - max(g e^{j(s - u0)}, f) is
    /// concave and decreasing, so plain Newton from min(u(z), s_f) converges
    /// (at most one overshoot to the right of the root, then monotone).
    double planar_penalized_update(const double* u, std::size_t i, bool& bracket_failed) const {
        const double* c = u + i;
        const double sum = (c[t0_[0]] + c[t0_[1]]) + (c[t0_[2]] + c[t0_[3]]);
        const double f = f_[i], g = g_[i], u0 = u0_[i];
        const double s_f = (sum - f / inv0_) * 0.25;
        double s = s_f;
        if (g != 0.0) {
            s = u[i] < s_f ? u[i] : s_f;
            for (int it = 0; it < 100; ++it) {
                const double pen = g * std::exp(j_ * (s - u0));
                if (s == s_f && pen <= f) break;
                double G = (sum - 4.0 * s) * inv0_;
                double slope = -4.0 * inv0_;
                if (pen > f) {
                    G -= pen;
                    slope -= j_ * pen;
                } else {
                    G -= f;
                }
                if (std::abs(G) <= tol_local_) break;
                double next = s - G / slope;
                if (next > s_f) next = s_f;
                if (!std::isfinite(next)) {
                    s = unconstrained(u, i, bracket_failed);
                    break;
                }
                if (next == s) break;
                s = next;
            }
        }
        return obstacle_ && obstacle_[i] < s ? obstacle_[i] : s;
    }

    /// n = 1 with a constant right-hand side: closed-form update inlined.
    bool planar_constant() const { return grid_->dim() == 1 && !g_; }
    double planar_update(const double* u, std::size_t i) const {
        const double* c = u + i;
        double sum = (c[t0_[0]] + c[t0_[1]]) + (c[t0_[2]] + c[t0_[3]]);
        double s = (sum - f_[i] / inv0_) * 0.25;
        return obstacle_ && obstacle_[i] < s ? obstacle_[i] : s;
    }

private:
    const Grid* grid_;
    MaKernel kernel_;
    const RHSSpec* rhs_;
    const double* f_;
    const double* g_ = nullptr;
    const double* u0_ = nullptr;
    const double* obstacle_ = nullptr;
    double j_ = 0.0;
    double bracket_ = 1.0;
    double tol_;
    double tol_local_;
    double obstacle_scale_;
    std::array<std::ptrdiff_t, 4> t0_{};
    double inv0_ = 1.0;
};

struct SweepStats {
    double max_up = 0.0;    // largest increase of any node
    double max_down = 0.0;  // largest decrease of any node
    bool bracket_failed = false;

    double update() const { return max_up > max_down ? max_up : max_down; }
};

SweepStats sweep_serial(const SweepProblem& p, double* u);
SweepStats sweep_parallel(const SweepProblem& p, double* u);

/// Sup of the nodewise residual over the interior.
double residual_sup(const SweepProblem& p, const double* u, SweepMode mode);

}  // namespace pshenv
