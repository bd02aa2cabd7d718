#pragma once

// Node-level pieces of the wide-stencil complex Monge-Ampere operator.
// Everything here is inline: these functions are the bodies of the sweep
// loops.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "pshenv/grid.hpp"
#include "pshenv/stencil.hpp"

namespace pshenv {

/// c_n = 4^n n!: (dd^c u)^n = c_n det(d^2u / dz_j dzbar_k) dlambda.
constexpr double ma_constant(int n) { return n == 1 ? 4.0 : 32.0; }

/// Neighbor sums of one node: S_d = u(z + h xi) + u(z - h xi) + u(z + ih xi)
/// + u(z - ih xi) for every stencil direction, with the node's own value
/// left free. MA_local(s) is the node's discrete density when u(z) := s.
struct LocalStencil {
    int n = 1;
    int ndirs = 1;
    std::array<double, kMaxDirections> sum;
    const double* inv = nullptr;  // 1 / (h^2 |xi_d|^2), ndirs entries
    std::span<const Frame> frames;

    /// Complex-line Laplacian along direction d with center value s.
    double line_laplacian(int d, double s) const { return (sum[d] - 4.0 * s) * inv[d]; }

    /// Largest center value keeping every complex-line Laplacian >= 0.
    double psh_upper() const {
        double m = sum[0] * 0.25;
        for (int d = 1; d < ndirs; ++d) m = std::min(m, sum[d] * 0.25);
        return m;
    }

    /// MA_local(s). n = 1: the Laplacian (may be negative). n = 2:
    /// c_2 * min over frames of prod max(L_d / 4, 0).
    double density(double s) const {
        if (n == 1) return line_laplacian(0, s);
        double best = std::numeric_limits<double>::infinity();
        for (const Frame& fr : frames) {
            double a = std::max(line_laplacian(fr.first, s) * 0.25, 0.0);
            double b = std::max(line_laplacian(fr.second, s) * 0.25, 0.0);
            best = std::min(best, a * b);
        }
        return ma_constant(2) * best;
    }

    /// d MA_local / ds (one-sided at frame switches), always <= 0.
    double density_slope(double s) const {
        if (n == 1) return -4.0 * inv[0];
        double best = std::numeric_limits<double>::infinity();
        double slope = 0.0;
        for (const Frame& fr : frames) {
            double la = line_laplacian(fr.first, s) * 0.25;
            double lb = line_laplacian(fr.second, s) * 0.25;
            double a = std::max(la, 0.0), b = std::max(lb, 0.0);
            if (a * b < best) {
                best = a * b;
                double da = la > 0.0 ? -inv[fr.first] : 0.0;
                double db = lb > 0.0 ? -inv[fr.second] : 0.0;
                slope = da * b + a * db;
            }
        }
        return ma_constant(2) * slope;
    }

    /// Root of MA_local(s) = f on the psh branch. n = 1 closed form
    /// (S - h^2 f) / 4; n = 2 smaller root of each frame quadratic, then the
    /// minimum over frames. f = 0 gives psh_upper().
    double solve_constant(double f) const {
        if (n == 1) return (sum[0] - f / inv[0]) * 0.25;
        double best = std::numeric_limits<double>::infinity();
        for (const Frame& fr : frames) {
            // 32 (a1 - s)(a2 - s) inv1 inv2 = f  with  a_d = S_d / 4
            double a1 = sum[fr.first] * 0.25;
            double a2 = sum[fr.second] * 0.25;
            double q = f / (ma_constant(2) * inv[fr.first] * inv[fr.second]);
            double mid = 0.5 * (a1 + a2);
            double half = 0.5 * (a1 - a2);
            best = std::min(best, mid - std::sqrt(half * half + q));
        }
        return best;
    }
};

/// Right-hand side of one node: F(s) = f, or max(g e^{j (s - u0)}, f).
struct NodeRHS {
    double f = 0.0;
    double g = 0.0;
    double u0 = 0.0;
    double j = 0.0;
    bool penalized = false;
    /// Initial bracket width below the smallest neighbor value.
    double bracket = 1.0;

    double operator()(double s) const {
        if (!penalized || g == 0.0) return f;
        return std::max(g * std::exp(j * (s - u0)), f);
    }
};

enum class LocalStatus { Ok, BracketFailure };

struct LocalResult {
    double value = 0.0;
    LocalStatus status = LocalStatus::Ok;
};

/// Unique s with MA_local(s) = F(s) on the psh branch.
///
/// The root never exceeds the constant-density root s_f, and equals it when
/// the penalty is inactive there. G(s) = MA_local(s) - F(s) is strictly
/// decreasing below s_f. Newton steps start from min(guess, s_f) and are
/// safeguarded by the bracket of
/// points already seen; while no point with G > 0 is known the bracket is
/// extended downward from the smallest neighbor value by doubling widths.
/// Stops when |G| <= tol_local or the bracket collapses to roundoff.
inline LocalResult solve_local(const LocalStencil& ls, const NodeRHS& rhs, double tol_local,
                               double guess, double min_neighbor) {
    const double s_f = ls.solve_constant(rhs.f);
    if (!rhs.penalized || rhs.g == 0.0) return {s_f};

    constexpr double inf = std::numeric_limits<double>::infinity();
    double lo = -inf, hi = s_f;
    double width = rhs.bracket;
    int expansions = 0;
    double s = guess < s_f ? guess : s_f;
    for (int it = 0; it < 400; ++it) {
        const double pen = rhs.g * std::exp(rhs.j * (s - rhs.u0));
        double G, slope;
        if (pen > rhs.f) {
            G = ls.density(s) - pen;
            slope = ls.density_slope(s) - rhs.j * pen;
        } else {
            G = ls.density(s) - rhs.f;
            slope = ls.density_slope(s);
        }
        if (s == s_f && pen <= rhs.f) return {s_f};  // penalty inactive: closed form is exact
        if (std::abs(G) <= tol_local) return {s};
        if (G > 0.0) lo = s;
        else hi = s;
        double next = s - G / slope;
        if (!(next > lo && next < hi)) {
            if (lo == -inf) {
                if (++expansions > 60) return {s_f, LocalStatus::BracketFailure};
                next = std::min(min_neighbor, hi) - width;
                width *= 2.0;
            } else {
                next = 0.5 * (lo + hi);
            }
        }
        if (next == s || (lo > -inf && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                       std::max(1.0, std::abs(hi))))
            return {next};
        s = next;
    }
    return {s};
}

/// Gathers the local stencil of an interior node from a dense value array.
class MaKernel {
public:
    explicit MaKernel(const Grid& grid) : grid_(&grid) {
        const auto& dirs = grid.stencil().directions();
        const double h2 = grid.spacing() * grid.spacing();
        ndirs_ = static_cast<int>(dirs.size());
        for (int d = 0; d < ndirs_; ++d) {
            taps_[d] = grid.taps(d);
            inv_[d] = 1.0 / (h2 * static_cast<double>(dirs[d].norm2()));
        }
    }

    const Grid& grid() const { return *grid_; }
    int ndirs() const { return ndirs_; }

    LocalStencil gather(const double* u, std::size_t node) const {
        LocalStencil ls;
        ls.n = grid_->dim();
        ls.ndirs = ndirs_;
        ls.frames = grid_->stencil().frames();
        const double* c = u + node;
        for (int d = 0; d < ndirs_; ++d) {
            const auto& t = taps_[d];
            ls.sum[d] = (c[t[0]] + c[t[1]]) + (c[t[2]] + c[t[3]]);
        }
        ls.inv = inv_.data();
        return ls;
    }

    double min_neighbor(const double* u, std::size_t node) const {
        double m = std::numeric_limits<double>::infinity();
        const double* c = u + node;
        for (int d = 0; d < ndirs_; ++d)
            for (std::ptrdiff_t off : taps_[d]) m = std::min(m, c[off]);
        return m;
    }

    double density(const double* u, std::size_t node) const { return gather(u, node).density(u[node]); }

private:
    const Grid* grid_;
    int ndirs_ = 0;
    std::array<std::array<std::ptrdiff_t, 4>, kMaxDirections> taps_{};
    std::array<double, kMaxDirections> inv_{};
};

}  // namespace pshenv
