#include <doctest.h>

#include <cstring>
#include <limits>

#include "helpers.hpp"
#include "pshenv/error.hpp"
#include "pshenv/expression.hpp"
#include "pshenv/ma_operator.hpp"
#include "pshenv/solver.hpp"
#include "pshenv/sweep.hpp"

using namespace pshenv;
using testing::ball_grid;

namespace {

LocalStencil planar(double S, double h, double* inv) {
    *inv = 1.0 / (h * h);
    LocalStencil ls;
    ls.n = 1;
    ls.ndirs = 1;
    ls.sum[0] = S;
    ls.inv = inv;
    return ls;
}

GridFunction sampled(const char* text, const GridPtr& g) { return sample(Expression::parse(text, g->dim()), g); }

bool bit_equal(const GridFunction& a, const GridFunction& b) {
    return a.values().size() == b.values().size() &&
           std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("local_solve closed forms") {
    double inv;
    CHECK(local_solve(planar(4.0, 1.0, &inv), NodeRHS{}, 1e-12, 0.0, 1.0) == doctest::Approx(1.0));
    NodeRHS f4;
    f4.f = 4.0;
    CHECK(local_solve(planar(4.0, 0.5, &inv), f4, 1e-12, 0.0, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("n = 2 local solve is exact on |z|^2 - 1") {
    auto g = ball_grid(2, 0.25);
    auto u = sampled("|z|^2 - 1", g);
    MaKernel k(*g);
    NodeRHS f;
    f.f = 32.0;
    for (std::size_t i : g->interior()) {
        auto ls = k.gather(u.values().data(), i);
        CHECK(local_solve(ls, f, 1e-12, u[i], k.min_neighbor(u.values().data(), i)) ==
              doctest::Approx(u[i]).epsilon(1e-12));
    }
}

TEST_CASE("penalized local solve matches its equation") {
    auto g = ball_grid(2, 0.25);
    auto u = sampled("|z|^2 - 1", g);
    MaKernel k(*g);
    NodeRHS rhs;
    rhs.penalized = true;
    rhs.f = 1.0;
    rhs.g = 50.0;
    rhs.j = 8.0;
    for (std::size_t i : g->interior()) {
        rhs.u0 = u[i];
        auto ls = k.gather(u.values().data(), i);
        double s = local_solve(ls, rhs, 1e-10, u[i], k.min_neighbor(u.values().data(), i));
        CHECK(ls.density(s) == doctest::Approx(rhs(s)).epsilon(1e-8));
        CHECK(s <= ls.solve_constant(rhs.f) + 1e-15);
    }
}

TEST_CASE("corrupted neighbor data gives BracketFailure") {
    double inv;
    auto ls = planar(std::numeric_limits<double>::quiet_NaN(), 0.5, &inv);
    NodeRHS rhs;
    rhs.penalized = true;
    rhs.g = 1.0;
    rhs.j = 2.0;
    try {
        local_solve(ls, rhs, 1e-10, 0.0, 0.0);
        FAIL("no failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BracketFailure);
    }
}

TEST_CASE("Dirichlet disc benchmark") {
    auto g = ball_grid(1, 1.0 / 16);
    GridFunction zero(g, 0.0);
    auto sol = solve_dirichlet(RHSSpec::constant(DensityField::constant(g, 4.0)), zero, zero);
    CHECK(sol.report.converged);
    CHECK(sol.report.residual <= sol.report.tol);
    CHECK(sup_diff(sol.u, sampled("|z|^2 - 1", g)) <= 2.0 * g->spacing());
    CHECK(residual(sol.u, RHSSpec::constant(DensityField::constant(g, 4.0))).sup <= sol.report.tol);
}

TEST_CASE("affine data is reproduced") {
    auto g = ball_grid(2, 0.25);
    auto phi = sampled("x1 - 0.5*y2", g);
    auto sol = solve_dirichlet(RHSSpec::constant(DensityField::constant(g, 0.0)), phi, GridFunction(g, 0.0));
    CHECK(sup_diff(sol.u, phi) <= 2.0 * sol.report.tol);
}

TEST_CASE("penalized rhs with g = 0 reduces to the constant rhs") {
    auto g = ball_grid(1, 1.0 / 16);
    auto f = DensityField::constant(g, 4.0);
    GridFunction zero(g, 0.0);
    auto a = solve_dirichlet(RHSSpec::constant(f), zero, zero);
    auto b = solve_dirichlet(RHSSpec::penalized(DensityField::constant(g, 0.0), f, zero, 16.0), zero, zero);
    CHECK(bit_equal(a.u, b.u));
}

TEST_CASE("residual of a perturbed solution stays in the stencil neighborhood") {
    auto g = ball_grid(1, 1.0 / 8);
    auto rhs = RHSSpec::constant(DensityField::constant(g, 4.0));
    auto sol = solve_dirichlet(rhs, GridFunction(g, 0.0), GridFunction(g, 0.0));
    auto before = ma_density(sol.u);
    GridFunction v = sol.u;
    std::size_t k = testing::node_at(*g, {0.25, 0.0});
    v[k] += 1.0;
    auto after = ma_density(v);
    auto touched = [&](std::size_t i) {
        if (i == k) return true;
        for (auto off : g->taps(0))
            if (static_cast<std::ptrdiff_t>(i) + off == static_cast<std::ptrdiff_t>(k)) return true;
        return false;
    };
    double worst = 0.0;
    for (std::size_t i : g->interior()) {
        double r = std::abs(after[i] - 4.0);
        if (!touched(i)) CHECK(std::abs(after[i] - before[i]) == 0.0);
        else worst = std::max(worst, r);
    }
    // Oracle: +1 at the center changes the Laplacian by -4/h^2 there.
    CHECK(worst == doctest::Approx(4.0 / (g->spacing() * g->spacing())).epsilon(1e-6));
    CHECK(residual(v, rhs).sup == doctest::Approx(worst).epsilon(1e-9));
}

TEST_CASE("comparison principle") {
    auto g = ball_grid(1, 1.0 / 16);
    auto phi1 = sampled("x - 0.2", g);
    auto phi2 = sampled("x + 0.1*y^2", g);
    auto s1 = solve_dirichlet(RHSSpec::constant(DensityField::constant(g, 6.0)), phi1, phi1);
    auto s2 = solve_dirichlet(RHSSpec::constant(DensityField::constant(g, 2.0)), phi2, phi2);
    for (std::size_t i : g->interior()) CHECK(s1.u[i] <= s2.u[i] + 2.0 * s1.report.tol);
}

TEST_CASE("penalization monotonicity in j") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u0 = sampled("0.5*(|z|^2 - 1)", g);
    auto gd = DensityField::constant(g, 2.0);
    auto f = DensityField::constant(g, 0.0);
    GridFunction prev;
    double tol = 0.0;
    for (double j : {1.0, 4.0, 16.0}) {
        auto s = solve_dirichlet(RHSSpec::penalized(gd, f, u0, j), u0, prev.grid_ptr() ? prev : u0);
        tol = s.report.tol;
        for (std::size_t i : g->interior()) {
            CHECK(s.u[i] <= u0[i] + 2.0 * tol);
            if (prev.grid_ptr()) CHECK(prev[i] <= s.u[i] + 2.0 * tol);
        }
        prev = s.u;
    }
}

TEST_CASE("obstacle sweeps from the obstacle decrease monotonically") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u = sampled("min(|z-0.3|^2, |z+0.3|^2)", g);
    auto s = solve_obstacle(RHSSpec::constant(DensityField::constant(g, 1.0)), u, u);
    CHECK(s.report.converged);
    CHECK(s.report.monotone_sweeps_ok);
}

TEST_CASE("serial and parallel sweeps agree bit for bit") {
    for (int n : {1, 2}) {
        auto g = ball_grid(n, n == 1 ? 1.0 / 16 : 0.25);
        auto u = sampled("min(|z|^2 - 0.5, 0.2)", g);
        SolveOptions a, b;
        a.mode = SweepMode::Sequential;
        b.mode = SweepMode::RedBlack;
        auto rhs = RHSSpec::constant(DensityField::constant(g, n == 1 ? 4.0 : 32.0));
        auto sa = solve_obstacle(rhs, u, u, a);
        auto sb = solve_obstacle(rhs, u, u, b);
        CHECK(bit_equal(sa.u, sb.u));
        CHECK(sa.report.iterations == sb.report.iterations);

        auto pen = RHSSpec::penalized(DensityField::constant(g, 1.0), DensityField::constant(g, 0.5), u, 8.0);
        auto pa = solve_dirichlet(pen, u, u, a);
        auto pb = solve_dirichlet(pen, u, u, b);
        CHECK(bit_equal(pa.u, pb.u));
    }
}

TEST_CASE("option and argument errors") {
    auto g = ball_grid(1, 0.25);
    GridFunction zero(g, 0.0);
    auto f = DensityField::constant(g, 1.0);
    try {
        RHSSpec::penalized(f, f, zero, -1.0);
        FAIL("negative j accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonMonotoneRHS);
    }

    auto g2 = ball_grid(1, 1.0 / 32);
    SolveOptions few;
    few.max_iter = 3;
    auto s = solve_dirichlet(RHSSpec::constant(DensityField::constant(g2, 4.0)), GridFunction(g2, 0.0),
                             GridFunction(g2, 0.0), few);
    CHECK_FALSE(s.report.converged);
    CHECK(s.report.iterations == 3);
    try {
        require_converged(s.report, "test");
        FAIL("not raised");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MaxIterExceeded);
    }

    CHECK(default_tol(1) == 1e-8);
    CHECK(default_tol(2) == 1e-7);
    CHECK(parse_sweep_mode("seq") == SweepMode::Sequential);
    CHECK(parse_sweep_mode("redblack") == SweepMode::RedBlack);
    CHECK_THROWS_AS(parse_sweep_mode("fast"), Error);
}
