#include <doctest.h>

#include <cstring>

#include "helpers.hpp"
#include "pshenv/error.hpp"
#include "pshenv/envelope.hpp"
#include "pshenv/expression.hpp"

using namespace pshenv;
using testing::ball_grid;

namespace {

GridFunction sampled(const char* text, const GridPtr& g) { return sample(Expression::parse(text, g->dim()), g); }

constexpr const char* kDoubleWell = "min(|z-0.3|^2, |z+0.3|^2)";

}  // namespace

TEST_CASE("trivial envelopes") {
    auto g = ball_grid(1, 1.0 / 16);
    auto zero = DensityField::constant(g, 0.0);
    auto P0 = envelope_obstacle(GridFunction(g, 0.0), zero);
    for (std::size_t i : g->interior()) CHECK(P0.value[i] == 0.0);

    auto u = sampled("|z|^2 - 1", g);
    auto P = envelope_obstacle(u, zero);
    CHECK(sup_diff(P.value, u) <= P.tolerances.tol);
    CHECK(P.contact.count() == g->interior().size());
}

TEST_CASE("closed-form benchmarks") {
    auto g1 = ball_grid(1, 1.0 / 16);
    auto P1 = envelope_obstacle(GridFunction(g1, 0.0), DensityField::constant(g1, 4.0));
    CHECK(sup_diff(P1.value, sampled("|z|^2 - 1", g1)) <= 2.0 * g1->spacing());

    auto g2 = ball_grid(2, 1.0 / 8);
    auto P2 = envelope_obstacle(GridFunction(g2, 0.0), DensityField::constant(g2, 32.0));
    CHECK(sup_diff(P2.value, sampled("|z|^2 - 1", g2)) <= 3.0 * g2->spacing());
}

TEST_CASE("tolerances follow the grid") {
    auto g = ball_grid(1, 1.0 / 16);
    auto t = EnvelopeTolerances::for_grid(*g, 0.0);
    CHECK(t.tol == 1e-8);
    CHECK(t.contact == doctest::Approx(1e-7));
    CHECK(t.ma == doctest::Approx(std::max(1e-6, 1e-7 * 256)));
    CHECK(t.psh == t.ma);
}

TEST_CASE("constraint membership and maximality") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u = sampled(kDoubleWell, g);
    auto f = DensityField::constant(g, 1.0);
    EnvelopeOptions opts;
    opts.check_maximality = true;
    auto P = envelope_obstacle(u, f, opts);
    auto c = check_constraints(P, u, f);
    CHECK(c.ok);
    CHECK(c.above_obstacle <= 2.0 * P.tolerances.tol);
    CHECK(c.psh.psh);
    CHECK(c.ma_deficit <= P.tolerances.ma);
    CHECK(P.maximality_gap <= 2.0 * P.tolerances.tol);
}

TEST_CASE("monotone in the obstacle, antitone in the density") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u1 = sampled(kDoubleWell, g);
    auto u2 = sampled("min(|z-0.3|^2, |z+0.3|^2) + 0.1*max(x, 0)", g);
    auto f1 = DensityField::constant(g, 1.0);
    auto f2 = DensityField::from_expression(Expression::parse("2 + x^2", 1), g);
    auto a = envelope_obstacle(u1, f1), b = envelope_obstacle(u2, f1), c = envelope_obstacle(u1, f2);
    const double tol = a.tolerances.tol;
    for (std::size_t i : g->interior()) {
        CHECK(a.value[i] <= b.value[i] + 2.0 * tol);
        CHECK(c.value[i] <= a.value[i] + 2.0 * tol);
    }
}

TEST_CASE("penalization with g = 0 is the Dirichlet solve") {
    auto g = ball_grid(1, 1.0 / 16);
    GridFunction u(g, 0.0);
    auto f = DensityField::constant(g, 4.0);
    auto B = envelope_berman(u, f, DensityField::constant(g, 0.0), {1.0, 8.0, 64.0});
    auto D = solve_dirichlet(RHSSpec::constant(f), u, u);
    CHECK(sup_diff(B.value, D.u) <= 2.0 * B.tolerances.tol);
    CHECK(sup_diff(B.value, sampled("|z|^2 - 1", g)) <= 2.0 * g->spacing());
    CHECK(B.trace.size() == 3);
}

TEST_CASE("penalization trace on an exact subsolution") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u = sampled("0.5*(|z|^2 - 1)", g);
    auto f = DensityField::constant(g, 0.0);
    auto gd = DensityField::constant(g, 2.0);
    auto P = envelope_obstacle(u, f);
    auto B = envelope_berman(u, f, gd, geometric_schedule(6), {}, &P.value);
    CHECK(B.subsolution.ok);
    const double tol = B.tolerances.tol;
    for (const auto& s : B.trace) {
        CHECK(s.above_obstacle <= 2.0 * tol);
        CHECK(s.drop_from_previous <= 2.0 * tol);
    }
    CHECK(B.trace.back().gap_to_reference <= 0.02);
}

TEST_CASE("subsolution check") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u = sampled("|z|^2", g);
    CHECK(check_subsolution(u, DensityField::constant(g, 4.0), 1e-6).ok);
    auto bad = check_subsolution(u, DensityField::constant(g, 1.0), 1e-6);
    CHECK_FALSE(bad.ok);
    CHECK(bad.worst_excess == doctest::Approx(3.0));
}

TEST_CASE("geometric schedule") {
    auto js = geometric_schedule(10);
    REQUIRE(js.size() == 11);
    CHECK(js.front() == 1.0);
    CHECK(js.back() == 1024.0);
}

TEST_CASE("inf-convolution") {
    auto g = ball_grid(1, 1.0 / 16);
    auto c = inf_convolution(GridFunction(g, 0.7), 3.0, 0.2);
    for (std::size_t i : c.grid().interior()) CHECK(c[i] == 0.7);

    // 1-Lipschitz data with m >= 1: the zero offset wins.
    auto u = sampled("x", g);
    auto same = inf_convolution(u, 1.5, 0.2);
    auto ref = restrict_to(u, same.grid_ptr());
    for (std::size_t i : same.grid().interior()) CHECK(same[i] == doctest::Approx(ref[i]));

    auto w = sampled("abs(x)^0.5", g);
    auto lo = inf_convolution(w, 1.0, 0.25);
    auto hi = inf_convolution(w, 4.0, 0.25);
    auto wr = restrict_to(w, lo.grid_ptr());
    REQUIRE(lo.grid().same_as(hi.grid()));
    for (std::size_t i : lo.grid().interior()) {
        CHECK(lo[i] <= hi[i]);
        CHECK(hi[i] <= wr[i]);
    }
    // m-Lipschitz along lattice directions.
    const Grid& ig = hi.grid();
    for (std::size_t i : ig.interior())
        for (int a = 0; a < 2; ++a) {
            auto j = static_cast<std::size_t>(static_cast<std::int64_t>(i) + ig.strides()[a]);
            if (j < ig.size() && ig.is_interior(j)) CHECK(std::abs(hi[i] - hi[j]) <= 4.0 * ig.spacing() + 1e-12);
        }

    try {
        inf_convolution(u, 1.0, 1.5);
        FAIL("radius accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OffsetLeavesDomain);
    }
}

TEST_CASE("idempotence examples") {
    auto g = ball_grid(1, 1.0 / 16);
    auto psh = envelope_idempotence_check(sampled("|z|^2 - 1", g), DensityField::constant(g, 0.0));
    CHECK(psh.sup_diff <= 2.0 * psh.tol);
    auto disc = envelope_idempotence_check(GridFunction(g, 0.0), DensityField::constant(g, 4.0));
    CHECK(disc.sup_diff <= 2.0 * disc.tol);
    auto well = envelope_idempotence_check(sampled(kDoubleWell, g), DensityField::constant(g, 1.0));
    CHECK(well.pass);
    CHECK(well.sup_diff <= 5.0 * well.tol);
}

TEST_CASE("envelopes commute with lattice translations") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u = sampled(kDoubleWell, g);
    auto P = envelope_obstacle(u, DensityField::constant(g, 1.0));
    std::vector<double> a{0.25, -0.5};
    auto moved_u = translate_function(u, a);
    auto Q = envelope_obstacle(moved_u, DensityField::constant(moved_u.grid_ptr(), 1.0));
    auto moved_P = translate_function(P.value, a);
    CHECK(std::memcmp(Q.value.values().data(), moved_P.values().data(), moved_P.values().size() * sizeof(double)) ==
          0);
}
