#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "pshenv/capacity.hpp"
#include "pshenv/error.hpp"
#include "pshenv/experiments.hpp"

using namespace pshenv;
using testing::ball_grid;

TEST_CASE("relative extremal of the whole interior is -1") {
    auto g = ball_grid(1, 1.0 / 16);
    auto r = relative_extremal(GridSet::all_interior(g));
    for (std::size_t i : g->interior()) CHECK(r.value[i] == doctest::Approx(-1.0));
}

TEST_CASE("relative extremal of a closed disc") {
    auto g = ball_grid(1, 1.0 / 64);
    auto E = closed_ball_nodes(g, {0.0, 0.0}, 0.5);
    auto r = relative_extremal(E);
    double worst = 0.0;
    for (std::size_t i : g->interior()) {
        CHECK(r.value[i] >= -1.0 - 1e-12);
        CHECK(r.value[i] <= 1e-12);
        if (E.contains(i)) CHECK(r.value[i] == -1.0);
        double rad = std::sqrt(testing::norm2(*g, i));
        double exact = rad <= 0.5 ? -1.0 : std::log(rad) / std::log(2.0);
        worst = std::max(worst, std::abs(r.value[i] - exact));
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("relative extremal of the center node fits a small effective disc") {
    auto g = ball_grid(1, 1.0 / 64);
    GridSet E(g);
    E.insert(testing::node_at(*g, {0.0, 0.0}));
    auto r = relative_extremal(E);
    // Fit h_E = log|z| / log(1/r_eff) on the annulus 0.2 < |z| < 0.8.
    double num = 0.0, den = 0.0;
    for (std::size_t i : g->interior()) {
        double rad = std::sqrt(testing::norm2(*g, i));
        if (rad < 0.2 || rad > 0.8) continue;
        num += r.value[i] * std::log(rad);
        den += std::log(rad) * std::log(rad);
    }
    double inv_log = num / den;  // 1 / log(1/r_eff)
    double r_eff = std::exp(-1.0 / inv_log);
    CHECK(r_eff < 4.0 * g->spacing());
    for (std::size_t i : g->interior()) {
        double rad = std::sqrt(testing::norm2(*g, i));
        if (std::abs(rad - 0.5) < 0.5 * g->spacing()) CHECK(std::abs(r.value[i] - std::log(0.5) * inv_log) <= 0.1);
    }
}

TEST_CASE("capacity of a disc and its closed form") {
    CHECK(ball_capacity_exact(1, 0.5) == doctest::Approx(2.0 * std::numbers::pi / std::log(2.0)));
    CHECK(ball_capacity_exact(2, 0.5) == doctest::Approx(82.17).epsilon(1e-3));
    auto g = ball_grid(1, 1.0 / 64);
    auto c = capacity(closed_ball_nodes(g, {0.0, 0.0}, 0.5));
    CHECK(std::abs(c.value - 9.0647) / 9.0647 <= 0.10);
}

TEST_CASE("capacity is monotone in E and antitone in the domain") {
    auto g = ball_grid(1, 1.0 / 32);
    double small = capacity(closed_ball_nodes(g, {0.0, 0.0}, 0.3)).value;
    double large = capacity(closed_ball_nodes(g, {0.0, 0.0}, 0.5)).value;
    CHECK(small <= large + 1e-6);

    auto inner = build_grid(DomainSpec::ball(1, {0.0, 0.0}, 0.8), 1.0 / 32, StencilSet::standard(1));
    double in_small_domain = capacity(closed_ball_nodes(inner, {0.0, 0.0}, 0.3)).value;
    CHECK(small <= in_small_domain + 1e-6);
}

TEST_CASE("empty sets") {
    auto g = ball_grid(1, 1.0 / 16);
    GridSet none(g);
    CHECK(capacity(none).value == 0.0);
    CHECK_THROWS_AS(relative_extremal(none), Error);
}

TEST_CASE("stability fit needs three informative perturbations") {
    auto g = ball_grid(1, 1.0 / 16);
    GridFunction u(g, 0.0);
    auto f0 = DensityField::constant(g, 4.0);
    try {
        stability_study(u, f0, {f0, DensityField::constant(g, 5.0)}, 2.0);
        FAIL("fit accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateFit);
    }
    // Oracle: exact gaps t/4 between the closed forms (4 + t)/4 (|z|^2 - 1).
    std::vector<DensityField> pert;
    for (double t : {0.5, 1.0, 2.0}) pert.push_back(DensityField::constant(g, 4.0 + t));
    auto rep = stability_study(u, f0, pert, 2.0);
    CHECK(rep.pass);
    CHECK(rep.tables[0].rows[2][2] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("capacity inequality degenerate cases") {
    auto g = ball_grid(1, 1.0 / 16);
    auto u = sample(Expression::parse("|z|^2 - 1", 1), g);
    auto f = DensityField::constant(g, 0.0);
    auto W = DomainSpec::ball(1, {0.0, 0.0}, 0.5);
    auto same = capacity_inequality_check(u, u, W, 0.1, f);
    CHECK(same.pass);
    CHECK(same.measured["L"].get<double>() == 0.0);
    CHECK(same.measured["R"].get<double>() == 0.0);

    try {
        capacity_inequality_check(u, u, DomainSpec::ball(1, {0.03, 0.03}, 0.01), 0.1, f);
        FAIL("empty W accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInner);
    }
}

TEST_CASE("experiment helpers") {
    auto g = ball_grid(1, 1.0 / 32);
    double L = lipschitz_constant(sample(Expression::parse("|z|^2 - 1", 1), g));
    CHECK(L == doctest::Approx(2.0).epsilon(0.05));
    CHECK(lipschitz_constant(GridFunction(g, 3.0)) == 0.0);

    auto pr = Problem::make(testing::unit_ball(1), 1.0 / 16, "0", "4");
    std::vector<DomainSpec> bad{DomainSpec::ball(1, {0.0, 0.0}, 0.8), DomainSpec::ball(1, {0.5, 0.0}, 0.3)};
    try {
        exhaustion_study(pr, bad, 1.0);
        FAIL("non-nested accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonNested);
    }
    std::vector<DomainSpec> same{testing::unit_ball(1), testing::unit_ball(1)};
    auto rep = exhaustion_study(pr, same, 1e-7);
    CHECK(rep.pass);

    try {
        shrink_comparison(pr, {1.5});
        FAIL("delta accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInterior);
    }
}

TEST_CASE("experiments are reproducible") {
    auto pr = Problem::make(testing::unit_ball(1), 1.0 / 16, "min(|z-0.3|^2, |z+0.3|^2)", "1");
    auto a = shrink_comparison(pr, {0.25, 0.125});
    auto b = shrink_comparison(pr, {0.25, 0.125});
    CHECK(a.measured.dump() == b.measured.dump());
    CHECK(a.tables[0].to_csv() == b.tables[0].to_csv());
}
