#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "pshenv/error.hpp"
#include "pshenv/expression.hpp"
#include "pshenv/grid_io.hpp"

using namespace pshenv;
using testing::ball_grid;
using testing::node_at;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("unit disc at h = 0.5 has the enumerated interior") {
    std::size_t expected = 0;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            if (0.25 * (a * a + b * b) < 1.0) ++expected;
    CHECK(expected == 9);
    CHECK(ball_grid(1, 0.5)->interior().size() == expected);
}

TEST_CASE("coarse spacing keeps only the center node") {
    auto g = ball_grid(1, 2.0);
    REQUIRE(g->interior().size() == 1);
    CHECK(testing::norm2(*g, g->interior()[0]) == 0.0);

    // Off-center small disc between lattice points: nothing inside.
    CHECK(code_of([] { build_grid(DomainSpec::ball(1, {0.25, 0.25}, 0.1), 1.0, StencilSet::standard(1)); }) ==
          ErrorCode::EmptyInterior);
}

TEST_CASE("unit ball in C^2 at h = 0.5 matches enumeration") {
    std::size_t expected = 0;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c)
                for (int d = -2; d <= 2; ++d)
                    if (0.25 * (a * a + b * b + c * c + d * d) < 1.0) ++expected;
    CHECK(ball_grid(2, 0.5)->interior().size() == expected);
}

TEST_CASE("classification invariants") {
    for (int n : {1, 2}) {
        auto g = ball_grid(n, n == 1 ? 1.0 / 16 : 0.25);
        auto spec = testing::unit_ball(n);
        for (std::size_t i : g->interior()) {
            auto x = g->coords(i);
            CHECK(spec.rho(std::span<const double>(x.data(), g->axes())) < 0.0);
            for (std::size_t d = 0; d < g->stencil().directions().size(); ++d)
                for (auto off : g->taps(static_cast<int>(d))) {
                    auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off);
                    CHECK(g->cls(j) != NodeClass::Exterior);
                }
        }
        for (std::size_t i : g->band()) {
            auto x = g->coords(i);
            CHECK(spec.rho(std::span<const double>(x.data(), g->axes())) >= 0.0);
        }
    }
}

TEST_CASE("build_grid is deterministic") {
    auto a = ball_grid(2, 0.25), b = ball_grid(2, 0.25);
    REQUIRE(a->size() == b->size());
    CHECK(std::memcmp(a->classes().data(), b->classes().data(), a->size()) == 0);
}

TEST_CASE("sublevel disc agrees with the ball kind") {
    auto s = DomainSpec::sublevel(1, "|z|^2 - 1", {-1.5, -1.5}, {1.5, 1.5});
    auto a = build_grid(s, 1.0 / 8, StencilSet::standard(1));
    auto b = ball_grid(1, 1.0 / 8);
    CHECK(a->interior().size() == b->interior().size());
}

TEST_CASE("sample") {
    auto g = ball_grid(1, 0.5);
    auto zero = sample(Expression::parse("0", 1), g);
    for (std::size_t i : g->interior()) CHECK(zero[i] == 0.0);

    auto q = sample(Expression::parse("|z|^2", 1), g);
    CHECK(q[node_at(*g, {0.5, 0.0})] == doctest::Approx(0.25));

    CHECK(code_of([&] { sample(Expression::parse("log(|z|)", 1), g); }) == ErrorCode::EvaluationError);
}

TEST_CASE("shrink_domain") {
    auto b = shrink_domain(testing::unit_ball(1), 0.25);
    CHECK(b.kind() == DomainKind::Ball);
    CHECK(b.radius() == doctest::Approx(0.75));
    CHECK(code_of([] { shrink_domain(testing::unit_ball(1), 1.5); }) == ErrorCode::EmptyInterior);

    auto box = shrink_domain(DomainSpec::box({-1, -1}, {1, 1}), 0.5);
    CHECK(box.lo()[0] == doctest::Approx(-0.5));
    CHECK(box.hi()[1] == doctest::Approx(0.5));
}

TEST_CASE("shrink_domain is monotone on a shared lattice") {
    const double h = 1.0 / 32;
    auto sub = DomainSpec::sublevel(1, "|z|^2 + 0.5*x^2 - 1", {-1.5, -1.5}, {1.5, 1.5});
    auto g1 = build_grid(shrink_domain(sub, 0.1), h, StencilSet::standard(1));
    auto g2 = build_grid(shrink_domain(sub, 0.2), h, StencilSet::standard(1));
    CHECK(g2->interior().size() < g1->interior().size());
    for (std::size_t i : g2->interior()) {
        auto k = g2->lattice_index(i);
        std::size_t j = g1->find(std::span<const std::int64_t>(k.data(), 2));
        REQUIRE(j != Grid::npos);
        CHECK(g1->is_interior(j));
    }
    // The inset is conservative: every kept node is at least delta from the boundary.
    auto outer = build_grid(sub, h, StencilSet::standard(1));
    CHECK(g1->interior().size() < outer->interior().size());
}

TEST_CASE("translations") {
    std::vector<double> a{1.0, 0.0};
    auto t = translate_spec(testing::unit_ball(1), a);
    CHECK(t.center()[0] == doctest::Approx(1.0));
    CHECK(t.center()[1] == doctest::Approx(0.0));

    auto g = ball_grid(1, 0.25);
    auto u = sample(Expression::parse("|z|^2", 1), g);
    std::vector<double> shift{0.5, -0.25};
    auto moved = translate_function(u, shift);
    for (std::size_t i : moved.grid().interior()) {
        auto x = moved.grid().coords(i);
        double dx = x[0] - shift[0], dy = x[1] - shift[1];
        CHECK(moved[i] == doctest::Approx(dx * dx + dy * dy));
    }
    std::vector<double> back{-0.5, 0.25};
    auto again = translate_function(moved, back);
    REQUIRE(again.grid().same_as(*g));
    CHECK(std::memcmp(again.values().data(), u.values().data(), u.values().size() * sizeof(double)) == 0);

    std::vector<double> half{0.125, 0.0};
    CHECK(code_of([&] { translate_function(u, half); }) == ErrorCode::NonLatticeOffset);
}

TEST_CASE("sup_diff") {
    auto g = ball_grid(1, 0.5);
    GridFunction zero(g, 0.0);
    auto q = sample(Expression::parse("|z|^2", 1), g);
    CHECK(sup_diff(q, q) == 0.0);
    // Oracle: largest |z|^2 over the 9 enumerated interior lattice points.
    double oracle = 0.0;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            if (0.25 * (a * a + b * b) < 1.0) oracle = std::max(oracle, 0.25 * (a * a + b * b));
    CHECK(sup_diff(zero, q) == doctest::Approx(oracle));
    CHECK(oracle == doctest::Approx(0.5));

    GridSet empty(g);
    CHECK(code_of([&] { sup_diff(zero, q, &empty); }) == ErrorCode::EmptyRegion);
    GridFunction other(ball_grid(1, 0.25), 0.0);
    CHECK(code_of([&] { sup_diff(zero, other); }) == ErrorCode::GridMismatch);
}

TEST_CASE("grid files round-trip bit-exactly") {
    auto dir = std::filesystem::temp_directory_path() / "pshenv_grid_io_test";
    std::filesystem::create_directories(dir);
    for (int n : {1, 2}) {
        auto g = ball_grid(n, n == 1 ? 1.0 / 16 : 0.25);
        auto u = sample(Expression::parse("exp(x1) * |z|^2 - 1/3", n), g);
        auto path = dir / ("u" + std::to_string(n) + ".pshg");
        write_grid_function(path, u);

        std::ifstream in(path, std::ios::binary);
        char magic[4];
        in.read(magic, 4);
        CHECK(std::string(magic, 4) == "PSHG");

        auto file = read_grid_file(path);
        REQUIRE(file.values);
        CHECK(file.grid->same_as(*g));
        for (std::size_t i = 0; i < g->size(); ++i) {
            if (g->cls(i) == NodeClass::Exterior) {
                CHECK(std::isnan((*file.values)[i]));
                continue;
            }
            CHECK(std::memcmp(&(*file.values)[i], &u[i], sizeof(double)) == 0);
        }

        auto gpath = dir / ("g" + std::to_string(n) + ".pshg");
        write_grid(gpath, *g);
        auto gfile = read_grid_file(gpath);
        CHECK_FALSE(gfile.values);
        CHECK(gfile.grid->same_as(*g));
    }
    std::ofstream(dir / "junk.pshg") << "not a grid";
    CHECK(code_of([&] { read_grid_file(dir / "junk.pshg"); }) == ErrorCode::IoError);
    std::filesystem::remove_all(dir);
}
