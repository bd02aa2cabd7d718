#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "pshenv/config.hpp"
#include "pshenv/error.hpp"
#include "pshenv/grid_io.hpp"
#include "pshenv/registry.hpp"
#include "pshenv/run.hpp"

using namespace pshenv;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMinimal = R"({
  "domain": {"kind": "ball", "n": 1, "radius": 1},
  "h": "1/32",
  "obstacle": "0",
  "f": "4",
  "method": "obstacle"
})";

Error error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an Error");
    return Error(ErrorCode::InvalidArgument, "");
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("pshenv_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("minimal config") {
    auto c = parse_config_text(kMinimal);
    CHECK(c.domain.kind() == DomainKind::Ball);
    CHECK(c.h == 1.0 / 32);
    CHECK(c.method == EnvelopeMethod::Obstacle);
    CHECK(c.f.kind == FieldSource::Kind::Expression);
    CHECK(c.warnings.empty());

    auto echo = c.echo();
    CHECK(echo["tol"].get<double>() == 1e-8);
    CHECK(echo["mode"] == "redblack");
    CHECK(echo["schedule"]["j"].size() == 11);
}

TEST_CASE("negative density is rejected") {
    auto e = error_of([] { parse_config_text(R"({"domain": {"kind": "ball"}, "f": "-1"})"); });
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("density must be >= 0") != std::string::npos);
    CHECK(std::string(e.what()).find("f:") != std::string::npos);

    auto n = error_of([] { parse_config_text(R"({"domain": {"kind": "ball"}, "g": -2})"); });
    CHECK(n.code() == ErrorCode::ValidationError);
}

TEST_CASE("unknown keys suggest the closest name") {
    const char* text = R"({
  "domain": {"kind": "ball"},
  "metod": "berman"
})";
    auto e = error_of([&] { parse_config_text(text); });
    CHECK(e.code() == ErrorCode::ParseError);
    std::string msg = e.what();
    CHECK(msg.find("\"method\"") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);

    auto lenient = parse_config_text(text, false);
    REQUIRE(lenient.warnings.size() == 1);
    CHECK(lenient.warnings[0].find("metod") != std::string::npos);

    auto nested = error_of([] { parse_config_text(R"({"domain": {"kind": "ball", "radus": 2}})"); });
    CHECK(std::string(nested.what()).find("domain.radus") != std::string::npos);
}

TEST_CASE("syntax errors carry the line") {
    auto e = error_of([] { parse_config_text("{\n  \"domain\": {\"kind\": \"ball\"},\n  \"h\": ,\n}"); });
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
}

TEST_CASE("field validation names the field") {
    auto tol = error_of([] { parse_config_text(R"({"domain": {"kind": "ball"}, "tol": 0})"); });
    CHECK(tol.code() == ErrorCode::ValidationError);
    CHECK(std::string(tol.what()).rfind("ValidationError: tol:", 0) == 0);

    auto file = error_of([] { parse_config_text(R"({"domain": {"kind": "ball"}, "obstacle": {"file": "nope.pshg"}})"); });
    CHECK(std::string(file.what()).find("obstacle") != std::string::npos);

    auto expr = error_of([] { parse_config_text(R"({"domain": {"kind": "ball"}, "obstacle": "|z|^"})"); });
    CHECK(expr.code() == ErrorCode::ValidationError);

    auto mode = error_of([] { parse_config_text(R"({"domain": {"kind": "ball"}, "mode": "fast"})"); });
    CHECK(std::string(mode.what()).find("mode") != std::string::npos);

    auto frame = error_of([] {
        parse_config_text(R"({"domain": {"kind": "ball", "n": 2}, "stencil": {"frames": [[[[1,0],[1,0]], [[1,0],[0,0]]]]}})");
    });
    CHECK(frame.code() == ErrorCode::ValidationError);
}

TEST_CASE("stencil frames from the config") {
    auto c = parse_config_text(
        R"({"domain": {"kind": "ball", "n": 2}, "stencil": {"extra_frames": [[[[2,1],[0,0]], [[0,0],[1,0]]]]}})");
    CHECK(c.stencil.frames().size() == 4);
}

TEST_CASE("spacing lists") {
    auto s = parse_spacing_list("1/16, 1/32,0.01");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 0.0625);
    CHECK(s[1] == 0.03125);
    CHECK(s[2] == 0.01);
    CHECK_THROWS_AS(parse_spacing_list("1/0"), Error);
    CHECK_THROWS_AS(parse_spacing_list("abc"), Error);
    CHECK(edit_distance("metod", "method") == 1);
}

TEST_CASE("envelope run writes result, contact set and report") {
    auto dir = scratch("envelope");
    RunRequest req;
    req.command = Command::Envelope;
    auto c = parse_config_text(kMinimal);
    c.reference = "|z|^2 - 1";
    req.config = c;
    req.out = dir;
    std::ostringstream log;
    CHECK(run(req, log) == 0);
    for (const char* f : {"result.pshg", "contact.pshg", "report.json"}) CHECK(fs::exists(dir / f));

    std::ifstream in(dir / "report.json");
    auto report = nlohmann::json::parse(in);
    CHECK(report["sup_error_vs_reference"].get<double>() <= 2.0 / 32);
    CHECK(report["config"]["tol"].get<double>() == 1e-8);
    CHECK(report["config"]["output"] == dir.string());

    // The stored grid reloads as an obstacle and is its own envelope (f = 0).
    auto file = read_grid_file(dir / "result.pshg");
    REQUIRE(file.values);
    auto again = parse_config_text(R"({"domain": {"kind": "ball"}, "h": "1/32", "obstacle": {"file": ")" +
                                   (dir / "result.pshg").string() + R"("}, "f": 0})");
    auto u = again.obstacle.realize(build_grid(again.domain, again.h, again.stencil));
    CHECK(std::memcmp(u.values().data(), file.values->values().data(), u.values().size() * sizeof(double)) == 0);
    fs::remove_all(dir);
}

TEST_CASE("modes produce identical result files") {
    auto a = scratch("mode_seq"), b = scratch("mode_rb");
    for (auto [dir, mode] : {std::pair{a, SweepMode::Sequential}, std::pair{b, SweepMode::RedBlack}}) {
        RunRequest req;
        req.config = parse_config_text(kMinimal);
        req.out = dir;
        req.mode = mode;
        std::ostringstream log;
        REQUIRE(run(req, log) == 0);
    }
    auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(read(a / "result.pshg") == read(b / "result.pshg"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("unwritable output directory fails without artifacts") {
    RunRequest req;
    req.config = parse_config_text(kMinimal);
    req.out = "/dev/null/out";
    std::ostringstream log;
    auto e = error_of([&] { run(req, log); });
    CHECK(e.code() == ErrorCode::IoError);
    auto rec = failure_record("envelope", e);
    CHECK(rec["status"] == "error");
    CHECK(rec["code"] == "IoError");
}

TEST_CASE("verify runs registered experiments with overrides") {
    auto dir = scratch("verify");
    RunRequest req;
    req.command = Command::Verify;
    req.argument = "translation";
    auto c = parse_config_text(R"({"domain": {"kind": "ball"}, "experiments": {"translation": {"h": 0.0625}}})");
    req.config = c;
    req.out = dir;
    std::ostringstream log;
    CHECK(run(req, log) == 0);
    std::ifstream in(dir / "translation.json");
    auto rep = nlohmann::json::parse(in);
    CHECK(rep["pass"] == true);
    CHECK(rep["inputs"]["params"]["h"].get<double>() == 0.0625);
    CHECK(fs::exists(dir / "verify.json"));
    fs::remove_all(dir);

    CHECK(error_of([] { find_experiment("transaltion"); }).code() == ErrorCode::InvalidArgument);
    CHECK(std::string(error_of([] { find_experiment("transaltion"); }).what()).find("translation") !=
          std::string::npos);
    auto bad = error_of([] { run_registered(find_experiment("translation"), {{"hh", 1}}, {}); });
    CHECK(bad.code() == ErrorCode::ValidationError);
}

TEST_CASE("every registered experiment has a distinct name") {
    std::set<std::string> names;
    for (const auto& e : experiment_registry()) names.insert(e.name);
    CHECK(names.size() == experiment_registry().size());
    CHECK(names.size() >= 14);
}
