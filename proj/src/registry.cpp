#include "pshenv/registry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "pshenv/config.hpp"
#include "pshenv/error.hpp"

namespace pshenv {

using nlohmann::json;

namespace {

DomainSpec unit_ball(int n) { return DomainSpec::ball(n, std::vector<double>(2 * n, 0.0), 1.0); }

std::vector<double> doubles(const json& v) {
    std::vector<double> out;
    for (const auto& e : v) out.push_back(e.get<double>());
    return out;
}

Problem disc_problem(const json& p, const EnvelopeOptions& base, const std::string& u, const std::string& f,
                     const std::string& g = "0") {
    Problem pr = Problem::make(unit_ball(1), p.value("h", 1.0 / 32.0), u, f, g);
    pr.options = base;
    return pr;
}

// The three cases in which u is a discrete subsolution for g.
struct SubsolutionCase {
    const char* label;
    const char* u;
    const char* f;
    const char* g;
};
constexpr SubsolutionCase kSubsolutionCases[] = {
    {"zero_obstacle", "0", "4", "0"},
    {"double_well", "min(|z-0.3|^2, |z+0.3|^2)", "1", "4"},
    {"exact_solution", "0.5*(|z|^2-1)", "0", "2"},
};

std::vector<ExperimentEntry> build_registry() {
    std::vector<ExperimentEntry> r;

    r.push_back({"benchmark_n1", "disc, u = 0, f = 4 against |z|^2 - 1",
                 {{"spacings", {1.0 / 16, 1.0 / 32, 1.0 / 64}}, {"factor", 2.0}},
                 [](const json& p, const EnvelopeOptions& base) {
                     Problem pr = disc_problem(p, base, "0", "4");
                     return benchmark_study(pr, Expression::parse("|z|^2-1", 1), doubles(p["spacings"]),
                                            p["factor"].get<double>());
                 }});

    r.push_back({"benchmark_n2", "unit ball in C^2, u = 0, f = 32 against |z|^2 - 1",
                 {{"spacings", {1.0 / 8, 1.0 / 16}}, {"factor", 3.0}},
                 [](const json& p, const EnvelopeOptions& base) {
                     Problem pr = Problem::make(unit_ball(2), 1.0 / 8, "0", "32");
                     pr.options = base;
                     return benchmark_study(pr, Expression::parse("|z|^2-1", 2), doubles(p["spacings"]),
                                            p["factor"].get<double>());
                 }});

    r.push_back({"berman", "penalization against the obstacle method (disc benchmark and max(Re z, 0))",
                 {{"h", 1.0 / 64}, {"k", 10}, {"gap_tol", 0.02}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto js = geometric_schedule(p["k"].get<int>());
                     double gap = p["gap_tol"].get<double>();
                     auto a = berman_comparison(disc_problem(p, base, "0", "4", "0"), js, gap);
                     auto b = berman_comparison(disc_problem(p, base, "max(re(z), 0)", "0", "1"), js, gap);
                     a.name = "disc";
                     b.name = "kink";
                     return combine_reports("berman", {std::move(a), std::move(b)});
                 }});

    r.push_back({"berman_monotone", "u_j <= u_{j+1} and u_j <= u on the subsolution cases",
                 {{"h", 1.0 / 32}, {"k", 10}, {"gap_tol", 0.02}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto js = geometric_schedule(p["k"].get<int>());
                     std::vector<ExperimentReport> cases;
                     for (const auto& c : kSubsolutionCases) {
                         auto rep = berman_comparison(disc_problem(p, base, c.u, c.f, c.g), js,
                                                      p["gap_tol"].get<double>());
                         rep.name = c.label;
                         bool mono = rep.measured["below_obstacle"].get<bool>() &&
                                     rep.measured["increasing_in_j"].get<bool>() &&
                                     rep.measured["subsolution_ok"].get<bool>();
                         rep.rule = "subsolution check passes, u_j <= u + 2 tol, u_j <= u_{j+1} + 2 tol";
                         rep.pass = mono;
                         cases.push_back(std::move(rep));
                     }
                     return combine_reports("berman_monotone", std::move(cases));
                 }});

    r.push_back({"ma_bound", "ma_density(P) <= max(f, g) * 1.05 + ma_tol on the subsolution cases",
                 {{"h", 1.0 / 32}, {"k", 10}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto js = geometric_schedule(p["k"].get<int>());
                     std::vector<ExperimentReport> cases;
                     for (const auto& c : kSubsolutionCases) {
                         auto rep = ma_bound_check(disc_problem(p, base, c.u, c.f, c.g), js);
                         rep.name = c.label;
                         cases.push_back(std::move(rep));
                     }
                     return combine_reports("ma_bound", std::move(cases));
                 }});

    r.push_back({"stability", "f = 4 + t on the disc: sup gap against ||f - g||_p^(1/n)",
                 {{"h", 1.0 / 32}, {"t", {0.5, 1.0, 2.0}}, {"p", 2.0}, {"spread", 4.0}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto grid = build_grid(unit_ball(1), p["h"].get<double>(), StencilSet::standard(1));
                     const double lp = p["p"].get<double>();
                     auto u = GridFunction(grid, 0.0);
                     auto f0 = DensityField::constant(grid, 4.0, lp);
                     std::vector<DensityField> pert;
                     for (double t : doubles(p["t"])) pert.push_back(DensityField::constant(grid, 4.0 + t, lp));
                     return stability_study(u, f0, pert, lp, base, p["spread"].get<double>());
                 }});

    r.push_back({"capacity_n1", "Cap(closed B_r, B_1) in C against (2 pi / log(1/r))",
                 {{"h", 1.0 / 64}, {"radii", {0.4, 0.5, 0.6}}, {"rel_tol", 0.10}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto rep = ball_capacity_study(1, p["h"].get<double>(), doubles(p["radii"]),
                                                    p["rel_tol"].get<double>(), base);
                     rep.name = "capacity_n1";
                     return rep;
                 }});

    r.push_back({"capacity_n2", "Cap(closed B_r, B_1) in C^2 against (2 pi / log(1/r))^2",
                 {{"h", 1.0 / 24}, {"radii", {0.5}}, {"rel_tol", 0.15}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto rep = ball_capacity_study(2, p["h"].get<double>(), doubles(p["radii"]),
                                                    p["rel_tol"].get<double>(), base);
                     rep.name = "capacity_n2";
                     return rep;
                 }});

    r.push_back({"idempotence", "P(P(u, 0), f) = P(u, f) on the double-well obstacle",
                 {{"h", 1.0 / 32}},
                 [](const json& p, const EnvelopeOptions& base) {
                     return idempotence_study(disc_problem(p, base, "min(|z-0.3|^2, |z+0.3|^2)", "1"));
                 }});

    r.push_back({"translation", "bit-identical envelopes under a lattice translation",
                 {{"h", 1.0 / 32}, {"offset", {0.25, -0.125}}},
                 [](const json& p, const EnvelopeOptions& base) {
                     return translation_check(disc_problem(p, base, "min(|z-0.3|^2, |z+0.3|^2)", "1"),
                                              doubles(p["offset"]));
                 }});

    r.push_back({"monotone_limits", "obstacles u + 1/j and u - 1/j on the disc benchmark",
                 {{"h", 1.0 / 32}, {"j", {1.0, 2.0, 4.0, 8.0, 16.0}}},
                 [](const json& p, const EnvelopeOptions& base) {
                     return obstacle_limits_study(disc_problem(p, base, "0", "4"), doubles(p["j"]));
                 }});

    r.push_back({"exhaustion", "concentric discs of radius 1 - 1/(j+2) exhausting the unit disc",
                 {{"h", 1.0 / 32}, {"j", {0, 2, 6, 14, 30}}, {"final_factor", 3.0}},
                 [](const json& p, const EnvelopeOptions& base) {
                     Problem pr = disc_problem(p, base, "0", "4");
                     std::vector<DomainSpec> inner;
                     for (double j : doubles(p["j"])) inner.push_back(DomainSpec::ball(1, {0.0, 0.0}, 1.0 - 1.0 / (j + 2.0)));
                     return exhaustion_study(pr, inner, p["final_factor"].get<double>() * pr.h);
                 }});

    r.push_back({"capacity_inequality", "u = 0 against a dip of depth 2 eps on a small disc, W = B(0, 0.5)",
                 {{"h", 1.0 / 32},
                  {"bump_center", {0.1, 0.0}},
                  {"bump_radius", 0.2},
                  {"bump_amplitude", -2.0},
                  {"w_radius", 0.5},
                  {"eps", {0.1, 0.2}},
                  {"f", 0.0},
                  {"cap_tol", 1e-6}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto grid = build_grid(unit_ball(1), p["h"].get<double>(), StencilSet::standard(1));
                     GridFunction u(grid, 0.0);
                     auto f = DensityField::constant(grid, p["f"].get<double>());
                     auto W = DomainSpec::ball(1, {0.0, 0.0}, p["w_radius"].get<double>());
                     auto c = doubles(p["bump_center"]);
                     const double r = p["bump_radius"].get<double>();
                     std::vector<ExperimentReport> cases;
                     for (double eps : doubles(p["eps"])) {
                         // v = a eps max(0, 1 - |z - c|^2 / r^2)
                         GridFunction v(grid, 0.0);
                         const double amp = p["bump_amplitude"].get<double>() * eps;
                         for (auto* nodes : {&grid->interior(), &grid->band()})
                             for (std::size_t i : *nodes) {
                                 auto x = grid->coords(i);
                                 double d2 = (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
                                 v[i] = amp * std::max(0.0, 1.0 - d2 / (r * r));
                             }
                         auto rep = capacity_inequality_check(u, v, W, eps, f, base, p["cap_tol"].get<double>());
                         rep.name = "eps_" + std::to_string(eps).substr(0, 4);
                         cases.push_back(std::move(rep));
                     }
                     return combine_reports("capacity_inequality", std::move(cases));
                 }});

    r.push_back({"shrink", "P on shrunk discs against P on the disc benchmark",
                 {{"h", 1.0 / 64}, {"deltas", {1.0 / 8, 1.0 / 16, 1.0 / 32}}},
                 [](const json& p, const EnvelopeOptions& base) {
                     return shrink_comparison(disc_problem(p, base, "0", "4"), doubles(p["deltas"]));
                 }});

    r.push_back({"continuity", "discrete Lipschitz constants of P on the disc benchmark",
                 {{"spacings", {1.0 / 16, 1.0 / 32, 1.0 / 64}}},
                 [](const json& p, const EnvelopeOptions& base) {
                     return continuity_modulus(disc_problem(p, base, "0", "4"), doubles(p["spacings"]));
                 }});

    r.push_back({"determinism", "serial and colored parallel sweeps give identical grids",
                 {{"h", 1.0 / 64}},
                 [](const json& p, const EnvelopeOptions& base) {
                     auto t0 = std::chrono::steady_clock::now();
                     auto grid = build_grid(unit_ball(1), p["h"].get<double>(), StencilSet::standard(1));
                     GridFunction u(grid, 0.0);
                     auto f = DensityField::constant(grid, 4.0);
                     EnvelopeOptions a = base, b = base;
                     a.solve.mode = SweepMode::Sequential;
                     b.solve.mode = SweepMode::RedBlack;
                     auto Pa = envelope_obstacle(u, f, a);
                     auto Pb = envelope_obstacle(u, f, b);
                     auto va = Pa.value.values(), vb = Pb.value.values();
                     std::size_t differing = 0;
                     for (std::size_t i = 0; i < va.size(); ++i)
                         if (std::memcmp(&va[i], &vb[i], sizeof(double)) != 0) ++differing;
                     ExperimentReport rep;
                     rep.name = "determinism";
                     rep.measured = {{"differing_nodes", differing},
                                     {"iterations_seq", Pa.report.iterations},
                                     {"iterations_redblack", Pb.report.iterations}};
                     rep.rule = "result grids of --mode seq and --mode redblack are bit-identical";
                     rep.pass = differing == 0 && Pa.report.iterations == Pb.report.iterations;
                     rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                     return rep;
                 }});
    return r;
}

}  // namespace

const std::vector<ExperimentEntry>& experiment_registry() {
    static const std::vector<ExperimentEntry> reg = build_registry();
    return reg;
}

const ExperimentEntry& find_experiment(const std::string& name) {
    const auto& reg = experiment_registry();
    for (const auto& e : reg)
        if (e.name == name) return e;
    std::string best;
    std::size_t dist = 99;
    for (const auto& e : reg) {
        std::size_t d = edit_distance(name, e.name);
        if (d < dist) {
            dist = d;
            best = e.name;
        }
    }
    std::string msg = "unknown experiment '" + name + "'";
    if (dist <= 3) msg += "; did you mean \"" + best + "\"?";
    throw Error(ErrorCode::InvalidArgument, msg);
}

ExperimentReport run_registered(const ExperimentEntry& entry, const json& overrides, const EnvelopeOptions& base) {
    json params = entry.defaults;
    if (!overrides.is_null()) {
        if (!overrides.is_object())
            throw Error(ErrorCode::ValidationError, "experiments." + entry.name + ": expected an object");
        for (auto it = overrides.begin(); it != overrides.end(); ++it) {
            if (!params.contains(it.key()))
                throw Error(ErrorCode::ValidationError,
                            "experiments." + entry.name + ": unknown parameter '" + it.key() + "'");
            params[it.key()] = it.value();
        }
    }
    ExperimentReport rep;
    try {
        rep = entry.run(params, base);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ValidationError, "experiments." + entry.name + ": " + e.what());
    }
    rep.inputs["params"] = params;
    rep.inputs["tol"] = base.solve.tol > 0.0 ? json(base.solve.tol) : json("default");
    rep.inputs["mode"] = to_string(base.solve.mode);
    return rep;
}

ExperimentReport combine_reports(const std::string& name, std::vector<ExperimentReport> cases) {
    ExperimentReport out;
    out.name = name;
    out.pass = !cases.empty();
    for (auto& c : cases) {
        out.inputs["cases"][c.name] = c.inputs;
        out.measured[c.name] = c.measured;
        out.measured[c.name]["pass"] = c.pass;
        if (out.rule.empty()) out.rule = c.rule;
        out.pass = out.pass && c.pass;
        out.seconds += c.seconds;
        for (auto& t : c.tables) {
            t.name = c.name + "_" + t.name;
            out.tables.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace pshenv
