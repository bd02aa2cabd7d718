#include "pshenv/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <unistd.h>

#include "pshenv/capacity.hpp"
#include "pshenv/error.hpp"
#include "pshenv/grid_io.hpp"
#include "pshenv/registry.hpp"

namespace pshenv {

namespace fs = std::filesystem;
using nlohmann::json;

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + root_.string() + ": " + ec.message());
    auto probe = temp_for("probe");
    {
        std::ofstream out(probe);
        if (!out) throw Error(ErrorCode::IoError, "output directory " + root_.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

fs::path OutputDir::temp_for(const std::string& name) const {
    return root_ / ("." + name + ".tmp" + std::to_string(::getpid()));
}

void OutputDir::commit(const fs::path& tmp, const std::string& name) const {
    std::error_code ec;
    fs::rename(tmp, root_ / name, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot write " + (root_ / name).string());
    }
}

void OutputDir::write_text(const std::string& name, const std::string& content) const {
    auto tmp = temp_for(name);
    {
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "cannot write " + (root_ / name).string());
        }
    }
    commit(tmp, name);
}

void OutputDir::write_json(const std::string& name, const json& j) const { write_text(name, j.dump(2) + "\n"); }

void OutputDir::write_grid(const std::string& name, const GridFunction& u) const {
    auto tmp = temp_for(name);
    try {
        write_grid_function(tmp, u);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
    commit(tmp, name);
}

void OutputDir::write_report(const ExperimentReport& rep) const {
    for (const auto& t : rep.tables) write_text(rep.name + "_" + t.name + ".csv", t.to_csv());
    write_json(rep.name + ".json", rep.to_json());
}

Command parse_command(const std::string& name) {
    if (name == "envelope") return Command::Envelope;
    if (name == "berman") return Command::Berman;
    if (name == "capacity") return Command::Capacity;
    if (name == "verify") return Command::Verify;
    if (name == "convergence") return Command::Convergence;
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + name + "'");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Envelope: return "envelope";
        case Command::Berman: return "berman";
        case Command::Capacity: return "capacity";
        case Command::Verify: return "verify";
        case Command::Convergence: return "convergence";
    }
    return "?";
}

json failure_record(const std::string& command, const std::exception& e) {
    json j{{"status", "error"}, {"command", command}, {"message", e.what()}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) j["code"] = std::string(to_string(err->code()));
    else j["code"] = "InternalError";
    return j;
}

namespace {

json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

const RunConfig& need_config(const RunRequest& req) {
    if (!req.config) throw Error(ErrorCode::ValidationError, to_string(req.command) + " needs --config");
    return *req.config;
}

EnvelopeOptions options_for(const RunRequest& req) {
    EnvelopeOptions o = req.config ? req.config->envelope_options() : EnvelopeOptions{};
    if (req.mode) o.solve.mode = *req.mode;
    return o;
}

json effective_config(const RunRequest& req) {
    json j = req.config ? req.config->echo() : json::object();
    const auto o = options_for(req);
    j["mode"] = to_string(o.solve.mode);
    return j;
}

struct Sampled {
    GridPtr grid;
    GridFunction u;
    DensityField f;
    DensityField g;
};

Sampled sample_config(const RunConfig& c, double h) {
    Sampled s;
    s.grid = build_grid(c.domain, h, c.stencil);
    s.u = c.obstacle.realize(s.grid);
    s.f = DensityField::from_values(c.f.realize(s.grid), c.p, c.f.describe());
    s.g = DensityField::from_values(c.g.realize(s.grid), c.p, c.g.describe());
    return s;
}

GridFunction indicator(const GridSet& set) {
    GridFunction out(set.grid_ptr(), 0.0);
    for (std::size_t i : set.grid().interior()) out[i] = set.contains(i) ? 1.0 : 0.0;
    return out;
}

json envelope_summary(const EnvelopeResult& r) {
    return {{"method", to_string(r.method)},
            {"solve", to_json(r.report)},
            {"total_iterations", r.total_iterations},
            {"total_seconds", r.total_seconds},
            {"contact_nodes", r.contact.count()},
            {"active_nodes", r.active.count()},
            {"tolerances", {{"tol", r.tolerances.tol}, {"contact", r.tolerances.contact}, {"ma", r.tolerances.ma}}},
            {"maximality_gap", number(r.maximality_gap)}};
}

int run_envelope(const RunRequest& req, const OutputDir& out, std::ostream& log, bool force_berman) {
    const RunConfig& c = need_config(req);
    auto s = sample_config(c, c.h);
    auto opts = options_for(req);
    std::optional<GridFunction> ref;
    if (c.reference) ref = sample(Expression::parse(*c.reference, c.domain.dim()), s.grid);

    const bool berman = force_berman || c.method == EnvelopeMethod::Berman;
    EnvelopeResult r = berman ? envelope_berman(s.u, s.f, s.g, c.j_schedule, opts, ref ? &*ref : nullptr)
                              : envelope_obstacle(s.u, s.f, opts);

    json report{{"command", berman ? "berman" : "envelope"},
                {"config", effective_config(req)},
                {"grid", {{"interior_nodes", s.grid->interior().size()}, {"band_nodes", s.grid->band().size()}}},
                {"result", envelope_summary(r)}};
    auto cons = check_constraints(r, s.u, s.f);
    report["constraints"] = {{"ok", cons.ok},
                             {"above_obstacle", cons.above_obstacle},
                             {"psh", cons.psh.psh},
                             {"ma_deficit", cons.ma_deficit}};
    if (ref) report["sup_error_vs_reference"] = sup_diff(r.value, *ref);
    if (berman) {
        report["subsolution"] = {{"ok", r.subsolution.ok}, {"worst_excess", number(r.subsolution.worst_excess)}};
        CsvTable trace{"trace", {"j", "iterations", "above_obstacle", "drop_from_previous", "gap_to_reference"}, {}};
        for (const auto& st : r.trace)
            trace.rows.push_back({st.j, static_cast<double>(st.report.iterations), st.above_obstacle,
                                  st.drop_from_previous, st.gap_to_reference});
        out.write_text("berman_trace.csv", trace.to_csv());
    }
    out.write_grid("result.pshg", r.value);
    out.write_grid("contact.pshg", indicator(r.contact));
    out.write_json("report.json", report);

    log << (berman ? "berman" : "envelope") << ": " << s.grid->interior().size() << " interior nodes, "
        << r.total_iterations << " sweeps, " << r.total_seconds << " s";
    if (ref) log << ", sup error vs reference " << report["sup_error_vs_reference"].get<double>();
    log << "\n";
    return 0;
}

int run_capacity(const RunRequest& req, const OutputDir& out, std::ostream& log) {
    const RunConfig& c = need_config(req);
    if (!c.capacity_set) throw Error(ErrorCode::ValidationError, "capacity_set: required for the capacity command");
    auto grid = build_grid(c.domain, c.h, c.stencil);
    auto E = sample(Expression::parse(*c.capacity_set, c.domain.dim()), grid);
    GridSet set(grid);
    for (std::size_t i : grid->interior())
        if (E[i] <= 0.0) set.insert(i);
    auto cap = capacity(set, options_for(req));

    json report{{"command", "capacity"},
                {"config", effective_config(req)},
                {"set_nodes", set.count()},
                {"capacity", cap.value}};
    if (!set.empty()) {
        report["extremal"] = envelope_summary(cap.extremal);
        out.write_grid("result.pshg", cap.extremal.value);
    }
    out.write_json("report.json", report);
    log << "capacity: " << cap.value << " (" << set.count() << " nodes in E)\n";
    return 0;
}

int run_verify(const RunRequest& req, const OutputDir& out, std::ostream& log) {
    std::vector<const ExperimentEntry*> selected;
    if (req.argument.empty() || req.argument == "all") {
        for (const auto& e : experiment_registry()) selected.push_back(&e);
    } else {
        selected.push_back(&find_experiment(req.argument));
    }
    const json overrides = req.config ? req.config->experiments : json::object();
    if (req.config)
        for (auto it = overrides.begin(); it != overrides.end(); ++it) find_experiment(it.key());
    const auto opts = options_for(req);

    json summary{{"command", "verify"}, {"config", effective_config(req)}, {"experiments", json::array()}};
    bool all_pass = true;
    for (const auto* e : selected) {
        json row{{"experiment", e->name}};
        try {
            auto rep = run_registered(*e, overrides.contains(e->name) ? overrides[e->name] : json(), opts);
            out.write_report(rep);
            row["pass"] = rep.pass;
            row["seconds"] = rep.seconds;
            all_pass = all_pass && rep.pass;
            log << (rep.pass ? "[pass] " : "[FAIL] ") << e->name << " (" << rep.seconds << " s)\n";
        } catch (const Error& err) {
            if (err.code() == ErrorCode::IoError) throw;
            row["pass"] = false;
            row["error"] = failure_record("verify", err);
            all_pass = false;
            log << "[ERROR] " << e->name << ": " << err.what() << "\n";
        }
        summary["experiments"].push_back(row);
        // Rewritten after every experiment so completed results survive a crash.
        summary["pass"] = all_pass;
        out.write_json("verify.json", summary);
    }
    return all_pass ? 0 : 1;
}

int run_convergence(const RunRequest& req, const OutputDir& out, std::ostream& log) {
    const RunConfig& c = need_config(req);
    std::vector<double> spacings = req.argument.empty() ? c.refinements : parse_spacing_list(req.argument);
    if (spacings.empty()) throw Error(ErrorCode::ValidationError, "refinements: no spacings given");
    std::sort(spacings.begin(), spacings.end(), std::greater<>());
    const auto opts = options_for(req);

    CsvTable tab{"convergence", {"h", "sup_error", "error_over_h", "observed_order", "iterations", "seconds"}, {}};
    std::optional<GridFunction> prev;
    double prev_err = std::nan("");
    json rows = json::array();
    for (double h : spacings) {
        auto s = sample_config(c, h);
        auto r = envelope_obstacle(s.u, s.f, opts);
        double err;
        if (c.reference) {
            err = sup_diff(r.value, sample(Expression::parse(*c.reference, c.domain.dim()), s.grid));
        } else if (prev && std::abs(prev->grid().spacing() / h - std::round(prev->grid().spacing() / h)) < 1e-9) {
            // Without a closed form: change against the previous (coarser) grid at shared lattice points.
            err = 0.0;
            const double scale = std::round(prev->grid().spacing() / h);
            for (std::size_t i : prev->grid().interior()) {
                auto k = prev->grid().lattice_index(i);
                std::array<std::int64_t, 4> fine{};
                for (int a = 0; a < s.grid->axes(); ++a) fine[a] = std::llround(k[a] * scale);
                std::size_t j = s.grid->find(std::span<const std::int64_t>(fine.data(), std::size_t(s.grid->axes())));
                if (j != Grid::npos && s.grid->is_interior(j)) err = std::max(err, std::abs((*prev)[i] - r.value[j]));
            }
        } else {
            err = std::nan("");
        }
        double order = tab.rows.empty() || !(prev_err > 0.0) || !(err > 0.0)
                           ? std::nan("")
                           : std::log(prev_err / err) / std::log(tab.rows.back()[0] / h);
        tab.rows.push_back({h, err, err / h, order, static_cast<double>(r.report.iterations), r.report.seconds});
        rows.push_back({{"h", h}, {"sup_error", number(err)}, {"observed_order", number(order)},
                        {"solve", to_json(r.report)}});
        log << "h = " << h << ": error " << err << ", " << r.report.iterations << " sweeps\n";
        prev_err = err;
        prev = std::move(r.value);
    }
    out.write_text("convergence.csv", tab.to_csv());
    out.write_grid("result.pshg", *prev);
    out.write_json("report.json", {{"command", "convergence"},
                                   {"config", effective_config(req)},
                                   {"error_kind", c.reference ? "vs_reference" : "vs_previous_grid"},
                                   {"rows", rows}});
    return 0;
}

}  // namespace

int run(const RunRequest& request, std::ostream& log) {
    RunRequest req = request;
    fs::path root = req.out ? *req.out : req.config ? req.config->output : fs::path("out");
    if (req.config) req.config->output = root;
    if (req.config)
        for (const auto& w : req.config->warnings) log << "warning: " << w << "\n";
    OutputDir out(root);
    switch (req.command) {
        case Command::Envelope: return run_envelope(req, out, log, false);
        case Command::Berman: return run_envelope(req, out, log, true);
        case Command::Capacity: return run_capacity(req, out, log);
        case Command::Verify: return run_verify(req, out, log);
        case Command::Convergence: return run_convergence(req, out, log);
    }
    return 2;
}

}  // namespace pshenv
