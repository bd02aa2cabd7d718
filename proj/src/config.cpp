#include "pshenv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pshenv/error.hpp"
#include "pshenv/grid_io.hpp"

namespace pshenv {

using nlohmann::json;

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

// Helper carrying the raw text so errors can point at a line.
class Reader {
public:
    Reader(const std::string& text, bool strict, std::filesystem::path base)
        : text_(text), strict_(strict), base_(std::move(base)) {}

    std::vector<std::string> warnings;

    int line_of_key(const std::string& key) const {
        auto pos = text_.find('"' + key + '"');
        if (pos == std::string::npos) return 0;
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    }

    std::string where(const std::string& path, const std::string& key) const {
        std::string full = path.empty() ? key : path + "." + key;
        int line = line_of_key(key);
        return line > 0 ? "key '" + full + "' (line " + std::to_string(line) + ")" : "key '" + full + "'";
    }

    void check_keys(const json& obj, const std::string& path, const std::vector<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const std::string& key = it.key();
            if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
            std::string best;
            std::size_t dist = 99;
            for (const auto& a : allowed) {
                std::size_t d = edit_distance(key, a);
                if (d < dist) {
                    dist = d;
                    best = a;
                }
            }
            std::string msg = "unknown " + where(path, key);
            if (dist <= 2) msg += "; did you mean \"" + best + "\"?";
            if (strict_) throw Error(ErrorCode::ParseError, msg);
            warnings.push_back(msg);
        }
    }

    [[noreturn]] void invalid(const std::string& field, const std::string& why) const {
        throw Error(ErrorCode::ValidationError, field + ": " + why);
    }

    double number(const json& v, const std::string& field) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            // Allow simple fractions such as "1/32".
            try {
                return parse_spacing_list(v.get<std::string>()).at(0);
            } catch (const Error&) {
            }
        }
        invalid(field, "expected a number");
    }

    std::vector<double> numbers(const json& v, const std::string& field) const {
        if (!v.is_array()) invalid(field, "expected a list of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, field));
        return out;
    }

    std::filesystem::path resolve(const std::string& p) const {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_ / path;
    }

private:
    const std::string& text_;
    bool strict_;
    std::filesystem::path base_;
};

DomainSpec read_domain(Reader& r, const json& d) {
    if (!d.is_object()) r.invalid("domain", "expected an object");
    r.check_keys(d, "domain", {"kind", "n", "center", "radius", "radii", "lo", "hi", "rho"});
    std::string kind = d.value("kind", "ball");
    int n = d.contains("n") ? d["n"].get<int>() : 1;
    if (n != 1 && n != 2) r.invalid("domain.n", "dimension must be 1 or 2");
    auto center = d.contains("center") ? r.numbers(d["center"], "domain.center") : std::vector<double>(2 * n, 0.0);
    try {
        if (kind == "ball") return DomainSpec::ball(n, center, d.contains("radius") ? r.number(d["radius"], "domain.radius") : 1.0);
        if (kind == "polydisc")
            return DomainSpec::polydisc(n, center, d.contains("radii") ? r.numbers(d["radii"], "domain.radii")
                                                                         : std::vector<double>(n, 1.0));
        if (kind == "box") {
            if (!d.contains("lo") || !d.contains("hi")) r.invalid("domain", "box needs lo and hi");
            return DomainSpec::box(r.numbers(d["lo"], "domain.lo"), r.numbers(d["hi"], "domain.hi"));
        }
        if (kind == "sublevel") {
            if (!d.contains("rho") || !d.contains("lo") || !d.contains("hi"))
                r.invalid("domain", "sublevel needs rho, lo and hi");
            return DomainSpec::sublevel(n, d["rho"].get<std::string>(), r.numbers(d["lo"], "domain.lo"),
                                        r.numbers(d["hi"], "domain.hi"));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ValidationError) throw;
        r.invalid("domain", e.what());
    }
    r.invalid("domain.kind", "unknown kind '" + kind + "' (ball, polydisc, box, sublevel)");
}

Direction read_direction(Reader& r, const json& v, int n, const std::string& field) {
    // [[re, im], [re, im]] for n = 2, [[re, im]] or [re, im] for n = 1.
    Direction d;
    d.n = n;
    if (!v.is_array()) r.invalid(field, "direction must be a list of [re, im] pairs");
    json comps = v;
    if (n == 1 && v.size() == 2 && v[0].is_number()) comps = json::array({v});
    if (static_cast<int>(comps.size()) != n) r.invalid(field, "direction needs " + std::to_string(n) + " components");
    for (int k = 0; k < n; ++k) {
        const auto& c = comps[k];
        if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer())
            r.invalid(field, "components must be Gaussian integers [re, im]");
        d.c[k] = {c[0].get<std::int64_t>(), c[1].get<std::int64_t>()};
    }
    return d;
}

StencilSet read_stencil(Reader& r, const json& s, int n) {
    if (!s.is_object()) r.invalid("stencil", "expected an object");
    r.check_keys(s, "stencil", {"frames", "extra_frames"});
    if (n == 1) {
        if (s.contains("frames") || s.contains("extra_frames"))
            r.invalid("stencil", "frames are only used for n = 2");
        return StencilSet::standard(1);
    }
    std::vector<std::array<Direction, 2>> frames;
    auto add = [&](const json& list, const std::string& field) {
        if (!list.is_array()) r.invalid(field, "expected a list of frames");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const auto& fr = list[k];
            std::string name = field + "[" + std::to_string(k) + "]";
            if (!fr.is_array() || fr.size() != 2) r.invalid(name, "a frame is a pair of directions");
            frames.push_back({read_direction(r, fr[0], n, name), read_direction(r, fr[1], n, name)});
        }
    };
    if (s.contains("frames")) {
        add(s["frames"], "stencil.frames");
    } else {
        auto std2 = StencilSet::standard(2);
        for (const Frame& f : std2.frames()) frames.push_back({std2.directions()[f.first], std2.directions()[f.second]});
    }
    if (s.contains("extra_frames")) add(s["extra_frames"], "stencil.extra_frames");
    try {
        return StencilSet::from_frames(2, frames);
    } catch (const Error& e) {
        r.invalid("stencil", e.what());
    }
}

FieldSource read_field(Reader& r, const json& v, const std::string& field, int n, bool density) {
    FieldSource src;
    if (v.is_number()) {
        src.kind = FieldSource::Kind::Constant;
        src.value = v.get<double>();
        if (!std::isfinite(src.value)) r.invalid(field, "value must be finite");
        if (density && src.value < 0.0) r.invalid(field, "density must be >= 0");
        return src;
    }
    if (v.is_string()) {
        src.kind = FieldSource::Kind::Expression;
        src.text = v.get<std::string>();
        Expression e;
        try {
            e = Expression::parse(src.text, n);
        } catch (const Error& err) {
            r.invalid(field, err.what());
        }
        if (density) {
            // Constant expressions are checked right away; others when sampled.
            std::vector<double> origin(2 * n, 0.0), probe(2 * n, 0.37);
            double a = e(origin), b = e(probe);
            if (a == b && a < 0.0) r.invalid(field, "density must be >= 0 (\"" + src.text + "\")");
        }
        return src;
    }
    if (v.is_object()) {
        r.check_keys(v, field, {"file"});
        if (!v.contains("file") || !v["file"].is_string()) r.invalid(field, "expected {\"file\": path}");
        src.kind = FieldSource::Kind::File;
        src.text = r.resolve(v["file"].get<std::string>()).string();
        if (!std::filesystem::exists(src.text)) r.invalid(field, "file not found: " + src.text);
        return src;
    }
    r.invalid(field, "expected a number, an expression string or {\"file\": path}");
}

}  // namespace

GridFunction FieldSource::realize(const GridPtr& grid) const {
    switch (kind) {
        case Kind::Constant: return GridFunction(grid, value);
        case Kind::Expression: return sample(Expression::parse(text, grid->dim()), grid);
        case Kind::File: {
            auto file = read_grid_file(text, &grid->stencil());
            if (!file.values) throw Error(ErrorCode::ValidationError, text + " holds no values");
            return restrict_to(*file.values, grid);
        }
    }
    return GridFunction(grid, 0.0);
}

std::string FieldSource::describe() const {
    switch (kind) {
        case Kind::Constant: {
            std::ostringstream os;
            os.precision(17);
            os << value;
            return os.str();
        }
        case Kind::Expression: return text;
        case Kind::File: return "file:" + text;
    }
    return "";
}

json FieldSource::to_json() const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Expression: return text;
        case Kind::File: return {{"file", text}};
    }
    return nullptr;
}

std::vector<double> parse_spacing_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.empty()) continue;
        try {
            std::size_t slash = item.find('/');
            std::size_t used = 0;
            double v;
            if (slash == std::string::npos) {
                v = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
            } else {
                std::string a = item.substr(0, slash), b = item.substr(slash + 1);
                std::size_t ua = 0, ub = 0;
                double num = std::stod(a, &ua), den = std::stod(b, &ub);
                if (ua != a.size() || ub != b.size()) throw std::invalid_argument(item);
                v = num / den;
            }
            if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad spacing '" + item + "' (expected e.g. 1/32 or 0.03125)");
        }
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "empty spacing list");
    return out;
}

EnvelopeOptions RunConfig::envelope_options() const {
    EnvelopeOptions o;
    o.solve.tol = tol;
    o.solve.max_iter = max_iter;
    o.solve.mode = mode;
    o.check_maximality = check_maximality;
    return o;
}

json RunConfig::echo() const {
    json j;
    j["domain"] = domain.describe();
    j["h"] = h;
    if (!refinements.empty()) j["refinements"] = refinements;
    json frames = json::array();
    for (const Frame& fr : stencil.frames()) {
        json pair = json::array();
        for (int idx : {fr.first, fr.second}) {
            const auto& d = stencil.directions()[idx];
            json c = json::array();
            for (int k = 0; k < d.n; ++k) c.push_back({d.c[k].re, d.c[k].im});
            pair.push_back(c);
        }
        frames.push_back(pair);
    }
    j["stencil"] = {{"frames", frames}};
    j["obstacle"] = obstacle.to_json();
    j["f"] = f.to_json();
    j["g"] = g.to_json();
    j["p"] = p;
    if (reference) j["reference"] = *reference;
    j["method"] = to_string(method);
    j["schedule"] = {{"j", j_schedule}};
    j["tol"] = tol > 0.0 ? tol : default_tol(domain.dim());
    j["max_iter"] = max_iter;
    j["mode"] = to_string(mode);
    j["check_maximality"] = check_maximality;
    if (capacity_set) j["capacity_set"] = *capacity_set;
    j["experiments"] = experiments;
    j["output"] = output.string();
    j["seed"] = seed;
    return j;
}

RunConfig parse_config_text(const std::string& text, bool strict, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t pos = std::min(e.byte, text.size());
        int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!root.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");

    Reader r(text, strict, base_dir);
    r.check_keys(root, "", {"domain", "h", "refinements", "stencil", "obstacle", "f", "g", "p", "reference",
                            "method", "schedule", "tol", "max_iter", "mode", "check_maximality", "capacity_set",
                            "experiments", "output", "seed"});
    RunConfig c;
    try {
        if (!root.contains("domain")) r.invalid("domain", "required");
        c.domain = read_domain(r, root["domain"]);
        const int n = c.domain.dim();
        c.stencil = root.contains("stencil") ? read_stencil(r, root["stencil"], n) : StencilSet::standard(n);
        if (root.contains("h")) c.h = r.number(root["h"], "h");
        if (!(c.h > 0.0)) r.invalid("h", "spacing must be > 0");
        if (root.contains("refinements")) {
            if (root["refinements"].is_string()) c.refinements = parse_spacing_list(root["refinements"].get<std::string>());
            else c.refinements = r.numbers(root["refinements"], "refinements");
        }
        c.obstacle = root.contains("obstacle") ? read_field(r, root["obstacle"], "obstacle", n, false) : FieldSource{};
        c.f = root.contains("f") ? read_field(r, root["f"], "f", n, true) : FieldSource{};
        c.g = root.contains("g") ? read_field(r, root["g"], "g", n, true) : FieldSource{};
        if (root.contains("p")) {
            c.p = r.number(root["p"], "p");
            if (!(c.p > 1.0)) r.invalid("p", "exponent must be > 1");
        }
        if (root.contains("reference")) {
            c.reference = root["reference"].get<std::string>();
            try {
                Expression::parse(*c.reference, n);
            } catch (const Error& e) {
                r.invalid("reference", e.what());
            }
        }
        if (root.contains("method")) {
            std::string m = root["method"].get<std::string>();
            if (m == "obstacle") c.method = EnvelopeMethod::Obstacle;
            else if (m == "berman") c.method = EnvelopeMethod::Berman;
            else r.invalid("method", "expected \"obstacle\" or \"berman\"");
        }
        if (root.contains("schedule")) {
            const json& s = root["schedule"];
            if (!s.is_object()) r.invalid("schedule", "expected {\"k\": K} or {\"j\": [...]}");
            r.check_keys(s, "schedule", {"k", "j"});
            if (s.contains("j")) {
                c.j_schedule = r.numbers(s["j"], "schedule.j");
                if (c.j_schedule.empty()) r.invalid("schedule.j", "empty schedule");
                for (double j : c.j_schedule)
                    if (!(j >= 0.0)) r.invalid("schedule.j", "penalization exponents must be >= 0");
            } else if (s.contains("k")) {
                int k = s["k"].get<int>();
                if (k < 0 || k > 30) r.invalid("schedule.k", "expected 0 <= k <= 30");
                c.j_schedule = geometric_schedule(k);
            }
        }
        if (root.contains("tol")) {
            c.tol = r.number(root["tol"], "tol");
            if (!(c.tol > 0.0)) r.invalid("tol", "tolerance must be > 0");
        }
        if (root.contains("max_iter")) {
            c.max_iter = root["max_iter"].get<long>();
            if (c.max_iter <= 0) r.invalid("max_iter", "must be > 0");
        }
        if (root.contains("mode")) {
            try {
                c.mode = parse_sweep_mode(root["mode"].get<std::string>());
            } catch (const Error& e) {
                r.invalid("mode", e.what());
            }
        }
        if (root.contains("check_maximality")) c.check_maximality = root["check_maximality"].get<bool>();
        if (root.contains("capacity_set")) {
            c.capacity_set = root["capacity_set"].get<std::string>();
            try {
                Expression::parse(*c.capacity_set, n);
            } catch (const Error& e) {
                r.invalid("capacity_set", e.what());
            }
        }
        if (root.contains("experiments")) {
            if (!root["experiments"].is_object()) r.invalid("experiments", "expected an object keyed by experiment name");
            c.experiments = root["experiments"];
        }
        if (root.contains("output")) c.output = root["output"].get<std::string>();
        if (root.contains("seed")) c.seed = root["seed"].get<std::uint64_t>();
    } catch (const json::type_error& e) {
        throw Error(ErrorCode::ValidationError, std::string("wrong value type: ") + e.what());
    }
    c.warnings = std::move(r.warnings);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), strict, path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace pshenv
