#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pshenv/domain.hpp"
#include "pshenv/envelope.hpp"
#include "pshenv/stencil.hpp"

namespace pshenv {

/// A scalar field given as a constant, an expression, or a PSHG file.
struct FieldSource {
    enum class Kind { Constant, Expression, File };
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::string text;  // expression text or file path

    /// Samples (or loads) the field on `grid`. Files must hold values on a
    /// grid with the same lattice covering every interior and band node.
    GridFunction realize(const GridPtr& grid) const;
    std::string describe() const;
    nlohmann::json to_json() const;
};

struct RunConfig {
    DomainSpec domain;
    double h = 1.0 / 32.0;
    std::vector<double> refinements;  // convergence runs
    StencilSet stencil = StencilSet::standard(1);
    FieldSource obstacle;
    FieldSource f;
    FieldSource g;
    double p = 2.0;
    std::optional<std::string> reference;  // closed form to compare against
    EnvelopeMethod method = EnvelopeMethod::Obstacle;
    std::vector<double> j_schedule = geometric_schedule(10);
    double tol = 0.0;
    long max_iter = 1'000'000;
    SweepMode mode = SweepMode::RedBlack;
    bool check_maximality = false;
    /// Capacity runs: E = {capacity_set <= 0} on the interior.
    std::optional<std::string> capacity_set;
    /// Per-experiment parameter overrides, keyed by experiment name.
    nlohmann::json experiments = nlohmann::json::object();
    std::filesystem::path output = "out";
    std::uint64_t seed = 0;  // reserved; every pipeline is deterministic
    std::vector<std::string> warnings;  // unknown keys in lenient mode

    EnvelopeOptions envelope_options() const;
    /// The effective configuration with every default resolved.
    nlohmann::json echo() const;
};

/// Reads and validates a JSON config. Unknown keys are a ParseError in strict
/// mode (with a "did you mean" suggestion) and a warning otherwise. Field
/// problems raise ValidationError naming the field; relative file paths are
/// resolved against the config's directory.
RunConfig parse_config(const std::filesystem::path& path, bool strict = true);
RunConfig parse_config_text(const std::string& text, bool strict = true,
                            const std::filesystem::path& base_dir = ".");

/// "1/16,1/32,0.01" -> {0.0625, 0.03125, 0.01}. Throws ParseError.
std::vector<double> parse_spacing_list(const std::string& text);

/// Edit distance, used for key suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace pshenv
