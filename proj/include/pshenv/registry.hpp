#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pshenv/experiments.hpp"

namespace pshenv {

/// One verification experiment with its default benchmark parameters.
/// Parameters can be overridden per run; unknown parameter names are an
/// error so a typo never silently falls back to a default.
struct ExperimentEntry {
    std::string name;
    std::string summary;
    nlohmann::json defaults;
    std::function<ExperimentReport(const nlohmann::json& params, const EnvelopeOptions& base)> run;
};

const std::vector<ExperimentEntry>& experiment_registry();

/// Throws InvalidArgument (with a suggestion) for unknown names.
const ExperimentEntry& find_experiment(const std::string& name);

/// Merges `overrides` into the defaults, runs, and records the effective
/// parameters under inputs["params"].
ExperimentReport run_registered(const ExperimentEntry& entry, const nlohmann::json& overrides,
                                const EnvelopeOptions& base);

/// Folds several case reports into one: measured values and tables are
/// keyed by case, and the result passes only when every case passes.
ExperimentReport combine_reports(const std::string& name, std::vector<ExperimentReport> cases);

}  // namespace pshenv
