#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pshenv/config.hpp"
#include "pshenv/experiments.hpp"

namespace pshenv {

/// Output directory whose files appear atomically: each file is written to
/// a temporary name and renamed into place, so a failed run never leaves a
/// truncated artifact behind.
class OutputDir {
public:
    /// Creates the directory and probes that it is writable. Throws IoError.
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    void write_text(const std::string& name, const std::string& content) const;
    void write_json(const std::string& name, const nlohmann::json& j) const;
    void write_grid(const std::string& name, const GridFunction& u) const;
    void write_report(const ExperimentReport& rep) const;  // <name>.json plus one CSV per table

private:
    std::filesystem::path temp_for(const std::string& name) const;
    void commit(const std::filesystem::path& tmp, const std::string& name) const;

    std::filesystem::path root_;
};

enum class Command { Envelope, Berman, Capacity, Verify, Convergence };

Command parse_command(const std::string& name);
std::string to_string(Command c);

struct RunRequest {
    Command command = Command::Envelope;
    std::string argument;  // experiment name or refinement list
    std::optional<RunConfig> config;
    std::optional<std::filesystem::path> out;  // overrides config.output
    std::optional<SweepMode> mode;             // overrides config.mode
};

/// Exit status of a completed run: 0 when every selected check passed,
/// 1 when a check failed. Configuration and I/O problems throw Error.
int run(const RunRequest& request, std::ostream& log);

/// Machine-readable failure record for an exception that ended a run.
nlohmann::json failure_record(const std::string& command, const std::exception& e);

}  // namespace pshenv
