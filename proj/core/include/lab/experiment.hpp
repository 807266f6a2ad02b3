#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lab/group.hpp"

namespace lab {

std::string lab_version();

// A fully serialized experiment description. Every random quantity in a
// report is reproducible from (config, seed).
struct ExperimentConfig {
    std::string subcommand;
    nlohmann::json params = nlohmann::json::object();
    Seed seed;
    int threads = 1;
    std::string out_path;
    std::string csv_path;
    double budget = 1e8;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct RunReport {
    nlohmann::json config_echo;
    std::vector<nlohmann::json> records;
    nlohmann::json aggregates;
    double wall_ms = 0;
    std::string version;
    // 0 = complete / verdict true, 2 = verdict false. Errors throw.
    int exit_code = 0;
};

// Dispatches to the owning module. Unknown or missing parameter fields raise
// errors naming the field.
RunReport run(const ExperimentConfig& config);

// One JSON object per line: config, then records, then the aggregate line
// (which carries wall time and version; per-record lines are byte-stable
// across identical runs).
void write_jsonl(const RunReport& report, std::ostream& os);

// Flat projection of the per-record scalars.
void write_csv_summary(const RunReport& report, std::ostream& os);

// "cyclic:101", "cube:12", or "paley:17" (cyclic with the quadratic-residue
// set attached).
struct GroupSpec {
    Group group;
    std::optional<SubsetMask> paley_set;
    std::string text;
};

GroupSpec parse_group_spec(const std::string& text);

}  // namespace lab
