#pragma once

#include "childpen/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace childpen {

/// What a command wrote; `manifest` is also written next to the outputs.
struct CommandResult {
    std::vector<std::filesystem::path> outputs;
    nlohmann::json manifest;
};

/// Loads respondent records from the configured inputs (raw survey or canonical table).
std::vector<RespondentRecord> load_records(const RunConfig& config, ParseReport* report = nullptr);

CommandResult cmd_ingest(const RunConfig& config);
CommandResult cmd_fit_dist(const RunConfig& config);
CommandResult cmd_trajectory(const RunConfig& config);
CommandResult cmd_gap(const RunConfig& config);
CommandResult cmd_validate(const RunConfig& config);
CommandResult cmd_generate(const RunConfig& config);

/// Column header of trajectory tables.
const std::vector<std::string>& trajectory_columns();

/// Manifest with the "generated_at" timestamp removed, for reproducibility checks.
nlohmann::json manifest_without_timestamp(nlohmann::json manifest);

}  // namespace childpen
