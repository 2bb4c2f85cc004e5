#pragma once

#include <filesystem>
#include <string>

#include "ucs/engine.hpp"

namespace ucs {

/// Bumped whenever a column or summary field changes meaning.
inline constexpr int kOutputSchemaVersion = 1;

// Each CSV starts with a header row; numbers use fixed printf formats so
// reruns with the same seed and config produce identical bytes.
std::string links_csv(const Metrics& m, const std::string& run_id);
std::string slots_csv(const Metrics& m, const std::string& run_id);
std::string prk_csv(const Metrics& m, const std::string& run_id);
std::string modes_csv(const Metrics& m, const std::string& run_id);
std::string overhead_csv(const Metrics& m, const std::string& run_id);
std::string summary_json(const Metrics& m, const SimConfig& cfg, const std::string& run_id);

/// Writes links.csv, slots.csv, prk.csv, modes.csv, overhead.csv and
/// summary.json into `dir`, creating it if needed.
void write_outputs(const Metrics& m, const SimConfig& cfg, const std::string& run_id,
                   const std::filesystem::path& dir);

} // namespace ucs
