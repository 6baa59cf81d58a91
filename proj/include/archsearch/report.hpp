#pragma once

#include <string>

#include <json.hpp>

#include "archsearch/search.hpp"

namespace archsearch {

/// Full trace as JSON. Holds no wall-clock data; callers add a "timing"
/// member if they want one.
nlohmann::json report_to_json(const SearchReport& report);

nlohmann::json config_to_json(const SearchConfig& cfg);

/// Hidden widths joined with commas, e.g. "437,260".
std::string format_widths(const ArchKey& widths);

/// One row per depth: depth,best_hidden_neurons,training_error,testing_error.
/// The widths field is quoted because it contains commas.
std::string depth_errors_csv(const SearchReport& report);

/// Human-readable line for the global best.
std::string summary_line(const SearchReport& report);

}  // namespace archsearch
