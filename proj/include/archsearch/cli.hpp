#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "archsearch/data_pipeline.hpp"
#include "archsearch/search.hpp"

namespace archsearch::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kIo = 3,
  kData = 4,
  kInternal = 5,
};

struct RunConfig {
  std::filesystem::path dataset;
  bool header = false;
  SplitFractions fractions;
  SearchConfig search;
  std::filesystem::path out_dir = "archsearch_out";
  bool write_report = true;
  bool write_depth_csv = true;
};

/// Either a config to execute, or an exit code with text to print (help,
/// usage errors).
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = kSuccess;
  std::string message;
};

/// `archsearch run <data.csv> [options]`. Command-line flags override values
/// from `--config <file>` (INI/TOML), which override built-in defaults.
ParseResult parse_args(int argc, const char* const* argv);

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + execute.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace archsearch::cli
