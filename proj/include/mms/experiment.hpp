#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mms/io.hpp"

namespace mms {

/// Configuration problem: carries a human-readable message, where possible
/// with the 1-based line of the offending construct in the config text.
class config_error : public std::invalid_argument {
 public:
  config_error(const std::string& msg, int line = -1)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = -1;
};

struct ExperimentOutcome {
  json manifest;
  json result;
  std::filesystem::path out_dir;
  std::vector<std::string> files_written;
};

/// Parses, validates (unknown keys rejected) and runs one experiment config.
/// Flag overrides are applied before validation. Writes manifest.json,
/// result.json and task CSV dumps into the output directory; the result file
/// is a pure function of (config, seed).
ExperimentOutcome run_experiment(const std::string& config_text,
                                 const std::map<std::string, std::string>& overrides = {});

/// Same, reading the config from a file.
ExperimentOutcome run_experiment_file(const std::filesystem::path& config_path,
                                      const std::map<std::string, std::string>& overrides = {});

}  // namespace mms
