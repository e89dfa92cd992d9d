#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace semiwig::cli {

struct Check {
  std::string name;
  double value;
  double threshold;
  std::string relation;  ///< "<=", ">=" or "=="
  bool pass;
};

struct RunResult {
  std::vector<Check> checks;
  std::vector<std::string> outputs;  ///< file names relative to the output directory
  std::vector<std::string> notes;
  bool ok() const;
};

struct RunOptions {
  std::filesystem::path out;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// Executes the experiment, writes CSVs and manifest.json into opts.out. Numerical errors propagate.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace semiwig::cli
