// Copyright 2026 The hyperpure Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HYPERPURE_EXPERIMENTS_HPP
#define HYPERPURE_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperpure/counting.hpp"
#include "hyperpure/io.hpp"
#include "hyperpure/pll.hpp"

namespace hyperpure {

enum class Experiment {
  distribute_baseline,
  bf_purify,
  pf_purify,
  chsh_scan,
  werner_curve,
  syndrome_table,
  source_metrics,
  pll_lock,
  purify_sweep,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);  // throws ConfigError
const std::vector<Experiment>& all_experiments();

enum class OutputFormat { csv, json };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exit statuses of the runner.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

/// {"experiment": name, "seed": int, "format": "csv"|"json", "parameters": {...}}.
/// Unknown keys at any level are rejected.
struct ExperimentConfig {
  Experiment experiment = Experiment::bf_purify;
  uint64_t seed = 1;
  OutputFormat format = OutputFormat::csv;
  Json parameters = Json::object();

  static ExperimentConfig parse(const Json& j);
  static ExperimentConfig parse_text(const std::string& text);
  Json to_json() const;
};

/// A numeric table with unit-bearing column names.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  std::string to_csv() const;
  Json to_json() const;
};

struct ExperimentResult {
  Json report;               // config echo, version, notes, results
  std::vector<Table> tables;
};

/// Runs one experiment. Throws ConfigError on bad parameters, NumericalError on
/// numerical failure; never touches the filesystem.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes report.json, one file per table in the configured format, and a
/// metadata.json holding the timestamp. Returns the written paths.
std::vector<std::string> write_result(const ExperimentResult& result, const ExperimentConfig& config,
                                      const std::string& out_dir);

/// Bit-flip-only purification curve: 501 rows of F, F_after, diagonal over [0.5, 1].
Table bf_purification_curve(int points = 501);

/// Reads a detection model: an optional "preset" (ideal or paper) followed by overrides.
DetectionModel detection_model_from_json(const Json& j);
Json to_json(const DetectionModel& m);
PllConfig pll_config_from_json(const Json& j);
Json to_json(const PllConfig& c);

/// Maps the exception thrown by parse/run/write to an exit status.
int exit_code_for(const std::exception& e);

}  // namespace hyperpure

#endif  // HYPERPURE_EXPERIMENTS_HPP
