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

// Command-line runner: one subcommand per experiment plus `run --config`.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hyperpure/experiments.hpp"

using namespace hyperpure;

namespace {

struct CommonFlags {
  std::optional<uint64_t> seed;
  std::string out;
  std::string format;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Random seed (overrides the config)");
  cmd->add_option("--out", f.out, "Output directory (default: $HYPERPURE_OUT or ./out)");
  cmd->add_option("--format", f.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--quiet", f.quiet, "Only report errors");
}

// "a.b=1.5" sets parameters.a.b; the value is read as JSON and falls back to a string.
void apply_assignment(Json& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  Json* node = &params;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: empty key component in '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    Json& child = (*node)[part];
    if (child.is_null()) child = Json::object();
    if (!child.is_object()) throw ConfigError("--set: '" + part + "' is not an object");
    node = &child;
    start = dot + 1;
  }
}

std::string default_out_dir() {
  const char* env = std::getenv("HYPERPURE_OUT");
  return env && *env ? env : "out";
}

int execute(ExperimentConfig config, const CommonFlags& flags) {
  if (flags.seed) config.seed = *flags.seed;
  if (flags.format == "csv") config.format = OutputFormat::csv;
  if (flags.format == "json") config.format = OutputFormat::json;
  const std::string out = flags.out.empty() ? default_out_dir() : flags.out;
  const ExperimentResult result = run_experiment(config);
  const auto paths = write_result(result, config, out);
  if (!flags.quiet) {
    std::cout << result.report.at("results").dump(2) << "\n";
    for (const auto& p : paths) std::cout << "wrote " << p << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperentanglement distribution and purification experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonFlags run_flags;
  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", run_config, "Config file")->required();
  add_common(run, run_flags);

  struct Sub {
    Experiment experiment;
    CLI::App* cmd;
    CommonFlags flags;
    std::string config;
    std::vector<std::string> sets;
  };
  std::vector<Sub> subs;
  subs.reserve(all_experiments().size());
  for (Experiment e : all_experiments()) {
    subs.push_back({e, nullptr, {}, {}, {}});
    Sub& s = subs.back();
    s.cmd = app.add_subcommand(to_string(e), "Run the " + to_string(e) + " experiment");
    s.cmd->add_option("--config", s.config, "Optional config file providing parameters");
    s.cmd->add_option("--set", s.sets, "Parameter override key=value (dots address nested keys)");
    add_common(s.cmd, s.flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return execute(ExperimentConfig::parse_text(read_text_file(run_config)), run_flags);
    for (auto& s : subs) {
      if (!s.cmd->parsed()) continue;
      ExperimentConfig config;
      if (!s.config.empty()) {
        config = ExperimentConfig::parse_text(read_text_file(s.config));
        if (config.experiment != s.experiment)
          throw ConfigError("config describes '" + to_string(config.experiment) + "', not '" +
                            to_string(s.experiment) + "'");
      }
      config.experiment = s.experiment;
      for (const auto& a : s.sets) apply_assignment(config.parameters, a);
      return execute(config, s.flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitConfig;
}
