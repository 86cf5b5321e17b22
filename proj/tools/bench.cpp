/**
 * Copyright 2026 The pilotflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Weak-scaling benchmark harness.
//
//   bench run --config exp.json [--seed N] [--out DIR] [--parallel]
//   bench describe --protocol esmacs --replicas 25
//   bench plot --from DIR
//
// Exit status: 0 success, 1 a trial failed, 2 bad configuration.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pilotflow/errors.hpp"
#include "pilotflow/experiment.hpp"

namespace {

constexpr int kTrialFailure = 1;
constexpr int kConfigError = 2;

int run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out, bool parallel) {
  auto config = pilotflow::load_experiment_config(config_path);
  if (seed) config.seed = *seed;
  if (!out.empty()) config.output_dir = out;
  if (parallel) config.parallel_trials = true;

  const auto result = pilotflow::run_experiment(config);
  for (const auto& row : result.summary) {
    const auto& ttx = row.at("ttx_s");
    std::cout << fmt::format("{:>5} pipelines  {:>2} trial(s)  ttx mean {:.6g} s  [{:.6g}, {:.6g}]\n", row.pipelines,
                             row.trials, ttx.mean, ttx.min, ttx.max);
  }
  for (const auto& f : result.failures) std::cerr << fmt::format("trial {} failed: {}\n", f.trial_id, f.diagnostic);
  std::cout << fmt::format("results written to {}\n", result.output_dir.string());
  return result.ok() ? 0 : kTrialFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot-based ensemble workflow benchmark harness"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a weak-scaling experiment");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool parallel = false;
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override the base seed");
  run_cmd->add_option("--out", out, "Override the output directory");
  run_cmd->add_flag("--parallel", parallel, "Run simulated trials concurrently");

  auto* describe_cmd = app.add_subcommand("describe", "Print a protocol's execution plan");
  std::string protocol = "esmacs";
  int replicas = 1;
  describe_cmd->add_option("--protocol", protocol, "Built-in protocol name or protocol file")->required();
  describe_cmd->add_option("--replicas", replicas, "Number of replica pipelines")->required();

  auto* plot_cmd = app.add_subcommand("plot", "Regenerate summary and plot data from stored trials");
  std::string from;
  plot_cmd->add_option("--from", from, "Experiment output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) return run(config_path, seed, out, parallel);
    if (*describe_cmd) {
      std::cout << pilotflow::describe_protocol(protocol, replicas);
      return 0;
    }
    if (*plot_cmd) {
      const auto rows = pilotflow::replot(from);
      std::cout << fmt::format("{} summary row(s) written to {}\n", rows.size(), from);
      return 0;
    }
  } catch (const pilotflow::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const pilotflow::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTrialFailure;
  }
  return 0;
}
