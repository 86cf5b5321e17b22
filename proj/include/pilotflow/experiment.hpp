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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pilotflow/backend.hpp"
#include "pilotflow/json_io.hpp"
#include "pilotflow/metrics.hpp"
#include "pilotflow/protocol.hpp"

namespace pilotflow {

enum class WorkloadKind { kNull, kSim, kLocal };

std::string_view to_string(WorkloadKind kind);
/// "NULL", "SIM" or "LOCAL"; anything else throws ConfigError.
WorkloadKind parse_workload(std::string_view text);
TaskKind task_kind(WorkloadKind kind);

/// Pilot sizing across a sweep: PEAK_DEMAND requests the workflow's peak core
/// demand; otherwise `explicit_cores[i]` is used for `pipeline_counts[i]`.
struct CoresRule {
  bool peak_demand = true;
  std::vector<int> explicit_cores;
};

struct ExperimentConfig {
  /// Built-in protocol name or path to a protocol JSON file.
  std::string protocol = "esmacs";
  WorkloadKind workload = WorkloadKind::kSim;
  std::vector<int> pipeline_counts = {2, 4, 8, 16};
  int trials = 2;
  CoresRule cores_rule;
  /// Inline backend config ({"type": "sim" | "local", ...}).
  Json backend = Json{{"type", "sim"}};
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "bench-out";
  std::size_t max_bulk = 1024;
  /// Run simulated trials concurrently; ignored for the local backend.
  bool parallel_trials = false;
  bool write_event_logs = false;
  /// Pilot walltime; default is twice the makespan estimate, at least 60 s.
  std::optional<Seconds> walltime;
  /// Relative protocol/backend paths resolve against this directory.
  std::filesystem::path base_dir = ".";

  /// Throws ConfigError listing what is wrong.
  void validate() const;
};

/// Parses an experiment document. `backend` may be an inline object or a path
/// to a backend JSON file.
ExperimentConfig experiment_from_json(const Json& json, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
Json to_json(const ExperimentConfig& config);
/// Hex FNV-1a of the canonical config JSON without output_dir and base_dir.
std::string config_digest(const ExperimentConfig& config);

std::vector<std::string> available_protocols();

/// Resolves a built-in name or a protocol file and sets `replicas`. Throws
/// UnknownProtocolError naming the built-in protocols.
ProtocolConfig resolve_protocol(const std::string& protocol, int replicas, WorkloadKind workload,
                                const std::filesystem::path& base_dir = ".");

/// Builds a backend from its JSON config; `seed` replaces the config's seed.
std::unique_ptr<Backend> make_backend(const Json& backend, std::uint64_t seed);

/// Analytical makespan after activation: per pipeline, the sum over stages of
/// the longest task plus the backend's mean pull, translation and filesystem
/// charges, maximized over pipelines.
Seconds estimate_makespan(const Workflow& workflow, const Json& backend);

/// First line: "N pipelines × S stages, T tasks, peak C cores", then one line
/// per stage.
std::string describe_protocol(const std::string& protocol, int replicas, const std::filesystem::path& base_dir = ".");

struct TrialFailure {
  std::string trial_id;
  int pipelines = 0;
  int trial = 0;
  std::string diagnostic;
};

struct ExperimentResult {
  std::vector<RunReport> reports;
  std::vector<TrialFailure> failures;
  std::vector<SummaryRow> summary;
  std::filesystem::path output_dir;

  bool ok() const { return failures.empty(); }
};

/// Runs every (pipeline count, trial) pair and writes into output_dir:
/// config.json, trials.csv, reports.json, summary.csv, summary.json,
/// plot.dat and, when enabled, events/<trial_id>.csv. Trial t of a sweep point
/// uses seed + t. Trials that throw are listed as failures and have no CSV row;
/// trials that finish with failed tasks have both.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Rebuilds summary.csv, summary.json and plot.dat from the trials.csv and
/// config.json in `dir`.
std::vector<SummaryRow> replot(const std::filesystem::path& dir);

/// Creates the input files the ESMACS staging directives refer to
/// (esmacs-config.tar, esmacs-params.conf) in `dir`.
void write_esmacs_inputs(const std::filesystem::path& dir);

}  // namespace pilotflow
