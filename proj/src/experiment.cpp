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

#include "pilotflow/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include <fmt/format.h>

#include "pilotflow/engine.hpp"
#include "pilotflow/errors.hpp"
#include "pilotflow/local_backend.hpp"
#include "pilotflow/sim_backend.hpp"

namespace pilotflow {

namespace fs = std::filesystem;

namespace {

constexpr Seconds kMinWalltime = 60.0;

fs::path resolve_path(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

std::string backend_type(const Json& backend) {
  if (!backend.is_object()) throw ConfigError("backend: expected an object");
  return optional_field<std::string>(backend, "type", "backend", "sim");
}

struct Trial {
  int pipelines = 0;
  int trial = 0;
  std::size_t sweep_index = 0;
  std::string id;
};

struct TrialResult {
  std::optional<RunReport> report;
  std::optional<TrialFailure> failure;
  EventLog events;
};

}  // namespace

std::string_view to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kNull: return "NULL";
    case WorkloadKind::kSim: return "SIM";
    case WorkloadKind::kLocal: return "LOCAL";
  }
  return "?";
}

WorkloadKind parse_workload(std::string_view text) {
  if (text == "NULL") return WorkloadKind::kNull;
  if (text == "SIM") return WorkloadKind::kSim;
  if (text == "LOCAL") return WorkloadKind::kLocal;
  throw ConfigError(fmt::format("workload: expected NULL, SIM or LOCAL, got '{}'", text));
}

TaskKind task_kind(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kNull: return TaskKind::kNullWorkload;
    case WorkloadKind::kSim: return TaskKind::kSimulated;
    case WorkloadKind::kLocal: return TaskKind::kLocalExec;
  }
  return TaskKind::kSimulated;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (protocol.empty()) problems.emplace_back("protocol is empty");
  if (pipeline_counts.empty()) problems.emplace_back("pipeline_counts is empty");
  for (int n : pipeline_counts)
    if (n < 1) problems.push_back(fmt::format("pipeline count {} < 1", n));
  if (trials < 1) problems.push_back(fmt::format("trials {} < 1", trials));
  if (max_bulk < 1) problems.emplace_back("max_bulk must be positive");
  if (!cores_rule.peak_demand) {
    if (cores_rule.explicit_cores.size() != pipeline_counts.size())
      problems.push_back(fmt::format("cores_rule.explicit has {} entries for {} pipeline counts",
                                     cores_rule.explicit_cores.size(), pipeline_counts.size()));
    for (int c : cores_rule.explicit_cores)
      if (c < 1) problems.push_back(fmt::format("explicit core count {} < 1", c));
  }
  if (walltime && !(*walltime > 0.0)) problems.emplace_back("walltime must be > 0");
  try {
    const auto type = backend_type(backend);
    if (type == "sim") sim_config_from_json(backend);
    else if (type == "local") local_config_from_json(backend);
    else problems.push_back(fmt::format("backend.type '{}' is not sim or local", type));
  } catch (const ConfigError& e) {
    problems.emplace_back(e.what());
  }
  if (!problems.empty()) throw ConfigError(fmt::format("invalid experiment config: {}", fmt::join(problems, "; ")));
}

ExperimentConfig experiment_from_json(const Json& json, const fs::path& base_dir) {
  constexpr std::string_view where = "experiment";
  if (!json.is_object()) throw ConfigError("experiment: expected a JSON object");
  ExperimentConfig config;
  config.base_dir = base_dir;
  config.protocol = optional_field<std::string>(json, "protocol", where, config.protocol);
  config.workload = parse_workload(optional_field<std::string>(json, "workload", where, "SIM"));
  config.pipeline_counts = optional_field<std::vector<int>>(json, "pipeline_counts", where, config.pipeline_counts);
  config.trials = optional_field<int>(json, "trials", where, config.trials);

  if (auto it = json.find("cores_rule"); it != json.end() && !it->is_null()) {
    if (it->is_string()) {
      if (*it != "PEAK_DEMAND")
        throw ConfigError(fmt::format("experiment.cores_rule: expected PEAK_DEMAND or {{\"explicit\": [...]}}, got {}",
                                      it->dump()));
    } else {
      config.cores_rule.peak_demand = false;
      config.cores_rule.explicit_cores = require_field<std::vector<int>>(*it, "explicit", "experiment.cores_rule");
    }
  }

  if (auto it = json.find("backend"); it != json.end() && !it->is_null()) {
    if (it->is_string()) config.backend = read_json_file(resolve_path(base_dir, it->get<std::string>()));
    else config.backend = *it;
  }
  config.seed = optional_field<std::uint64_t>(json, "seed", where, 0);
  config.output_dir = optional_field<std::string>(json, "output_dir", where, config.output_dir.string());
  config.max_bulk = optional_field<std::size_t>(json, "max_bulk", where, config.max_bulk);
  config.parallel_trials = optional_field<bool>(json, "parallel_trials", where, false);
  config.write_event_logs = optional_field<bool>(json, "write_event_logs", where, false);
  if (json.contains("walltime") && !json["walltime"].is_null())
    config.walltime = require_field<double>(json, "walltime", where);
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  return experiment_from_json(read_json_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

Json to_json(const ExperimentConfig& config) {
  Json cores_rule = config.cores_rule.peak_demand ? Json("PEAK_DEMAND") : Json{{"explicit", config.cores_rule.explicit_cores}};
  Json json{{"protocol", config.protocol},
            {"workload", to_string(config.workload)},
            {"pipeline_counts", config.pipeline_counts},
            {"trials", config.trials},
            {"cores_rule", cores_rule},
            {"backend", config.backend},
            {"seed", config.seed},
            {"output_dir", config.output_dir.string()},
            {"max_bulk", config.max_bulk},
            {"parallel_trials", config.parallel_trials},
            {"write_event_logs", config.write_event_logs}};
  if (config.walltime) json["walltime"] = *config.walltime;
  return json;
}

std::string config_digest(const ExperimentConfig& config) {
  auto json = to_json(config);
  json.erase("output_dir");
  return fmt::format("{:016x}", fnv1a64(json.dump()));
}

std::vector<std::string> available_protocols() { return {"esmacs"}; }

ProtocolConfig resolve_protocol(const std::string& protocol, int replicas, WorkloadKind workload,
                                const fs::path& base_dir) {
  if (replicas < 1) throw ConfigError(fmt::format("replicas {} < 1", replicas));
  if (protocol == "esmacs") return esmacs_protocol_config(replicas, task_kind(workload));
  const auto path = resolve_path(base_dir, protocol);
  const bool looks_like_path = protocol.find('/') != std::string::npos || fs::path(protocol).extension() == ".json";
  if (!looks_like_path || !fs::exists(path))
    throw UnknownProtocolError(
        fmt::format("unknown protocol '{}'; available protocols: {}", protocol, fmt::join(available_protocols(), ", ")));
  auto config = load_protocol_config(path);
  config.replicas = replicas;
  return with_workload(std::move(config), task_kind(workload));
}

std::unique_ptr<Backend> make_backend(const Json& backend, std::uint64_t seed) {
  const auto type = backend_type(backend);
  if (type == "sim") {
    auto config = sim_config_from_json(backend);
    config.seed = seed;
    return std::make_unique<SimBackend>(std::move(config));
  }
  if (type == "local") {
    auto config = local_config_from_json(backend);
    config.seed = seed;
    return std::make_unique<LocalBackend>(std::move(config));
  }
  throw ConfigError(fmt::format("backend.type '{}' is not sim or local", type));
}

Seconds estimate_makespan(const Workflow& workflow, const Json& backend) {
  double pull = 0.0;
  double fs_charge = 0.0;
  double translate = 0.0;
  double noise = 1.0;
  double fs_scale = 1.0;
  if (backend_type(backend) == "sim") {
    const auto config = sim_config_from_json(backend);
    pull = config.pull_latency.expected();
    fs_charge = config.fs_latency.expected();
    translate = config.translate_cost.expected();
    noise = config.duration_noise.expected();
    if (config.fs_latency_per_pipeline) fs_scale = static_cast<double>(workflow.pipelines.size());
  } else {
    pull = local_config_from_json(backend).pull_latency.expected();
  }
  Seconds makespan = 0.0;
  for (const auto& pipeline : workflow.pipelines) {
    Seconds total = 0.0;
    for (const auto& stage : pipeline.stages) {
      Seconds longest = 0.0;
      for (const auto& task : stage.tasks) {
        const auto directives = static_cast<double>(task.inputs.size() + task.outputs.size());
        longest = std::max(longest, task.expected_duration * noise + fs_charge * (1.0 + directives * fs_scale));
      }
      // Translation of a stage can queue behind every other pipeline's.
      total += longest + pull + translate * static_cast<double>(workflow.task_count());
    }
    makespan = std::max(makespan, total);
  }
  return makespan;
}

std::string describe_protocol(const std::string& protocol, int replicas, const fs::path& base_dir) {
  const auto config = resolve_protocol(protocol, replicas, WorkloadKind::kSim, base_dir);
  const auto workflow = expand_protocol(config);
  std::size_t stages = 0;
  for (const auto& p : workflow.pipelines) stages = std::max(stages, p.stages.size());
  std::ostringstream out;
  out << fmt::format("{} pipelines × {} stages, {} tasks, peak {} cores\n", workflow.pipelines.size(), stages,
                     workflow.task_count(), peak_core_demand(workflow));
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    const auto& st = config.stages[s];
    out << fmt::format("  stage {}: {:<28} {:>3} core(s)  {:>8} s  {} staging\n", s + 1, st.label, st.cores,
                       st.expected_duration, st.staging.size());
  }
  return out.str();
}

void write_esmacs_inputs(const fs::path& dir) {
  const auto staging = dir / "esmacs-config-src";
  fs::create_directories(staging);
  write_text_file(staging / "system.pdb", "REMARK synthetic structure\nEND\n");
  write_text_file(staging / "system.prmtop", "%VERSION synthetic topology\n");
  write_text_file(staging / "min.conf", "minimize 1000\n");
  if (run_command({"tar", "-cf", fs::absolute(dir / "esmacs-config.tar").string(), "-C",
                   fs::absolute(staging).string(), "."},
                  dir) != 0)
    throw Error(fmt::format("could not create {}", (dir / "esmacs-config.tar").string()));
  write_text_file(dir / "esmacs-params.conf", "temperature 300\ntimestep 2.0\n");
}

namespace {

TrialResult run_trial(const ExperimentConfig& config, const Trial& trial, const std::string& digest,
                      const Json& backend_json) {
  TrialResult result;
  try {
    const auto protocol = resolve_protocol(config.protocol, trial.pipelines, config.workload, config.base_dir);
    const auto workflow = expand_protocol(protocol);
    ResourceRequest request;
    request.cores = config.cores_rule.peak_demand ? peak_core_demand(workflow)
                                                   : config.cores_rule.explicit_cores.at(trial.sweep_index);
    request.walltime =
        config.walltime ? *config.walltime : std::max(kMinWalltime, 2.0 * estimate_makespan(workflow, backend_json));

    Json trial_backend = backend_json;
    if (backend_type(trial_backend) == "local") {
      const auto out = fs::absolute(config.output_dir);
      if (!trial_backend.contains("workdir")) trial_backend["workdir"] = (out / "work" / trial.id).string();
      if (!trial_backend.contains("output_root")) trial_backend["output_root"] = (out / "outputs" / trial.id).string();
    }
    auto backend = make_backend(trial_backend, config.seed + static_cast<std::uint64_t>(trial.trial));

    ProfileSink sink;
    RunOptions options;
    options.max_bulk = config.max_bulk;
    options.trial_id = trial.id;
    options.workload = std::string(to_string(config.workload));
    options.config_digest = digest;
    try {
      auto report = run_workflow(workflow, request, *backend, sink, options);
      if (!report.succeeded()) {
        result.failure = TrialFailure{trial.id, trial.pipelines, trial.trial,
                                      fmt::format("{} of {} tasks did not finish: {}", report.task_count - report.done,
                                                  report.task_count, fmt::join(report.failures, "; "))};
      }
      result.report = std::move(report);
    } catch (...) {
      result.events = sink.events();
      throw;
    }
    result.events = sink.events();
  } catch (const std::exception& e) {
    result.failure = TrialFailure{trial.id, trial.pipelines, trial.trial, e.what()};
  }
  return result;
}

Json failures_json(const std::vector<TrialFailure>& failures) {
  Json out = Json::array();
  for (const auto& f : failures)
    out.push_back({{"trial_id", f.trial_id}, {"pipelines", f.pipelines}, {"trial", f.trial}, {"diagnostic", f.diagnostic}});
  return out;
}

void write_summaries(const fs::path& dir, const std::vector<SummaryRow>& rows, const Json& failures) {
  std::ostringstream csv;
  write_summary_csv(csv, rows);
  write_text_file(dir / "summary.csv", csv.str());
  Json groups = Json::array();
  for (const auto& row : rows) groups.push_back(to_json(row));
  write_text_file(dir / "summary.json", Json{{"groups", groups}, {"failures", failures}}.dump(2) + "\n");
  std::ostringstream plot;
  write_plot_data(plot, rows);
  write_text_file(dir / "plot.dat", plot.str());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto digest = config_digest(config);
  const auto out = config.output_dir;
  fs::create_directories(out);
  write_text_file(out / "config.json", to_json(config).dump(2) + "\n");

  Json backend_json = config.backend;
  const bool local = backend_type(backend_json) == "local";
  if (local) {
    if (backend_json.contains("input_root")) {
      backend_json["input_root"] = resolve_path(config.base_dir, backend_json["input_root"].get<std::string>()).string();
    } else if (config.workload == WorkloadKind::kLocal && config.protocol == "esmacs") {
      write_esmacs_inputs(out / "inputs");
      backend_json["input_root"] = fs::absolute(out / "inputs").string();
    }
  }

  const auto stage_count =
      resolve_protocol(config.protocol, 1, config.workload, config.base_dir).stages.size();

  std::vector<Trial> trials;
  for (std::size_t i = 0; i < config.pipeline_counts.size(); ++i)
    for (int t = 0; t < config.trials; ++t)
      trials.push_back(Trial{config.pipeline_counts[i], t, i, fmt::format("p{}-t{}", config.pipeline_counts[i], t)});

  std::vector<TrialResult> results(trials.size());
  if (config.parallel_trials && !local) {
    std::vector<std::future<TrialResult>> futures;
    for (const auto& trial : trials)
      futures.push_back(std::async(std::launch::async, [&, trial] { return run_trial(config, trial, digest, backend_json); }));
    for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < trials.size(); ++i) results[i] = run_trial(config, trials[i], digest, backend_json);
  }

  ExperimentResult result;
  result.output_dir = out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (r.report) result.reports.push_back(*r.report);
    if (r.failure) result.failures.push_back(*r.failure);
    if (config.write_event_logs && !r.events.empty()) {
      std::ostringstream log;
      write_event_log_csv(log, r.events);
      write_text_file(out / "events" / (trials[i].id + ".csv"), log.str());
    }
  }

  std::ostringstream csv;
  write_trials_csv(csv, result.reports, static_cast<int>(stage_count));
  write_text_file(out / "trials.csv", csv.str());
  Json reports = Json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  write_text_file(out / "reports.json", reports.dump(2) + "\n");

  if (!result.reports.empty()) result.summary = aggregate_trials(result.reports);
  write_summaries(out, result.summary, failures_json(result.failures));
  return result;
}

std::vector<SummaryRow> replot(const fs::path& dir) {
  const auto config = read_json_file(dir / "config.json");
  const auto workload = std::string(to_string(parse_workload(optional_field<std::string>(config, "workload", "config", "SIM"))));
  std::ifstream in(dir / "trials.csv");
  if (!in) throw ConfigError(fmt::format("cannot open {}", (dir / "trials.csv").string()));
  const auto reports = read_trials_csv(in, workload);
  if (reports.empty()) throw ConfigError(fmt::format("{} has no trial rows", (dir / "trials.csv").string()));
  Json failures = Json::array();
  if (fs::exists(dir / "summary.json")) {
    const auto previous = read_json_file(dir / "summary.json");
    if (previous.contains("failures")) failures = previous["failures"];
  }
  auto rows = aggregate_trials(reports);
  write_summaries(dir, rows, failures);
  return rows;
}

}  // namespace pilotflow
