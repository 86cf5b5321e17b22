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

#include "pilotflow/protocol.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

namespace {

constexpr std::string_view kEsmacsName = "esmacs";

struct EsmacsStage {
  std::string_view label;
  int cores;
  std::string_view executable;
  std::string_view argument;
  std::optional<std::int64_t> timesteps;
};

// Stage order follows the protocol: untar inputs, preprocess, minimize, three
// equilibrations, tar outputs. Stages 3-6 are the MD engine.
constexpr std::array<EsmacsStage, kEsmacsStageCount> kEsmacsStages{{
    {"untar-config", 1, "tar", "esmacs-config.tar", std::nullopt},
    {"preprep", 1, "esmacs-preprep", "params.conf", std::nullopt},
    {"minimize", 8, "namd2", "min.conf", std::nullopt},
    {"equilibrate-nvt", 8, "namd2", "eq0.conf", 5000},
    {"equilibrate-npt-restrained", 8, "namd2", "eq1.conf", 55000},
    {"equilibrate-npt", 8, "namd2", "eq2.conf", 5000},
    {"tar-output", 1, "tar", "output.tar", std::nullopt},
}};

// Staging templates, unexpanded.
std::vector<StagingDirective> esmacs_staging(std::size_t stage) {
  switch (stage) {
    case 0: return {{"esmacs-config.tar", "config", StagingMode::kTarIn}};
    case 1: return {{"esmacs-params.conf", "config/params.conf", StagingMode::kCopyIn}};
    case 6: return {{"config", "{pipeline}-output.tar", StagingMode::kTarOut}};
    default: return {};
  }
}

std::string substitute(std::string text, std::string_view name, std::string_view pipeline, int replica) {
  const std::array<std::pair<std::string_view, std::string>, 3> vars{{
      {"{name}", std::string(name)},
      {"{pipeline}", std::string(pipeline)},
      {"{replica}", std::to_string(replica)},
  }};
  for (const auto& [key, value] : vars) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
      text.replace(pos, key.size(), value);
  }
  return text;
}

std::string duration_argument(Seconds seconds) { return fmt::format("{}", seconds); }

void split_staging(const std::vector<StagingDirective>& staging, std::string_view name, std::string_view pipeline,
                   int replica, TaskSpec& task) {
  for (auto d : staging) {
    d.source = substitute(std::move(d.source), name, pipeline, replica);
    d.target = substitute(std::move(d.target), name, pipeline, replica);
    (is_input(d.mode) ? task.inputs : task.outputs).push_back(std::move(d));
  }
}

}  // namespace

EsmacsDurations esmacs_default_durations() { return {1.0, 1.0, 2.0, 5.0, 55.0, 5.0, 1.0}; }

std::array<int, kEsmacsStageCount> esmacs_core_profile() {
  std::array<int, kEsmacsStageCount> profile{};
  for (std::size_t i = 0; i < kEsmacsStageCount; ++i) profile[i] = kEsmacsStages[i].cores;
  return profile;
}

std::string protocol_task_id(std::string_view name, int replica, int stage) {
  return fmt::format("{}-p{}-s{}", name, replica, stage);
}

std::string protocol_pipeline_id(std::string_view name, int replica) { return fmt::format("{}-p{}", name, replica); }

Workflow generate_esmacs(int replicas, TaskKind kind, const EsmacsDurations& base_durations) {
  if (replicas < 1) throw std::invalid_argument(fmt::format("generate_esmacs: replicas must be >= 1, got {}", replicas));
  for (auto d : base_durations)
    if (!(d >= 0.0)) throw std::invalid_argument("generate_esmacs: stage durations must be nonnegative");

  Workflow workflow;
  workflow.name = std::string(kEsmacsName);
  workflow.pipelines.reserve(static_cast<std::size_t>(replicas));
  for (int r = 0; r < replicas; ++r) {
    Pipeline pipeline;
    pipeline.id = protocol_pipeline_id(kEsmacsName, r);
    for (std::size_t s = 0; s < kEsmacsStageCount; ++s) {
      const auto& info = kEsmacsStages[s];
      TaskSpec task;
      task.id = protocol_task_id(kEsmacsName, r, static_cast<int>(s));
      task.kind = kind;
      task.cores = info.cores;
      task.stage_label = std::string(info.label);
      switch (kind) {
        case TaskKind::kNullWorkload:
          task.executable = "sleep";
          task.arguments = {"0"};
          break;
        case TaskKind::kSimulated:
          task.executable = std::string(info.executable);
          task.arguments = {std::string(info.argument)};
          task.expected_duration = base_durations[s];
          split_staging(esmacs_staging(s), kEsmacsName, pipeline.id, r, task);
          break;
        case TaskKind::kLocalExec:
          task.executable = "sleep";
          task.arguments = {duration_argument(base_durations[s])};
          task.expected_duration = base_durations[s];
          split_staging(esmacs_staging(s), kEsmacsName, pipeline.id, r, task);
          break;
      }
      pipeline.stages.push_back(Stage{static_cast<int>(s), {std::move(task)}, StageState::kNew});
    }
    workflow.pipelines.push_back(std::move(pipeline));
  }
  return workflow;
}

ProtocolConfig esmacs_protocol_config(int replicas, TaskKind kind, const EsmacsDurations& base_durations) {
  ProtocolConfig config;
  config.name = std::string(kEsmacsName);
  config.replicas = replicas;
  for (std::size_t s = 0; s < kEsmacsStageCount; ++s) {
    const auto& info = kEsmacsStages[s];
    StageTemplate stage;
    stage.label = std::string(info.label);
    stage.kind = TaskKind::kSimulated;
    stage.cores = info.cores;
    stage.expected_duration = base_durations[s];
    stage.timesteps = info.timesteps;
    stage.staging = esmacs_staging(s);
    stage.executable = std::string(info.executable);
    stage.arguments = {std::string(info.argument)};
    if (kind == TaskKind::kLocalExec) {
      // No MD engine on the host: the simulation stands in as a sleep.
      stage.executable = "sleep";
      stage.arguments = {duration_argument(base_durations[s])};
    }
    config.stages.push_back(std::move(stage));
  }
  return kind == TaskKind::kSimulated ? config : with_workload(std::move(config), kind);
}

void ProtocolConfig::validate() const {
  std::vector<std::string> violations;
  if (name.empty()) violations.emplace_back("protocol name is empty");
  if (replicas < 1) violations.push_back(fmt::format("replicas {} < 1", replicas));
  if (stages.empty()) violations.emplace_back("protocol has no stages");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& stage = stages[s];
    if (stage.cores < 1) violations.push_back(fmt::format("stage {} ({}): cores {} < 1", s, stage.label, stage.cores));
    if (!(stage.expected_duration >= 0.0) || !std::isfinite(stage.expected_duration))
      violations.push_back(fmt::format("stage {} ({}): expected_duration must be nonnegative", s, stage.label));
    if (stage.timesteps && *stage.timesteps < 0)
      violations.push_back(fmt::format("stage {} ({}): timesteps must be nonnegative", s, stage.label));
    for (const auto& d : stage.staging)
      if (d.source.empty() || d.target.empty())
        violations.push_back(fmt::format("stage {} ({}): staging directive with empty source or target", s, stage.label));
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

Workflow expand_protocol(const ProtocolConfig& config) {
  config.validate();
  Workflow workflow;
  workflow.name = config.name;
  for (int r = 0; r < config.replicas; ++r) {
    Pipeline pipeline;
    pipeline.id = protocol_pipeline_id(config.name, r);
    for (std::size_t s = 0; s < config.stages.size(); ++s) {
      const auto& tpl = config.stages[s];
      TaskSpec task;
      task.id = protocol_task_id(config.name, r, static_cast<int>(s));
      task.kind = tpl.kind;
      task.executable = tpl.executable;
      task.arguments = tpl.arguments;
      task.cores = tpl.cores;
      task.expected_duration = tpl.expected_duration;
      task.stage_label = tpl.label;
      split_staging(tpl.staging, config.name, pipeline.id, r, task);
      pipeline.stages.push_back(Stage{static_cast<int>(s), {std::move(task)}, StageState::kNew});
    }
    workflow.pipelines.push_back(std::move(pipeline));
  }
  return workflow;
}

ProtocolConfig with_workload(ProtocolConfig config, TaskKind kind) {
  for (auto& stage : config.stages) {
    stage.kind = kind;
    switch (kind) {
      case TaskKind::kNullWorkload:
        stage.executable = "sleep";
        stage.arguments = {"0"};
        stage.expected_duration = 0.0;
        stage.staging.clear();
        break;
      case TaskKind::kLocalExec:
        if (stage.executable.empty()) {
          stage.executable = "sleep";
          stage.arguments = {duration_argument(stage.expected_duration)};
        }
        break;
      case TaskKind::kSimulated:
        break;
    }
  }
  return config;
}

Json to_json(const ProtocolConfig& config) {
  Json stages = Json::array();
  for (const auto& stage : config.stages) {
    Json staging = Json::array();
    for (const auto& d : stage.staging) staging.push_back(to_json(d));
    Json entry{{"label", stage.label},
               {"kind", to_string(stage.kind)},
               {"cores", stage.cores},
               {"expected_duration", stage.expected_duration},
               {"staging", std::move(staging)},
               {"executable", stage.executable},
               {"arguments", stage.arguments}};
    if (stage.timesteps) entry["timesteps"] = *stage.timesteps;
    stages.push_back(std::move(entry));
  }
  return Json{{"name", config.name}, {"replicas", config.replicas}, {"stages", std::move(stages)}};
}

ProtocolConfig protocol_from_json(const Json& json) {
  ProtocolConfig config;
  config.name = require_field<std::string>(json, "name", "protocol");
  config.replicas = require_field<int>(json, "replicas", "protocol");
  auto stages = require_field<Json>(json, "stages", "protocol");
  if (!stages.is_array()) throw_field_error("protocol", "stages", "expected an array");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::string where = fmt::format("protocol.stages[{}]", s);
    const auto& entry = stages[s];
    StageTemplate stage;
    stage.label = require_field<std::string>(entry, "label", where);
    stage.kind = parse_task_kind(optional_field<std::string>(entry, "kind", where, "SIMULATED"));
    stage.cores = require_field<int>(entry, "cores", where);
    stage.expected_duration = optional_field<double>(entry, "expected_duration", where, 0.0);
    if (entry.contains("timesteps") && !entry["timesteps"].is_null())
      stage.timesteps = require_field<std::int64_t>(entry, "timesteps", where);
    auto staging = optional_field<Json>(entry, "staging", where, Json::array());
    if (!staging.is_array()) throw_field_error(where, "staging", "expected an array");
    for (std::size_t i = 0; i < staging.size(); ++i)
      stage.staging.push_back(staging_from_json(staging[i], fmt::format("{}.staging[{}]", where, i)));
    stage.executable = optional_field<std::string>(entry, "executable", where, "");
    stage.arguments = optional_field<std::vector<std::string>>(entry, "arguments", where, {});
    config.stages.push_back(std::move(stage));
  }
  return config;
}

ProtocolConfig load_protocol_config(const std::filesystem::path& path) {
  auto config = protocol_from_json(read_json_file(path));
  config.validate();
  return config;
}

Workflow load_protocol(const std::filesystem::path& path) { return expand_protocol(load_protocol_config(path)); }

}  // namespace pilotflow
