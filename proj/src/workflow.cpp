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

#include "pilotflow/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kNullWorkload: return "NULL_WORKLOAD";
    case TaskKind::kSimulated: return "SIMULATED";
    case TaskKind::kLocalExec: return "LOCAL_EXEC";
  }
  return "?";
}

std::string_view to_string(StagingMode mode) {
  switch (mode) {
    case StagingMode::kCopyIn: return "COPY_IN";
    case StagingMode::kCopyOut: return "COPY_OUT";
    case StagingMode::kTarIn: return "TAR_IN";
    case StagingMode::kTarOut: return "TAR_OUT";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "NULL_WORKLOAD") return TaskKind::kNullWorkload;
  if (text == "SIMULATED") return TaskKind::kSimulated;
  if (text == "LOCAL_EXEC") return TaskKind::kLocalExec;
  throw ConfigError(fmt::format("unknown task kind '{}' (expected NULL_WORKLOAD, SIMULATED or LOCAL_EXEC)", text));
}

StagingMode parse_staging_mode(std::string_view text) {
  if (text == "COPY_IN") return StagingMode::kCopyIn;
  if (text == "COPY_OUT") return StagingMode::kCopyOut;
  if (text == "TAR_IN") return StagingMode::kTarIn;
  if (text == "TAR_OUT") return StagingMode::kTarOut;
  throw ConfigError(fmt::format("unknown staging mode '{}' (expected COPY_IN, COPY_OUT, TAR_IN or TAR_OUT)", text));
}

std::string_view to_string(StageState state) {
  switch (state) {
    case StageState::kNew: return "NEW";
    case StageState::kActive: return "ACTIVE";
    case StageState::kDone: return "DONE";
    case StageState::kFailed: return "FAILED";
  }
  return "?";
}

std::string_view to_string(PipelineState state) {
  switch (state) {
    case PipelineState::kNew: return "NEW";
    case PipelineState::kActive: return "ACTIVE";
    case PipelineState::kDone: return "DONE";
    case PipelineState::kFailed: return "FAILED";
  }
  return "?";
}

int Stage::total_cores() const {
  int sum = 0;
  for (const auto& task : tasks) sum += task.cores;
  return sum;
}

std::size_t Workflow::task_count() const {
  std::size_t n = 0;
  for (const auto& pipeline : pipelines)
    for (const auto& stage : pipeline.stages) n += stage.tasks.size();
  return n;
}

namespace {

void check_directives(const TaskSpec& task, const std::vector<StagingDirective>& directives,
                      bool inputs, std::vector<std::string>& out) {
  for (std::size_t i = 0; i < directives.size(); ++i) {
    const auto& d = directives[i];
    if (d.source.empty() || d.target.empty())
      out.push_back(fmt::format("task {}: staging directive {} has an empty source or target", task.id, i));
    if (is_input(d.mode) != inputs)
      out.push_back(fmt::format("task {}: {} directive listed under {}", task.id, to_string(d.mode),
                                inputs ? "inputs" : "outputs"));
  }
}

}  // namespace

ValidationResult validate_workflow(const Workflow& workflow) {
  ValidationResult result;
  auto& out = result.violations;
  if (workflow.pipelines.empty()) out.emplace_back("workflow has no pipelines");

  std::set<std::string> pipeline_ids;
  std::set<std::string> task_ids;
  for (std::size_t p = 0; p < workflow.pipelines.size(); ++p) {
    const auto& pipeline = workflow.pipelines[p];
    const std::string pname = pipeline.id.empty() ? fmt::format("#{}", p) : pipeline.id;
    if (pipeline.id.empty()) out.push_back(fmt::format("pipeline {} has an empty id", pname));
    else if (!pipeline_ids.insert(pipeline.id).second)
      out.push_back(fmt::format("duplicate pipeline id {}", pipeline.id));
    if (pipeline.stages.empty()) out.push_back(fmt::format("pipeline {} has no stages", pname));

    for (std::size_t s = 0; s < pipeline.stages.size(); ++s) {
      const auto& stage = pipeline.stages[s];
      if (stage.index != static_cast<int>(s))
        out.push_back(fmt::format("pipeline {}: stage at position {} has index {}", pname, s, stage.index));
      if (stage.tasks.empty()) out.push_back(fmt::format("empty stage: pipeline {} stage {}", pname, s));
      for (const auto& task : stage.tasks) {
        if (task.id.empty()) out.push_back(fmt::format("pipeline {} stage {}: task with empty id", pname, s));
        else if (!task_ids.insert(task.id).second) out.push_back(fmt::format("duplicate task id {}", task.id));
        if (task.cores < 1) out.push_back(fmt::format("task {}: cores {} < 1", task.id, task.cores));
        if (!(task.expected_duration >= 0.0) || !std::isfinite(task.expected_duration))
          out.push_back(fmt::format("task {}: expected_duration {} is not a nonnegative number", task.id,
                                    task.expected_duration));
        check_directives(task, task.inputs, true, out);
        check_directives(task, task.outputs, false, out);
      }
    }
  }
  return result;
}

int widest_stage(const Pipeline& pipeline) {
  int widest = 0;
  for (const auto& stage : pipeline.stages) widest = std::max(widest, stage.total_cores());
  return widest;
}

int peak_core_demand(const Workflow& workflow) {
  if (auto result = validate_workflow(workflow); !result) throw ValidationError(std::move(result.violations));
  int total = 0;
  for (const auto& pipeline : workflow.pipelines) total += widest_stage(pipeline);
  return total;
}

}  // namespace pilotflow
