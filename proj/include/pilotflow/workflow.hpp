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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pilotflow {

/// Seconds, on whatever clock the backend runs (simulated or monotonic wall).
using Seconds = double;

enum class TaskKind { kNullWorkload, kSimulated, kLocalExec };

enum class StagingMode { kCopyIn, kCopyOut, kTarIn, kTarOut };

std::string_view to_string(TaskKind kind);
std::string_view to_string(StagingMode mode);
TaskKind parse_task_kind(std::string_view text);
StagingMode parse_staging_mode(std::string_view text);

inline bool is_input(StagingMode mode) {
  return mode == StagingMode::kCopyIn || mode == StagingMode::kTarIn;
}

/// Declarative file movement attached to a task. Backends decide what it
/// costs: the local backend copies or (un)tars real files, the simulated one
/// charges filesystem latency.
struct StagingDirective {
  std::string source;
  std::string target;
  StagingMode mode = StagingMode::kCopyIn;

  bool operator==(const StagingDirective&) const = default;
};

struct TaskSpec {
  std::string id;
  TaskKind kind = TaskKind::kSimulated;
  std::string executable;
  std::vector<std::string> arguments;
  int cores = 1;
  Seconds expected_duration = 0.0;
  std::vector<StagingDirective> inputs;
  std::vector<StagingDirective> outputs;
  std::string stage_label;

  bool operator==(const TaskSpec&) const = default;
};

enum class StageState { kNew, kActive, kDone, kFailed };
enum class PipelineState { kNew, kActive, kDone, kFailed };

std::string_view to_string(StageState state);
std::string_view to_string(PipelineState state);

/// A set of mutually independent tasks. `index` is the position inside the
/// owning pipeline.
struct Stage {
  int index = 0;
  std::vector<TaskSpec> tasks;
  StageState state = StageState::kNew;

  int total_cores() const;
  bool operator==(const Stage&) const = default;
};

struct Pipeline {
  std::string id;
  std::vector<Stage> stages;
  PipelineState state = PipelineState::kNew;

  bool operator==(const Pipeline&) const = default;
};

struct Workflow {
  std::string name;
  std::vector<Pipeline> pipelines;

  std::size_t task_count() const;
  bool operator==(const Workflow&) const = default;
};

struct ResourceRequest {
  int cores = 1;
  Seconds walltime = 3600.0;
  std::string queue_name = "normal";
  std::string project;
};

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
};

/// Collects every invariant violation instead of stopping at the first one.
ValidationResult validate_workflow(const Workflow& workflow);

/// Cores needed so that no ready task ever waits: the sum over pipelines of
/// the widest stage of each pipeline. Throws ValidationError on an invalid
/// workflow.
int peak_core_demand(const Workflow& workflow);

/// Widest stage (in cores) of a single pipeline.
int widest_stage(const Pipeline& pipeline);

}  // namespace pilotflow
