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

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pilotflow/profile.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

// NEW -> TRANSLATED -> SCHEDULED -> STAGING_IN -> EXECUTING -> STAGING_OUT -> DONE
// FAILED and CANCELED are reachable from every non-terminal state.
enum class TaskState { kNew, kTranslated, kScheduled, kStagingIn, kExecuting, kStagingOut, kDone, kFailed, kCanceled };

enum class LifecycleEvent { kTranslated, kScheduled, kStagingStarted, kExecStarted, kCompleted, kStagedOut, kFailed, kCanceled };

std::string_view to_string(TaskState state);
std::string_view to_string(LifecycleEvent event);

bool is_terminal(TaskState state);

/// Transition table lookup; nullopt when `event` is illegal in `state`.
std::optional<TaskState> next_state(TaskState state, LifecycleEvent event);

/// Profile event recorded for a transition triggered by `event`.
EventName transition_event_name(LifecycleEvent event);

struct TaskRecord {
  std::string task_id;
  std::string unit_id;
  int pipeline = -1;
  int stage = -1;
  TaskState state = TaskState::kNew;
  std::string diagnostic;

  bool operator==(const TaskRecord&) const = default;
};

/// Applies `event` to `record` and emits the matching ProfileEvent at `now`.
/// Throws StateMachineError (and emits nothing) on an illegal transition.
TaskRecord advance_task_state(const TaskRecord& record, LifecycleEvent event, Seconds now, ProfileSink& sink);

/// Stage state implied by the states of its tasks.
StageState derive_stage_state(std::span<const TaskState> tasks);

/// Pipeline state implied by the states of its stages.
PipelineState derive_pipeline_state(std::span<const StageState> stages);

/// NEW -> ACTIVE -> DONE | FAILED; anything else throws StateMachineError.
StageState advance_stage_state(StageState from, StageState to);
PipelineState advance_pipeline_state(PipelineState from, PipelineState to);

}  // namespace pilotflow
