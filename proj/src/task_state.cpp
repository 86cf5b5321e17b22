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

#include "pilotflow/task_state.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

std::string_view to_string(TaskState state) {
  switch (state) {
    case TaskState::kNew: return "NEW";
    case TaskState::kTranslated: return "TRANSLATED";
    case TaskState::kScheduled: return "SCHEDULED";
    case TaskState::kStagingIn: return "STAGING_IN";
    case TaskState::kExecuting: return "EXECUTING";
    case TaskState::kStagingOut: return "STAGING_OUT";
    case TaskState::kDone: return "DONE";
    case TaskState::kFailed: return "FAILED";
    case TaskState::kCanceled: return "CANCELED";
  }
  return "?";
}

std::string_view to_string(LifecycleEvent event) {
  switch (event) {
    case LifecycleEvent::kTranslated: return "translated";
    case LifecycleEvent::kScheduled: return "scheduled";
    case LifecycleEvent::kStagingStarted: return "staging_started";
    case LifecycleEvent::kExecStarted: return "exec_started";
    case LifecycleEvent::kCompleted: return "completed";
    case LifecycleEvent::kStagedOut: return "staged_out";
    case LifecycleEvent::kFailed: return "failed";
    case LifecycleEvent::kCanceled: return "canceled";
  }
  return "?";
}

bool is_terminal(TaskState state) {
  return state == TaskState::kDone || state == TaskState::kFailed || state == TaskState::kCanceled;
}

std::optional<TaskState> next_state(TaskState state, LifecycleEvent event) {
  if (is_terminal(state)) return std::nullopt;
  switch (event) {
    case LifecycleEvent::kFailed: return TaskState::kFailed;
    case LifecycleEvent::kCanceled: return TaskState::kCanceled;
    case LifecycleEvent::kTranslated:
      if (state == TaskState::kNew) return TaskState::kTranslated;
      break;
    case LifecycleEvent::kScheduled:
      if (state == TaskState::kTranslated) return TaskState::kScheduled;
      break;
    case LifecycleEvent::kStagingStarted:
      if (state == TaskState::kScheduled) return TaskState::kStagingIn;
      break;
    case LifecycleEvent::kExecStarted:
      if (state == TaskState::kStagingIn) return TaskState::kExecuting;
      break;
    case LifecycleEvent::kCompleted:
      if (state == TaskState::kExecuting) return TaskState::kStagingOut;
      break;
    case LifecycleEvent::kStagedOut:
      if (state == TaskState::kStagingOut) return TaskState::kDone;
      break;
  }
  return std::nullopt;
}

EventName transition_event_name(LifecycleEvent event) {
  switch (event) {
    case LifecycleEvent::kTranslated: return EventName::kTranslateEnd;
    case LifecycleEvent::kScheduled: return EventName::kSchedule;
    case LifecycleEvent::kStagingStarted: return EventName::kStageInBegin;
    case LifecycleEvent::kExecStarted: return EventName::kExecBegin;
    case LifecycleEvent::kCompleted: return EventName::kExecEnd;
    case LifecycleEvent::kStagedOut: return EventName::kDone;
    case LifecycleEvent::kFailed: return EventName::kFailed;
    case LifecycleEvent::kCanceled: return EventName::kCanceled;
  }
  return EventName::kFailed;
}

TaskRecord advance_task_state(const TaskRecord& record, LifecycleEvent event, Seconds now, ProfileSink& sink) {
  auto next = next_state(record.state, event);
  if (!next) {
    if (is_terminal(record.state))
      throw StateMachineError(fmt::format("task {}: illegal transition from terminal state {} on event {}",
                                          record.task_id, to_string(record.state), to_string(event)));
    throw StateMachineError(fmt::format("task {}: illegal transition from state {} on event {}", record.task_id,
                                        to_string(record.state), to_string(event)));
  }
  TaskRecord updated = record;
  updated.state = *next;
  sink.emit(now, record.task_id, transition_event_name(event), record.pipeline, record.stage);
  return updated;
}

StageState derive_stage_state(std::span<const TaskState> tasks) {
  if (tasks.empty()) return StageState::kNew;
  const auto is = [&](auto pred) { return std::all_of(tasks.begin(), tasks.end(), pred); };
  if (std::any_of(tasks.begin(), tasks.end(),
                  [](TaskState s) { return s == TaskState::kFailed || s == TaskState::kCanceled; }))
    return StageState::kFailed;
  if (is([](TaskState s) { return s == TaskState::kDone; })) return StageState::kDone;
  if (is([](TaskState s) { return s == TaskState::kNew; })) return StageState::kNew;
  return StageState::kActive;
}

PipelineState derive_pipeline_state(std::span<const StageState> stages) {
  if (stages.empty()) return PipelineState::kNew;
  if (std::any_of(stages.begin(), stages.end(), [](StageState s) { return s == StageState::kFailed; }))
    return PipelineState::kFailed;
  if (std::all_of(stages.begin(), stages.end(), [](StageState s) { return s == StageState::kDone; }))
    return PipelineState::kDone;
  if (std::all_of(stages.begin(), stages.end(), [](StageState s) { return s == StageState::kNew; }))
    return PipelineState::kNew;
  return PipelineState::kActive;
}

namespace {

template <typename State>
bool legal_group_transition(State from, State to) {
  if (from == State::kNew) return to == State::kActive;
  if (from == State::kActive) return to == State::kDone || to == State::kFailed;
  return false;
}

}  // namespace

StageState advance_stage_state(StageState from, StageState to) {
  if (!legal_group_transition(from, to))
    throw StateMachineError(fmt::format("stage: illegal transition {} -> {}", to_string(from), to_string(to)));
  return to;
}

PipelineState advance_pipeline_state(PipelineState from, PipelineState to) {
  if (!legal_group_transition(from, to))
    throw StateMachineError(fmt::format("pipeline: illegal transition {} -> {}", to_string(from), to_string(to)));
  return to;
}

}  // namespace pilotflow
