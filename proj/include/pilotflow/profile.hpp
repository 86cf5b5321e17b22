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
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// Event vocabulary shared by the engine, the backends and the profiler.
///
///   pilot entity:  submit, pilot_active, pilot_done, pilot_failed
///   wfm entity:    enqueue_begin/end    (bulk insert into the task store)
///   agent entity:  pull_begin/end, schedule_begin/end
///   task entity:   translate_begin/end, schedule, unit_io_begin/end,
///                  stage_in_begin/end, exec_begin/end, stage_out_begin/end,
///                  done, failed, canceled
enum class EventName : std::uint8_t {
  kSubmit,
  kPilotActive,
  kPilotDone,
  kPilotFailed,
  kTranslateBegin,
  kTranslateEnd,
  kEnqueueBegin,
  kEnqueueEnd,
  kPullBegin,
  kPullEnd,
  kScheduleBegin,
  kScheduleEnd,
  kSchedule,
  kUnitIoBegin,
  kUnitIoEnd,
  kStageInBegin,
  kStageInEnd,
  kExecBegin,
  kExecEnd,
  kStageOutBegin,
  kStageOutEnd,
  kDone,
  kFailed,
  kCanceled,
};

std::string_view to_string(EventName name);
std::optional<EventName> parse_event_name(std::string_view text);

/// Task terminal events: done, failed, canceled.
bool is_task_terminal(EventName name);

inline constexpr std::string_view kWorkflowManagerEntity = "wfm";
inline constexpr std::string_view kAgentEntity = "agent";

struct ProfileEvent {
  Seconds time = 0.0;
  std::string entity;
  EventName name = EventName::kSubmit;
  /// Set on task events only.
  int pipeline = -1;
  int stage = -1;

  bool operator==(const ProfileEvent&) const = default;
};

using EventLog = std::vector<ProfileEvent>;

/// Append-only collector. Safe for concurrent producers; `events()` returns
/// the log ordered by time, ties broken by arrival order.
class ProfileSink {
 public:
  void emit(ProfileEvent event);
  void emit(Seconds time, std::string_view entity, EventName name, int pipeline = -1, int stage = -1);

  EventLog events() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<ProfileEvent> events_;
};

/// CSV with header `time_s,entity,event`. Times are written in shortest
/// round-trip form so the file is byte-stable for a deterministic run.
void write_event_log_csv(std::ostream& out, std::span<const ProfileEvent> events);
EventLog read_event_log_csv(std::istream& in);

}  // namespace pilotflow
