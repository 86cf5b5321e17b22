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

#include "pilotflow/profile.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <utility>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

namespace {

constexpr std::array<std::pair<EventName, std::string_view>, 24> kNames{{
    {EventName::kSubmit, "submit"},
    {EventName::kPilotActive, "pilot_active"},
    {EventName::kPilotDone, "pilot_done"},
    {EventName::kPilotFailed, "pilot_failed"},
    {EventName::kTranslateBegin, "translate_begin"},
    {EventName::kTranslateEnd, "translate_end"},
    {EventName::kEnqueueBegin, "enqueue_begin"},
    {EventName::kEnqueueEnd, "enqueue_end"},
    {EventName::kPullBegin, "pull_begin"},
    {EventName::kPullEnd, "pull_end"},
    {EventName::kScheduleBegin, "schedule_begin"},
    {EventName::kScheduleEnd, "schedule_end"},
    {EventName::kSchedule, "schedule"},
    {EventName::kUnitIoBegin, "unit_io_begin"},
    {EventName::kUnitIoEnd, "unit_io_end"},
    {EventName::kStageInBegin, "stage_in_begin"},
    {EventName::kStageInEnd, "stage_in_end"},
    {EventName::kExecBegin, "exec_begin"},
    {EventName::kExecEnd, "exec_end"},
    {EventName::kStageOutBegin, "stage_out_begin"},
    {EventName::kStageOutEnd, "stage_out_end"},
    {EventName::kDone, "done"},
    {EventName::kFailed, "failed"},
    {EventName::kCanceled, "canceled"},
}};

}  // namespace

std::string_view to_string(EventName name) {
  for (const auto& [value, text] : kNames)
    if (value == name) return text;
  return "?";
}

std::optional<EventName> parse_event_name(std::string_view text) {
  for (const auto& [value, name] : kNames)
    if (name == text) return value;
  return std::nullopt;
}

bool is_task_terminal(EventName name) {
  return name == EventName::kDone || name == EventName::kFailed || name == EventName::kCanceled;
}

void ProfileSink::emit(ProfileEvent event) {
  std::lock_guard lock(mutex_);
  events_.push_back(std::move(event));
}

void ProfileSink::emit(Seconds time, std::string_view entity, EventName name, int pipeline, int stage) {
  emit(ProfileEvent{time, std::string(entity), name, pipeline, stage});
}

EventLog ProfileSink::events() const {
  EventLog copy;
  {
    std::lock_guard lock(mutex_);
    copy = events_;
  }
  std::stable_sort(copy.begin(), copy.end(),
                   [](const ProfileEvent& a, const ProfileEvent& b) { return a.time < b.time; });
  return copy;
}

std::size_t ProfileSink::size() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

void write_event_log_csv(std::ostream& out, std::span<const ProfileEvent> events) {
  out << "time_s,entity,event\n";
  for (const auto& e : events) out << fmt::format("{},{},{}\n", e.time, e.entity, to_string(e.name));
}

EventLog read_event_log_csv(std::istream& in) {
  EventLog log;
  std::string line;
  if (!std::getline(in, line) || line != "time_s,entity,event")
    throw ConfigError("event log: missing header 'time_s,entity,event'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) throw ConfigError(fmt::format("event log line {}: expected 3 columns", lineno));
    ProfileEvent e;
    const auto* first = line.data();
    if (auto [ptr, ec] = std::from_chars(first, first + c1, e.time); ec != std::errc{} || ptr != first + c1)
      throw ConfigError(fmt::format("event log line {}: bad time '{}'", lineno, line.substr(0, c1)));
    e.entity = line.substr(c1 + 1, c2 - c1 - 1);
    auto name = parse_event_name(std::string_view(line).substr(c2 + 1));
    if (!name) throw ConfigError(fmt::format("event log line {}: unknown event '{}'", lineno, line.substr(c2 + 1)));
    e.name = *name;
    log.push_back(std::move(e));
  }
  return log;
}

}  // namespace pilotflow
