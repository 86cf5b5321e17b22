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

#include "pilotflow/pilot.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pilotflow/backend.hpp"
#include "pilotflow/errors.hpp"

namespace pilotflow {

std::string_view to_string(PilotState state) {
  switch (state) {
    case PilotState::kPending: return "PENDING";
    case PilotState::kActive: return "ACTIVE";
    case PilotState::kDone: return "DONE";
    case PilotState::kFailed: return "FAILED";
    case PilotState::kCanceled: return "CANCELED";
  }
  return "?";
}

void PilotDescription::validate() const {
  std::vector<std::string> violations;
  if (cores < 1) violations.push_back(fmt::format("pilot cores {} < 1", cores));
  if (!(walltime > 0.0) || !std::isfinite(walltime))
    violations.push_back(fmt::format("pilot walltime {} must be > 0", walltime));
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::shared_ptr<Pilot> submit_pilot(const PilotDescription& desc, Backend& backend, ProfileSink* sink,
                                    PilotCallback on_active, std::string id) {
  desc.validate();
  if (desc.cores > backend.capacity_cores())
    throw SubmissionError(fmt::format("{} backend rejected pilot: {} cores requested, capacity is {}", backend.name(),
                                      desc.cores, backend.capacity_cores()));

  auto pilot = std::make_shared<Pilot>();
  pilot->id = std::move(id);
  pilot->description = desc;
  pilot->state = PilotState::kPending;
  auto& loop = backend.loop();
  pilot->submit_time = loop.now();
  if (sink) sink->emit(pilot->submit_time, pilot->id, EventName::kSubmit);

  const Seconds wait = backend.sample_queue_wait();
  loop.post_at(pilot->submit_time + wait, [pilot, sink, &loop, on_active = std::move(on_active)] {
    if (pilot->state != PilotState::kPending) return;
    pilot->state = PilotState::kActive;
    pilot->active_time = loop.now();
    if (sink) sink->emit(*pilot->active_time, pilot->id, EventName::kPilotActive);
    if (on_active) on_active(*pilot);
  });
  return pilot;
}

}  // namespace pilotflow
