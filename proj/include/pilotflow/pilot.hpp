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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "pilotflow/profile.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

class Backend;

enum class PilotState { kPending, kActive, kDone, kFailed, kCanceled };

std::string_view to_string(PilotState state);

struct PilotDescription {
  int cores = 1;
  Seconds walltime = 3600.0;
  std::string queue_name = "normal";

  /// cores >= 1 and walltime > 0, else ValidationError.
  void validate() const;
};

/// Placeholder allocation. Units may only be placed while it is ACTIVE.
struct Pilot {
  std::string id;
  PilotDescription description;
  PilotState state = PilotState::kPending;
  Seconds submit_time = 0.0;
  std::optional<Seconds> active_time;
  std::optional<Seconds> end_time;

  /// Tq: activation minus submission. Zero while still pending.
  Seconds queue_time() const { return active_time ? *active_time - submit_time : 0.0; }
};

using PilotCallback = std::function<void(Pilot&)>;

/// Submits a pilot to `backend`. The pilot is PENDING on return; the backend's
/// loop activates it after the backend's queue-wait sample has elapsed and
/// then calls `on_active`. Emits `submit` and `pilot_active` to `sink` when
/// given. Throws ValidationError on a bad description and SubmissionError when
/// the backend cannot hold the pilot.
std::shared_ptr<Pilot> submit_pilot(const PilotDescription& desc, Backend& backend, ProfileSink* sink = nullptr,
                                    PilotCallback on_active = {}, std::string id = "pilot.0000");

}  // namespace pilotflow
