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
#include <optional>
#include <string>
#include <string_view>

#include "pilotflow/event_loop.hpp"
#include "pilotflow/latency.hpp"
#include "pilotflow/scheduler.hpp"
#include "pilotflow/unit.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// Progress report for one unit, delivered on the backend's loop.
struct UnitPhase {
  enum class Kind {
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
  };

  Kind kind = Kind::kDone;
  Seconds time = 0.0;
  int exit_code = 0;
  std::string diagnostic;
};

std::string_view to_string(UnitPhase::Kind kind);

using PhaseCallback = std::function<void(const UnitPhase&)>;

/// Execution substrate for a pilot: provides the clock, the queue-wait and
/// latency charges, and runs units.
///
/// Charges returned by the sampling hooks are delays added on top of the
/// real work the engine performs; a local backend usually returns zero and a
/// simulated one returns its model samples.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string_view name() const = 0;
  /// Largest pilot this backend can host.
  virtual int capacity_cores() const = 0;
  virtual EventLoop& loop() = 0;

  /// Called once before a run: resets the clock and RNG streams.
  virtual void begin_run(const Workflow& workflow) = 0;
  /// Called after the loop stops: cancels and reaps anything still running.
  virtual void end_run() = 0;

  virtual Seconds sample_queue_wait() = 0;
  virtual LatencySampler make_pull_sampler() = 0;
  virtual Seconds sample_translate_cost() = 0;
  /// Seconds after activation at which the pilot dies, if it does.
  virtual std::optional<Seconds> pilot_failure_after() const { return std::nullopt; }

  /// Starts a placed unit. Phases are reported in order, ending with kDone or
  /// kFailed, each as a callback on loop().
  virtual void execute(const UnitDescription& unit, const Placement& placement, PhaseCallback report) = 0;
  /// Stops every unit in flight; no further phases are reported for them.
  virtual void cancel_all() = 0;
};

}  // namespace pilotflow
