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
#include <memory>
#include <optional>

#include "pilotflow/backend.hpp"
#include "pilotflow/json_io.hpp"

namespace pilotflow {

/// Latency and duration model of the simulated machine. Time starts at 0 when
/// the pilot is submitted. Default stream ids keep the models' RNGs apart.
struct SimBackendConfig {
  int total_cores = 1'000'000;
  LatencyModel queue_wait = LatencyModel::constant(0.0, 1);
  LatencyModel pull_latency = LatencyModel::constant(0.0, 2);
  /// Charged once per unit launch (unit description I/O) and once per staging
  /// directive.
  LatencyModel fs_latency = LatencyModel::constant(0.0, 3);
  /// Multiplies the per-directive charge by the workflow's pipeline count, a
  /// stand-in for contention on a shared filesystem.
  bool fs_latency_per_pipeline = false;
  /// Simulated cost of translating one task into a unit.
  LatencyModel translate_cost = LatencyModel::constant(0.0, 4);
  /// Multiplicative factor on expected_duration; 1.0 means no noise.
  LatencyModel duration_noise = LatencyModel::constant(1.0, 5);
  std::uint64_t seed = 0;
  /// Pilot dies this many seconds after activation.
  std::optional<Seconds> pilot_failure_after;

  void validate() const;
};

Json to_json(const SimBackendConfig& config);
SimBackendConfig sim_config_from_json(const Json& json);

/// Deterministic, single-threaded discrete-event backend.
///
/// Per-unit charges (filesystem latency, duration noise) are drawn from RNG
/// substreams keyed by the unit's source task id, so a unit's timing does not
/// depend on which other units share the run.
class SimBackend final : public Backend {
 public:
  explicit SimBackend(SimBackendConfig config = {});

  std::string_view name() const override { return "sim"; }
  int capacity_cores() const override { return config_.total_cores; }
  EventLoop& loop() override { return loop_; }

  void begin_run(const Workflow& workflow) override;
  void end_run() override;

  Seconds sample_queue_wait() override { return queue_wait_.sample(); }
  LatencySampler make_pull_sampler() override;
  Seconds sample_translate_cost() override { return translate_.sample(); }
  std::optional<Seconds> pilot_failure_after() const override { return config_.pilot_failure_after; }

  void execute(const UnitDescription& unit, const Placement& placement, PhaseCallback report) override;
  void cancel_all() override { ++generation_; }

  const SimBackendConfig& config() const { return config_; }

  /// Filesystem latency actually charged so far in this run.
  Seconds fs_charged() const { return fs_charged_; }
  std::size_t fs_charges() const { return fs_charges_; }
  Seconds fs_scale() const { return fs_scale_; }

 private:
  struct UnitRun;
  void advance(const std::shared_ptr<UnitRun>& run);
  Seconds charge_fs(UnitRun& run, double scale);

  SimBackendConfig config_;
  SimulatedLoop loop_;
  LatencySampler queue_wait_;
  LatencySampler translate_;
  double fs_scale_ = 1.0;
  std::uint64_t generation_ = 0;
  Seconds fs_charged_ = 0.0;
  std::size_t fs_charges_ = 0;
};

}  // namespace pilotflow
