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

#include "pilotflow/sim_backend.hpp"

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

namespace {

constexpr std::uint64_t kQueueStream = 1;
constexpr std::uint64_t kPullStream = 2;
constexpr std::uint64_t kFsStream = 3;
constexpr std::uint64_t kTranslateStream = 4;
constexpr std::uint64_t kNoiseStream = 5;

}  // namespace

void SimBackendConfig::validate() const {
  std::vector<std::string> violations;
  if (total_cores < 1) violations.push_back(fmt::format("total_cores {} < 1", total_cores));
  for (const auto* model : {&queue_wait, &pull_latency, &fs_latency, &translate_cost, &duration_noise}) {
    try {
      model->validate();
    } catch (const ValidationError& e) {
      for (const auto& v : e.violations()) violations.push_back(v);
    }
  }
  if (pilot_failure_after && !(*pilot_failure_after >= 0.0))
    violations.emplace_back("pilot_failure_after must be >= 0");
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

Json to_json(const SimBackendConfig& config) {
  Json json{{"type", "sim"},
            {"total_cores", config.total_cores},
            {"queue_wait", to_json(config.queue_wait)},
            {"pull_latency", to_json(config.pull_latency)},
            {"fs_latency", to_json(config.fs_latency)},
            {"fs_latency_per_pipeline", config.fs_latency_per_pipeline},
            {"translate_cost", to_json(config.translate_cost)},
            {"duration_noise", to_json(config.duration_noise)},
            {"seed", config.seed}};
  if (config.pilot_failure_after) json["pilot_failure_after"] = *config.pilot_failure_after;
  return json;
}

SimBackendConfig sim_config_from_json(const Json& json) {
  constexpr std::string_view where = "backend";
  SimBackendConfig config;
  const auto type = optional_field<std::string>(json, "type", where, "sim");
  if (type != "sim") throw ConfigError(fmt::format("backend.type: expected 'sim', got '{}'", type));
  config.total_cores = optional_field<int>(json, "total_cores", where, config.total_cores);
  const auto model = [&](std::string_view key, LatencyModel fallback, std::uint64_t stream) {
    auto it = json.find(key);
    if (it == json.end() || it->is_null()) return fallback;
    return latency_from_json(*it, fmt::format("{}.{}", where, key), stream);
  };
  config.queue_wait = model("queue_wait", config.queue_wait, kQueueStream);
  config.pull_latency = model("pull_latency", config.pull_latency, kPullStream);
  config.fs_latency = model("fs_latency", config.fs_latency, kFsStream);
  config.fs_latency_per_pipeline = optional_field<bool>(json, "fs_latency_per_pipeline", where, false);
  config.translate_cost = model("translate_cost", config.translate_cost, kTranslateStream);
  config.duration_noise = model("duration_noise", config.duration_noise, kNoiseStream);
  config.seed = optional_field<std::uint64_t>(json, "seed", where, 0);
  if (json.contains("pilot_failure_after") && !json["pilot_failure_after"].is_null())
    config.pilot_failure_after = require_field<double>(json, "pilot_failure_after", where);
  try {
    config.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(fmt::format("backend: {}", e.what()));
  }
  return config;
}

struct SimBackend::UnitRun {
  enum class Next { kUnitIo, kStageIn, kExec, kStageOut, kFinish };

  UnitDescription unit;
  PhaseCallback report;
  std::uint64_t generation = 0;
  LatencySampler fs;
  LatencySampler noise;
  Next next = Next::kUnitIo;
};

SimBackend::SimBackend(SimBackendConfig config) : config_(std::move(config)) {
  config_.validate();
  queue_wait_ = LatencySampler(config_.queue_wait, config_.seed);
  translate_ = LatencySampler(config_.translate_cost, config_.seed);
}

void SimBackend::begin_run(const Workflow& workflow) {
  loop_.reset();
  ++generation_;
  queue_wait_ = LatencySampler(config_.queue_wait, config_.seed);
  translate_ = LatencySampler(config_.translate_cost, config_.seed);
  fs_scale_ = config_.fs_latency_per_pipeline ? static_cast<double>(workflow.pipelines.size()) : 1.0;
  fs_charged_ = 0.0;
  fs_charges_ = 0;
}

void SimBackend::end_run() { ++generation_; }

LatencySampler SimBackend::make_pull_sampler() { return LatencySampler(config_.pull_latency, config_.seed); }

Seconds SimBackend::charge_fs(UnitRun& run, double scale) {
  const Seconds charge = run.fs.sample() * scale;
  fs_charged_ += charge;
  ++fs_charges_;
  return charge;
}

void SimBackend::execute(const UnitDescription& unit, const Placement& /*placement*/, PhaseCallback report) {
  auto run = std::make_shared<UnitRun>();
  run->unit = unit;
  run->report = std::move(report);
  run->generation = generation_;
  const auto substream = fnv1a64(unit.source_task_id);
  run->fs = LatencySampler(config_.fs_latency, config_.seed, substream);
  run->noise = LatencySampler(config_.duration_noise, config_.seed, substream);
  loop_.post([this, run] { advance(run); });
}

// One callback per phase boundary; samples are drawn lazily so a canceled
// unit is never charged for phases it did not reach.
void SimBackend::advance(const std::shared_ptr<UnitRun>& run) {
  if (run->generation != generation_) return;
  using Kind = UnitPhase::Kind;
  using Next = UnitRun::Next;
  const Seconds now = loop_.now();
  const auto report = [&](Kind kind) { run->report(UnitPhase{kind, now, 0, {}}); };
  Seconds delay = 0.0;

  switch (run->next) {
    case Next::kUnitIo:
      report(Kind::kUnitIoBegin);
      delay = charge_fs(*run, 1.0);
      run->next = Next::kStageIn;
      break;
    case Next::kStageIn:
      report(Kind::kUnitIoEnd);
      report(Kind::kStageInBegin);
      for (std::size_t i = 0; i < run->unit.inputs.size(); ++i) delay += charge_fs(*run, fs_scale_);
      run->next = Next::kExec;
      break;
    case Next::kExec:
      report(Kind::kStageInEnd);
      report(Kind::kExecBegin);
      delay = run->unit.expected_duration * run->noise.sample();
      run->next = Next::kStageOut;
      break;
    case Next::kStageOut:
      report(Kind::kExecEnd);
      report(Kind::kStageOutBegin);
      for (std::size_t i = 0; i < run->unit.outputs.size(); ++i) delay += charge_fs(*run, fs_scale_);
      run->next = Next::kFinish;
      break;
    case Next::kFinish:
      report(Kind::kStageOutEnd);
      report(Kind::kDone);
      return;
  }
  if (run->generation != generation_) return;
  loop_.post_at(now + delay, [this, run] { advance(run); });
}

}  // namespace pilotflow
