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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pilotflow/json_io.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// One stage of a replica pipeline; expanded into exactly one task per
/// replica. Staging paths may contain `{name}`, `{pipeline}` and `{replica}`
/// placeholders, substituted at expansion.
struct StageTemplate {
  std::string label;
  TaskKind kind = TaskKind::kSimulated;
  int cores = 1;
  Seconds expected_duration = 0.0;
  std::optional<std::int64_t> timesteps;  // informational only
  std::vector<StagingDirective> staging;
  std::string executable;
  std::vector<std::string> arguments;

  bool operator==(const StageTemplate&) const = default;
};

struct ProtocolConfig {
  std::string name;
  int replicas = 1;
  std::vector<StageTemplate> stages;

  /// Throws ValidationError listing every violation.
  void validate() const;
  bool operator==(const ProtocolConfig&) const = default;
};

inline constexpr std::size_t kEsmacsStageCount = 7;
using EsmacsDurations = std::array<Seconds, kEsmacsStageCount>;

/// Simulated-seconds defaults: small constants for the staging/prep/minimize
/// stages, 5:55:5 for the three equilibration stages (their timestep ratio).
EsmacsDurations esmacs_default_durations();

/// Core profile (1,1,8,8,8,8,1).
std::array<int, kEsmacsStageCount> esmacs_core_profile();

/// `replicas` independent 7-stage pipelines, one task per stage. The null
/// workload keeps the real core counts but runs `sleep 0` and stages no data.
Workflow generate_esmacs(int replicas, TaskKind kind,
                         const EsmacsDurations& base_durations = esmacs_default_durations());

/// The ESMACS protocol expressed as a generic config (same shape as
/// protocols/esmacs.json).
ProtocolConfig esmacs_protocol_config(int replicas, TaskKind kind,
                                      const EsmacsDurations& base_durations = esmacs_default_durations());

/// Task ids are "{name}-p{replica}-s{stage}" (both 0-based), pipeline ids
/// "{name}-p{replica}".
std::string protocol_task_id(std::string_view name, int replica, int stage);
std::string protocol_pipeline_id(std::string_view name, int replica);

Workflow expand_protocol(const ProtocolConfig& config);

/// Re-targets every stage at `kind`: the null workload becomes `sleep 0`
/// without staging; LOCAL_EXEC stages with no executable sleep for their
/// expected duration.
ProtocolConfig with_workload(ProtocolConfig config, TaskKind kind);

Json to_json(const ProtocolConfig& config);
ProtocolConfig protocol_from_json(const Json& json);
ProtocolConfig load_protocol_config(const std::filesystem::path& path);

/// Parses, validates and expands a protocol file.
Workflow load_protocol(const std::filesystem::path& path);

}  // namespace pilotflow
