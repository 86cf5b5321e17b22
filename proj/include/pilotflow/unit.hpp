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

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// Runtime form of a task: what the pilot agent pulls and executes.
struct UnitDescription {
  std::string unit_id;
  std::string source_task_id;
  TaskKind kind = TaskKind::kSimulated;
  std::string executable;
  std::vector<std::string> arguments;
  int cores = 1;
  std::vector<StagingDirective> inputs;
  std::vector<StagingDirective> outputs;
  Seconds expected_duration = 0.0;
  std::string stage_label;
  int pipeline = -1;
  int stage = -1;
  /// Serialized description as it would be written to the unit store.
  std::string document;

  /// Equality of everything except the identity (unit_id, document).
  bool same_payload(const UnitDescription& other) const;
  std::size_t staging_count() const { return inputs.size() + outputs.size(); }
};

/// Converts tasks to units, minting a fresh unit id per call.
class UnitTranslator {
 public:
  explicit UnitTranslator(std::string prefix = "unit") : prefix_(std::move(prefix)) {}

  UnitDescription translate_task(const TaskSpec& task, int pipeline = -1, int stage = -1);

  std::uint64_t translated() const { return next_.load(); }

 private:
  std::string prefix_;
  std::atomic<std::uint64_t> next_{0};
};

/// JSON document for a unit (the on-wire / on-disk form).
std::string serialize_unit(const UnitDescription& unit);

}  // namespace pilotflow
