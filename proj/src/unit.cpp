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

#include "pilotflow/unit.hpp"

#include <fmt/format.h>

#include "pilotflow/json_io.hpp"

namespace pilotflow {

bool UnitDescription::same_payload(const UnitDescription& other) const {
  return source_task_id == other.source_task_id && kind == other.kind && executable == other.executable &&
         arguments == other.arguments && cores == other.cores && inputs == other.inputs && outputs == other.outputs &&
         expected_duration == other.expected_duration && stage_label == other.stage_label &&
         pipeline == other.pipeline && stage == other.stage;
}

UnitDescription UnitTranslator::translate_task(const TaskSpec& task, int pipeline, int stage) {
  UnitDescription unit;
  unit.unit_id = fmt::format("{}.{:06d}", prefix_, next_.fetch_add(1));
  unit.source_task_id = task.id;
  unit.kind = task.kind;
  unit.executable = task.executable;
  unit.arguments = task.arguments;
  unit.cores = task.cores;
  unit.inputs = task.inputs;
  unit.outputs = task.outputs;
  unit.expected_duration = task.expected_duration;
  unit.stage_label = task.stage_label;
  unit.pipeline = pipeline;
  unit.stage = stage;
  unit.document = serialize_unit(unit);
  return unit;
}

std::string serialize_unit(const UnitDescription& unit) {
  Json inputs = Json::array();
  for (const auto& d : unit.inputs) inputs.push_back(to_json(d));
  Json outputs = Json::array();
  for (const auto& d : unit.outputs) outputs.push_back(to_json(d));
  Json doc{{"uid", unit.unit_id},
           {"task", unit.source_task_id},
           {"kind", to_string(unit.kind)},
           {"executable", unit.executable},
           {"arguments", unit.arguments},
           {"cores", unit.cores},
           {"input_staging", std::move(inputs)},
           {"output_staging", std::move(outputs)},
           {"expected_duration", unit.expected_duration},
           {"stage_label", unit.stage_label},
           {"pipeline", unit.pipeline},
           {"stage", unit.stage}};
  return doc.dump();
}

}  // namespace pilotflow
