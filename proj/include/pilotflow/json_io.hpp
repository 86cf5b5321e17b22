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

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pilotflow/workflow.hpp"

namespace pilotflow {

using Json = nlohmann::json;

/// Parses a JSON document; syntax errors become ConfigError with the
/// 1-based line and column of the offending byte.
Json parse_json(std::string_view text, std::string_view origin);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Typed field access that reports the JSON path of a missing or mistyped
/// field instead of nlohmann's generic type_error.
[[noreturn]] void throw_field_error(std::string_view where, std::string_view key, std::string_view problem);

template <typename T>
T require_field(const Json& object, std::string_view key, std::string_view where) {
  if (!object.is_object()) throw_field_error(where, key, "enclosing value is not an object");
  auto it = object.find(key);
  if (it == object.end()) throw_field_error(where, key, "missing required field");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_field_error(where, key, e.what());
  }
}

template <typename T>
T optional_field(const Json& object, std::string_view key, std::string_view where, T fallback) {
  if (!object.is_object()) throw_field_error(where, key, "enclosing value is not an object");
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return fallback;
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_field_error(where, key, e.what());
  }
}

// Workflow schema: {name, pipelines: [{id, stages: [{index, tasks: [TaskSpec]}]}]}
// with TaskSpec fields {id, kind, executable, arguments, cores,
// expected_duration, inputs, outputs, stage_label} and StagingDirective
// fields {source, target, mode}.
Json to_json(const StagingDirective& directive);
Json to_json(const TaskSpec& task);
Json to_json(const Workflow& workflow);

StagingDirective staging_from_json(const Json& json, std::string_view where);
TaskSpec task_from_json(const Json& json, std::string_view where);
Workflow workflow_from_json(const Json& json);

Workflow load_workflow(const std::filesystem::path& path);
void save_workflow(const Workflow& workflow, const std::filesystem::path& path);

}  // namespace pilotflow
