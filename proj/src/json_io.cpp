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

#include "pilotflow/json_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

namespace {

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Json directive_list(const std::vector<StagingDirective>& directives) {
  Json list = Json::array();
  for (const auto& d : directives) list.push_back(to_json(d));
  return list;
}

std::vector<StagingDirective> directives_from(const Json& task, std::string_view key, std::string_view where) {
  std::vector<StagingDirective> out;
  auto list = optional_field<Json>(task, key, where, Json::array());
  if (!list.is_array()) throw_field_error(where, key, "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(staging_from_json(list[i], fmt::format("{}.{}[{}]", where, key, i)));
  return out;
}

}  // namespace

void throw_field_error(std::string_view where, std::string_view key, std::string_view problem) {
  throw ConfigError(fmt::format("{}.{}: {}", where, key, problem));
}

Json parse_json(std::string_view text, std::string_view origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(fmt::format("{}:{}:{}: JSON parse error: {}", origin, line, column, e.what()));
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
}

Json to_json(const StagingDirective& directive) {
  return Json{{"source", directive.source}, {"target", directive.target}, {"mode", to_string(directive.mode)}};
}

Json to_json(const TaskSpec& task) {
  return Json{{"id", task.id},
              {"kind", to_string(task.kind)},
              {"executable", task.executable},
              {"arguments", task.arguments},
              {"cores", task.cores},
              {"expected_duration", task.expected_duration},
              {"inputs", directive_list(task.inputs)},
              {"outputs", directive_list(task.outputs)},
              {"stage_label", task.stage_label}};
}

Json to_json(const Workflow& workflow) {
  Json pipelines = Json::array();
  for (const auto& pipeline : workflow.pipelines) {
    Json stages = Json::array();
    for (const auto& stage : pipeline.stages) {
      Json tasks = Json::array();
      for (const auto& task : stage.tasks) tasks.push_back(to_json(task));
      stages.push_back(Json{{"index", stage.index}, {"tasks", std::move(tasks)}});
    }
    pipelines.push_back(Json{{"id", pipeline.id}, {"stages", std::move(stages)}});
  }
  return Json{{"name", workflow.name}, {"pipelines", std::move(pipelines)}};
}

StagingDirective staging_from_json(const Json& json, std::string_view where) {
  StagingDirective d;
  d.source = require_field<std::string>(json, "source", where);
  d.target = require_field<std::string>(json, "target", where);
  d.mode = parse_staging_mode(require_field<std::string>(json, "mode", where));
  return d;
}

TaskSpec task_from_json(const Json& json, std::string_view where) {
  TaskSpec task;
  task.id = require_field<std::string>(json, "id", where);
  task.kind = parse_task_kind(optional_field<std::string>(json, "kind", where, "SIMULATED"));
  task.executable = optional_field<std::string>(json, "executable", where, "");
  task.arguments = optional_field<std::vector<std::string>>(json, "arguments", where, {});
  task.cores = optional_field<int>(json, "cores", where, 1);
  task.expected_duration = optional_field<double>(json, "expected_duration", where, 0.0);
  task.inputs = directives_from(json, "inputs", where);
  task.outputs = directives_from(json, "outputs", where);
  task.stage_label = optional_field<std::string>(json, "stage_label", where, "");
  return task;
}

Workflow workflow_from_json(const Json& json) {
  Workflow workflow;
  workflow.name = optional_field<std::string>(json, "name", "workflow", "");
  auto pipelines = require_field<Json>(json, "pipelines", "workflow");
  if (!pipelines.is_array()) throw_field_error("workflow", "pipelines", "expected an array");
  for (std::size_t p = 0; p < pipelines.size(); ++p) {
    const std::string pwhere = fmt::format("workflow.pipelines[{}]", p);
    Pipeline pipeline;
    pipeline.id = require_field<std::string>(pipelines[p], "id", pwhere);
    auto stages = require_field<Json>(pipelines[p], "stages", pwhere);
    if (!stages.is_array()) throw_field_error(pwhere, "stages", "expected an array");
    for (std::size_t s = 0; s < stages.size(); ++s) {
      const std::string swhere = fmt::format("{}.stages[{}]", pwhere, s);
      Stage stage;
      stage.index = optional_field<int>(stages[s], "index", swhere, static_cast<int>(s));
      auto tasks = require_field<Json>(stages[s], "tasks", swhere);
      if (!tasks.is_array()) throw_field_error(swhere, "tasks", "expected an array");
      for (std::size_t t = 0; t < tasks.size(); ++t)
        stage.tasks.push_back(task_from_json(tasks[t], fmt::format("{}.tasks[{}]", swhere, t)));
      pipeline.stages.push_back(std::move(stage));
    }
    workflow.pipelines.push_back(std::move(pipeline));
  }
  return workflow;
}

Workflow load_workflow(const std::filesystem::path& path) { return workflow_from_json(read_json_file(path)); }

void save_workflow(const Workflow& workflow, const std::filesystem::path& path) {
  write_text_file(path, to_json(workflow).dump(2) + "\n");
}

}  // namespace pilotflow
