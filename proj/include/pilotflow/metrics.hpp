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

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pilotflow/json_io.hpp"
#include "pilotflow/profile.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// Metrics of one run. All durations in seconds.
///
/// Interval sets behind the two overheads:
///   engine_overhead  = translation (translate_begin/end on tasks)
///                    + enqueue     (enqueue_begin/end on the workflow manager)
///   runtime_overhead = pull        (pull_begin/end on the agent)
///                    + schedule    (schedule_begin/end on the agent)
///                    + unit_io     (unit_io_begin/end on tasks)
/// Directive staging (stage_in/stage_out) is part of the owning stage's TTX and
/// is not an overhead.
struct RunReport {
  std::string trial_id;
  std::string config_digest;
  std::string workload;

  Seconds tq = 0.0;
  Seconds ttc = 0.0;
  Seconds ttx = 0.0;

  Seconds translation_overhead = 0.0;
  Seconds enqueue_overhead = 0.0;
  Seconds engine_overhead = 0.0;

  Seconds pull_overhead = 0.0;
  Seconds schedule_overhead = 0.0;
  Seconds unit_io_overhead = 0.0;
  Seconds runtime_overhead = 0.0;

  /// Stage index -> max over pipelines of (last terminal event - first event).
  std::map<int, Seconds> per_stage_ttx;
  /// Same intervals, averaged over pipelines.
  std::map<int, Seconds> per_stage_ttx_mean;

  int task_count = 0;
  int pipeline_count = 0;
  int cores = 0;
  int done = 0;
  int failed = 0;
  int canceled = 0;
  std::size_t pull_calls = 0;
  std::vector<std::string> failures;

  bool succeeded() const { return failed == 0 && canceled == 0 && done == task_count; }
};

/// Derives a report from a complete, time-ordered profile. Throws
/// MalformedProfileError on unmatched or inverted begin/end pairs, naming the
/// entity, and when submit, pilot_active or every task terminal event is
/// missing. Task events need their pipeline and stage set (see
/// annotate_events for logs read back from CSV).
RunReport compute_report(std::span<const ProfileEvent> events);

/// Fills pipeline/stage on task events whose entity is a task id of `workflow`.
EventLog annotate_events(EventLog events, const Workflow& workflow);

Json to_json(const RunReport& report);

/// Flat trial table. Columns: trial_id, pipelines, tasks, cores, tq_s, ttc_s,
/// ttx_s, engine_overhead_s, runtime_overhead_s, per_stage_ttx_s1..sN.
std::vector<std::string> trial_csv_columns(int stage_count);
void write_trials_csv(std::ostream& out, std::span<const RunReport> reports, int stage_count);
/// Inverse of write_trials_csv for the columns it holds; `workload` is not in
/// the table and is applied to every row.
std::vector<RunReport> read_trials_csv(std::istream& in, const std::string& workload = {});

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single value.
  double stddev = 0.0;
  std::size_t n = 0;
};

Stat describe_values(std::span<const double> values);

struct SummaryRow {
  int pipelines = 0;
  std::string workload;
  std::size_t trials = 0;
  /// Metric name (tq_s, ttc_s, ttx_s, engine_overhead_s, runtime_overhead_s,
  /// per_stage_ttx_s1..) in column order.
  std::vector<std::pair<std::string, Stat>> metrics;

  const Stat& at(std::string_view metric) const;
};

/// Groups by (pipeline_count, workload), ordered by pipeline count. Throws
/// std::invalid_argument on empty input.
std::vector<SummaryRow> aggregate_trials(std::span<const RunReport> reports);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
Json to_json(const SummaryRow& row);

/// gnuplot data: one index block per series (ttx, overheads, per-stage ttx),
/// each with `pipelines mean` rows; blocks separated by two blank lines.
void write_plot_data(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace pilotflow
