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

#include "pilotflow/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

namespace {

enum class Interval { kTranslate, kEnqueue, kPull, kSchedule, kUnitIo, kStageIn, kExec, kStageOut };

struct Boundary {
  Interval interval;
  bool begin;
};

std::optional<Boundary> boundary_of(EventName name) {
  switch (name) {
    case EventName::kTranslateBegin: return Boundary{Interval::kTranslate, true};
    case EventName::kTranslateEnd: return Boundary{Interval::kTranslate, false};
    case EventName::kEnqueueBegin: return Boundary{Interval::kEnqueue, true};
    case EventName::kEnqueueEnd: return Boundary{Interval::kEnqueue, false};
    case EventName::kPullBegin: return Boundary{Interval::kPull, true};
    case EventName::kPullEnd: return Boundary{Interval::kPull, false};
    case EventName::kScheduleBegin: return Boundary{Interval::kSchedule, true};
    case EventName::kScheduleEnd: return Boundary{Interval::kSchedule, false};
    case EventName::kUnitIoBegin: return Boundary{Interval::kUnitIo, true};
    case EventName::kUnitIoEnd: return Boundary{Interval::kUnitIo, false};
    case EventName::kStageInBegin: return Boundary{Interval::kStageIn, true};
    case EventName::kStageInEnd: return Boundary{Interval::kStageIn, false};
    case EventName::kExecBegin: return Boundary{Interval::kExec, true};
    case EventName::kExecEnd: return Boundary{Interval::kExec, false};
    case EventName::kStageOutBegin: return Boundary{Interval::kStageOut, true};
    case EventName::kStageOutEnd: return Boundary{Interval::kStageOut, false};
    default: return std::nullopt;
  }
}

std::string num(double v) { return fmt::format("{}", v); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <typename T>
T parse_cell(const std::string& cell, std::size_t lineno, std::string_view column) {
  T value{};
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw ConfigError(fmt::format("trials csv line {}: bad {} '{}'", lineno, column, cell));
  return value;
}

const std::vector<std::string> kFixedColumns = {"trial_id",  "pipelines",         "tasks",
                                                "cores",     "tq_s",              "ttc_s",
                                                "ttx_s",     "engine_overhead_s", "runtime_overhead_s"};

}  // namespace

RunReport compute_report(std::span<const ProfileEvent> events) {
  RunReport report;
  std::optional<Seconds> submit;
  std::optional<Seconds> active;
  std::optional<Seconds> last_terminal;

  std::map<std::pair<std::string, Interval>, Seconds> open;
  struct Group {
    Seconds first = 0.0;
    std::optional<Seconds> last_terminal;
  };
  std::map<std::pair<int, int>, Group> groups;
  std::unordered_map<std::string, EventName> task_outcome;
  std::set<int> pipelines;

  const auto close = [&](const std::string& entity, Interval interval, Seconds begin, Seconds end) {
    if (end < begin)
      throw MalformedProfileError(fmt::format("entity {}: interval ends at {} before it begins at {}", entity, end, begin));
    const Seconds d = end - begin;
    switch (interval) {
      case Interval::kTranslate: report.translation_overhead += d; break;
      case Interval::kEnqueue: report.enqueue_overhead += d; break;
      case Interval::kPull: report.pull_overhead += d; break;
      case Interval::kSchedule: report.schedule_overhead += d; break;
      case Interval::kUnitIo: report.unit_io_overhead += d; break;
      case Interval::kStageIn:
      case Interval::kExec:
      case Interval::kStageOut: break;
    }
  };

  for (const auto& e : events) {
    if (e.name == EventName::kSubmit && !submit) submit = e.time;
    if (e.name == EventName::kPilotActive && !active) active = e.time;
    if (e.name == EventName::kPullBegin) ++report.pull_calls;

    if (auto b = boundary_of(e.name)) {
      const auto key = std::make_pair(e.entity, b->interval);
      auto it = open.find(key);
      if (b->begin) {
        if (it != open.end())
          throw MalformedProfileError(fmt::format("entity {}: {} while the interval is still open", e.entity,
                                                  to_string(e.name)));
        open.emplace(key, e.time);
      } else {
        if (it == open.end())
          throw MalformedProfileError(fmt::format("entity {}: {} without a matching begin", e.entity, to_string(e.name)));
        close(e.entity, b->interval, it->second, e.time);
        open.erase(it);
      }
    }

    if (is_task_terminal(e.name)) {
      // A failed or canceled task may stop mid-interval; done may not.
      for (auto it = open.lower_bound({e.entity, Interval::kTranslate});
           it != open.end() && it->first.first == e.entity;) {
        if (e.name == EventName::kDone)
          throw MalformedProfileError(fmt::format("entity {}: done with an interval still open", e.entity));
        close(e.entity, it->first.second, it->second, e.time);
        it = open.erase(it);
      }
      if (!task_outcome.emplace(e.entity, e.name).second)
        throw MalformedProfileError(fmt::format("entity {}: more than one terminal event", e.entity));
      last_terminal = last_terminal ? std::max(*last_terminal, e.time) : e.time;
    }

    if (e.pipeline >= 0 && e.stage >= 0) {
      pipelines.insert(e.pipeline);
      auto [git, inserted] = groups.try_emplace({e.pipeline, e.stage}, Group{e.time, std::nullopt});
      auto& g = git->second;
      if (!inserted) g.first = std::min(g.first, e.time);
      if (is_task_terminal(e.name)) g.last_terminal = g.last_terminal ? std::max(*g.last_terminal, e.time) : e.time;
    }
  }

  if (!open.empty()) {
    const auto& [key, begin] = *open.begin();
    throw MalformedProfileError(fmt::format("entity {}: interval begun at {} never ends", key.first, begin));
  }
  if (!submit) throw MalformedProfileError("profile has no submit event");
  if (!active) throw MalformedProfileError("profile has no pilot_active event");
  if (!last_terminal) throw MalformedProfileError("profile has no task terminal event");

  report.tq = *active - *submit;
  report.ttc = *last_terminal - *submit;
  report.ttx = report.ttc - report.tq;
  report.engine_overhead = report.translation_overhead + report.enqueue_overhead;
  report.runtime_overhead = report.pull_overhead + report.schedule_overhead + report.unit_io_overhead;

  std::map<int, std::pair<double, int>> sums;
  for (const auto& [key, g] : groups) {
    if (!g.last_terminal) continue;
    const Seconds span = *g.last_terminal - g.first;
    auto [it, inserted] = report.per_stage_ttx.try_emplace(key.second, span);
    if (!inserted) it->second = std::max(it->second, span);
    auto& [sum, n] = sums[key.second];
    sum += span;
    ++n;
  }
  for (const auto& [stage, s] : sums) report.per_stage_ttx_mean[stage] = s.first / s.second;

  for (const auto& [entity, name] : task_outcome) {
    if (name == EventName::kDone) ++report.done;
    else if (name == EventName::kFailed) ++report.failed;
    else ++report.canceled;
  }
  report.task_count = static_cast<int>(task_outcome.size());
  report.pipeline_count = static_cast<int>(pipelines.size());
  return report;
}

EventLog annotate_events(EventLog events, const Workflow& workflow) {
  std::unordered_map<std::string, std::pair<int, int>> where;
  for (std::size_t p = 0; p < workflow.pipelines.size(); ++p)
    for (const auto& stage : workflow.pipelines[p].stages)
      for (const auto& task : stage.tasks) where[task.id] = {static_cast<int>(p), stage.index};
  for (auto& e : events) {
    if (e.pipeline >= 0) continue;
    if (auto it = where.find(e.entity); it != where.end()) std::tie(e.pipeline, e.stage) = it->second;
  }
  return events;
}

Json to_json(const RunReport& report) {
  const auto stages = [](const std::map<int, Seconds>& m) {
    Json out = Json::object();
    for (const auto& [k, v] : m) out[std::to_string(k)] = v;
    return out;
  };
  return Json{{"trial_id", report.trial_id},
              {"config_digest", report.config_digest},
              {"workload", report.workload},
              {"tq", report.tq},
              {"ttc", report.ttc},
              {"ttx", report.ttx},
              {"engine_overhead", report.engine_overhead},
              {"translation_overhead", report.translation_overhead},
              {"enqueue_overhead", report.enqueue_overhead},
              {"runtime_overhead", report.runtime_overhead},
              {"pull_overhead", report.pull_overhead},
              {"schedule_overhead", report.schedule_overhead},
              {"unit_io_overhead", report.unit_io_overhead},
              {"per_stage_ttx", stages(report.per_stage_ttx)},
              {"per_stage_ttx_mean", stages(report.per_stage_ttx_mean)},
              {"task_count", report.task_count},
              {"pipeline_count", report.pipeline_count},
              {"cores", report.cores},
              {"done", report.done},
              {"failed", report.failed},
              {"canceled", report.canceled},
              {"pull_calls", report.pull_calls},
              {"failures", report.failures}};
}

std::vector<std::string> trial_csv_columns(int stage_count) {
  auto columns = kFixedColumns;
  for (int s = 1; s <= stage_count; ++s) columns.push_back(fmt::format("per_stage_ttx_s{}", s));
  return columns;
}

void write_trials_csv(std::ostream& out, std::span<const RunReport> reports, int stage_count) {
  out << fmt::format("{}\n", fmt::join(trial_csv_columns(stage_count), ","));
  for (const auto& r : reports) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}", r.trial_id, r.pipeline_count, r.task_count, r.cores, num(r.tq),
                       num(r.ttc), num(r.ttx), num(r.engine_overhead), num(r.runtime_overhead));
    for (int s = 0; s < stage_count; ++s) {
      auto it = r.per_stage_ttx.find(s);
      out << ',' << (it == r.per_stage_ttx.end() ? std::string() : num(it->second));
    }
    out << '\n';
  }
}

std::vector<RunReport> read_trials_csv(std::istream& in, const std::string& workload) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trials csv: empty file");
  const auto header = split_csv(line);
  if (header.size() < kFixedColumns.size() || !std::equal(kFixedColumns.begin(), kFixedColumns.end(), header.begin()))
    throw ConfigError(fmt::format("trials csv: unexpected header '{}'", line));
  const int stage_count = static_cast<int>(header.size() - kFixedColumns.size());
  if (header != trial_csv_columns(stage_count)) throw ConfigError(fmt::format("trials csv: unexpected header '{}'", line));

  std::vector<RunReport> reports;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw ConfigError(fmt::format("trials csv line {}: {} cells, expected {}", lineno, cells.size(), header.size()));
    RunReport r;
    r.workload = workload;
    r.trial_id = cells[0];
    r.pipeline_count = parse_cell<int>(cells[1], lineno, header[1]);
    r.task_count = parse_cell<int>(cells[2], lineno, header[2]);
    r.cores = parse_cell<int>(cells[3], lineno, header[3]);
    r.tq = parse_cell<double>(cells[4], lineno, header[4]);
    r.ttc = parse_cell<double>(cells[5], lineno, header[5]);
    r.ttx = parse_cell<double>(cells[6], lineno, header[6]);
    r.engine_overhead = parse_cell<double>(cells[7], lineno, header[7]);
    r.runtime_overhead = parse_cell<double>(cells[8], lineno, header[8]);
    for (int s = 0; s < stage_count; ++s) {
      const auto& cell = cells[kFixedColumns.size() + static_cast<std::size_t>(s)];
      if (!cell.empty()) r.per_stage_ttx[s] = parse_cell<double>(cell, lineno, header[kFixedColumns.size() + s]);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

Stat describe_values(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("describe_values: no values");
  Stat s;
  s.n = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

const Stat& SummaryRow::at(std::string_view metric) const {
  for (const auto& [name, stat] : metrics)
    if (name == metric) return stat;
  throw std::out_of_range(fmt::format("summary row has no metric '{}'", metric));
}

std::vector<SummaryRow> aggregate_trials(std::span<const RunReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_trials: no reports");
  std::map<std::pair<int, std::string>, std::vector<const RunReport*>> groups;
  for (const auto& r : reports) groups[{r.pipeline_count, r.workload}].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.pipelines = key.first;
    row.workload = key.second;
    row.trials = members.size();
    const auto add = [&](std::string name, auto get) {
      std::vector<double> values;
      for (const auto* r : members)
        if (auto v = get(*r)) values.push_back(*v);
      if (!values.empty()) row.metrics.emplace_back(std::move(name), describe_values(values));
    };
    add("tq_s", [](const RunReport& r) { return std::optional(r.tq); });
    add("ttc_s", [](const RunReport& r) { return std::optional(r.ttc); });
    add("ttx_s", [](const RunReport& r) { return std::optional(r.ttx); });
    add("engine_overhead_s", [](const RunReport& r) { return std::optional(r.engine_overhead); });
    add("runtime_overhead_s", [](const RunReport& r) { return std::optional(r.runtime_overhead); });
    std::set<int> stages;
    for (const auto* r : members)
      for (const auto& [s, v] : r->per_stage_ttx) stages.insert(s);
    for (int s : stages) {
      add(fmt::format("per_stage_ttx_s{}", s + 1), [s](const RunReport& r) -> std::optional<double> {
        auto it = r.per_stage_ttx.find(s);
        if (it == r.per_stage_ttx.end()) return std::nullopt;
        return it->second;
      });
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  std::vector<std::string> metrics;
  for (const auto& row : rows)
    for (const auto& [name, stat] : row.metrics)
      if (std::find(metrics.begin(), metrics.end(), name) == metrics.end()) metrics.push_back(name);

  out << "pipelines,workload,trials";
  for (const auto& m : metrics) out << fmt::format(",{0}_mean,{0}_min,{0}_max,{0}_stddev", m);
  out << '\n';
  for (const auto& row : rows) {
    out << fmt::format("{},{},{}", row.pipelines, row.workload, row.trials);
    for (const auto& m : metrics) {
      auto it = std::find_if(row.metrics.begin(), row.metrics.end(), [&](const auto& p) { return p.first == m; });
      if (it == row.metrics.end()) {
        out << ",,,,";
      } else {
        const auto& s = it->second;
        out << fmt::format(",{},{},{},{}", num(s.mean), num(s.min), num(s.max), num(s.stddev));
      }
    }
    out << '\n';
  }
}

Json to_json(const SummaryRow& row) {
  Json metrics = Json::object();
  for (const auto& [name, s] : row.metrics)
    metrics[name] = Json{{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"stddev", s.stddev}, {"n", s.n}};
  return Json{{"pipelines", row.pipelines}, {"workload", row.workload}, {"trials", row.trials}, {"metrics", metrics}};
}

void write_plot_data(std::ostream& out, std::span<const SummaryRow> rows) {
  std::vector<std::string> series;
  for (const auto& row : rows)
    for (const auto& [name, stat] : row.metrics)
      if (name != "tq_s" && name != "ttc_s" && std::find(series.begin(), series.end(), name) == series.end())
        series.push_back(name);

  bool first = true;
  for (const auto& name : series) {
    if (!first) out << "\n\n";
    first = false;
    out << fmt::format("# {}\n# pipelines mean\n", name);
    for (const auto& row : rows) {
      auto it = std::find_if(row.metrics.begin(), row.metrics.end(), [&](const auto& p) { return p.first == name; });
      if (it != row.metrics.end()) out << fmt::format("{} {}\n", row.pipelines, num(it->second.mean));
    }
  }
}

}  // namespace pilotflow
