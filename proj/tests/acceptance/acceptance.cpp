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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "../oracles/oracles.hpp"
#include "pilotflow/engine.hpp"
#include "pilotflow/experiment.hpp"
#include "pilotflow/local_backend.hpp"
#include "pilotflow/protocol.hpp"
#include "pilotflow/scheduler.hpp"
#include "pilotflow/sim_backend.hpp"

namespace fs = std::filesystem;
using namespace pilotflow;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

// Every report produced by any check, for the identity criterion.
std::vector<RunReport> all_reports;

void keep(const RunReport& r) { all_reports.push_back(r); }

fs::path scratch(const std::string& tag) {
  static int n = 0;
  auto p = fs::temp_directory_path() / fmt::format("pilotflow-acceptance-{}-{}-{}", ::getpid(), tag, n++);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ResourceRequest request(int cores, Seconds walltime = 1e6) {
  ResourceRequest r;
  r.cores = cores;
  r.walltime = walltime;
  return r;
}

Verdict weak_scaling_invariance() {
  const auto start = Clock::now();
  ExperimentConfig config;
  config.workload = WorkloadKind::kSim;
  config.pipeline_counts = {2, 4, 8, 16};
  config.trials = 1;
  config.output_dir = scratch("c1");
  const auto result = run_experiment(config);
  const double seconds = elapsed(start);
  fs::remove_all(config.output_dir);

  const auto d = esmacs_default_durations();
  const Seconds expected = std::accumulate(d.begin(), d.end(), 0.0);
  bool ok = result.ok() && result.reports.size() == 4 && seconds < 10.0;
  std::vector<std::string> parts;
  for (const auto& r : result.reports) {
    keep(r);
    ok = ok && r.ttx == expected && r.cores == 8 * r.pipeline_count;
    parts.push_back(fmt::format("{}p/{}c:{}", r.pipeline_count, r.cores, r.ttx));
  }
  return {ok, fmt::format("ttx [{}] expected {} ; {:.3f} s", fmt::join(parts, " "), expected, seconds)};
}

Verdict metric_identity() {
  SimBackendConfig config;
  config.queue_wait = LatencyModel::constant(37.25, 1);
  config.pull_latency = LatencyModel::constant(0.3, 2);
  SimBackend backend(config);
  ProfileSink sink;
  const auto r = run_workflow(generate_esmacs(4, TaskKind::kSimulated), request(32), backend, sink);
  keep(r);
  std::size_t violations = 0;
  for (const auto& x : all_reports) violations += x.ttx != x.ttc - x.tq;
  const bool ok = violations == 0 && r.tq == 37.25;
  return {ok, fmt::format("{} reports, {} identity violations; tq read back {} (configured 37.25)", all_reports.size(),
                          violations, r.tq)};
}

Verdict overhead_accounting() {
  constexpr Seconds c1 = 0.25, c2 = 0.125;
  SimBackendConfig config;
  config.pull_latency = LatencyModel::constant(c1, 2);
  config.fs_latency = LatencyModel::constant(c2, 3);
  SimBackend backend(config);
  ProfileSink sink;
  const auto r = run_workflow(generate_esmacs(8, TaskKind::kSimulated), request(64), backend, sink, RunOptions{});
  keep(r);

  // Counted straight from the log: pulls on the agent, unit description I/O
  // (the runtime's own staging) on units.
  std::size_t pulls = 0, unit_io = 0;
  for (const auto& e : sink.events()) {
    pulls += e.name == EventName::kPullBegin;
    unit_io += e.name == EventName::kUnitIoBegin;
  }
  const Seconds expected = static_cast<double>(pulls) * c1 + static_cast<double>(unit_io) * c2;
  const bool ok = r.runtime_overhead == expected && pulls == r.pull_calls && pulls > 0;
  return {ok, fmt::format("runtime_overhead {} ; {} pulls x {} + {} unit I/O x {} = {}", r.runtime_overhead, pulls, c1,
                          unit_io, c2, expected)};
}

Verdict engine_overhead_growth() {
  const auto root = scratch("c4");
  std::vector<std::string> parts;
  std::vector<double> medians;
  // Warm the page cache and the spawn path once.
  {
    LocalBackendConfig config;
    config.cores = 16;
    config.workdir = root / "warmup";
    LocalBackend backend(config);
    ProfileSink sink;
    run_workflow(generate_esmacs(2, TaskKind::kNullWorkload), request(16, 600), backend, sink);
  }
  for (int pipelines : {2, 4, 8, 16}) {
    std::vector<double> samples;
    for (int rep = 0; rep < 3; ++rep) {
      LocalBackendConfig config;
      config.cores = 128;
      config.workdir = root / fmt::format("p{}-r{}", pipelines, rep);
      LocalBackend backend(config);
      ProfileSink sink;
      const auto r = run_workflow(generate_esmacs(pipelines, TaskKind::kNullWorkload), request(128, 600), backend, sink);
      keep(r);
      if (!r.succeeded()) return {false, fmt::format("null run with {} pipelines did not succeed", pipelines)};
      samples.push_back(r.translation_overhead);
    }
    std::sort(samples.begin(), samples.end());
    medians.push_back(samples[1]);
    parts.push_back(fmt::format("{} tasks: {:.6f} s", pipelines * 7, samples[1]));
  }
  fs::remove_all(root);
  const bool ok = std::is_sorted(medians.begin(), medians.end());
  return {ok, fmt::format("median translation overhead [{}]", fmt::join(parts, ", "))};
}

Verdict scheduler_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  constexpr int kCases = 200000;
  int mismatches = 0;
  std::string first;
  for (int c = 0; c < kCases; ++c) {
    const int total = 1 + static_cast<int>(rng() % 16);
    std::vector<bool> busy(static_cast<std::size_t>(total));
    const auto density = rng() % 4;
    for (auto&& b : busy) b = rng() % 4 < density;
    const int n = 1 + static_cast<int>(rng() % 6);
    std::deque<UnitDescription> ready;
    std::vector<oracle::OracleUnit> units;
    for (int i = 0; i < n; ++i) {
      UnitDescription u;
      u.unit_id = fmt::format("u{}", i);
      u.cores = 1 + static_cast<int>(rng() % static_cast<unsigned>(total + 2));
      u.pipeline = static_cast<int>(rng() % 3);
      u.stage = static_cast<int>(rng() % 2);
      units.push_back({u.unit_id, u.cores, u.pipeline, u.stage});
      ready.push_back(std::move(u));
    }
    const auto expected = oracle::brute_force_schedule(units, busy);
    auto map = CoreMap::from_mask(busy);
    const auto got = schedule(ready, map, 0.0);
    std::vector<oracle::OraclePlacement> placed;
    for (const auto& p : got.placements) placed.push_back({p.unit_id, p.core_offset, p.cores});
    std::vector<std::string> waiting, unschedulable;
    for (const auto& u : ready) waiting.push_back(u.unit_id);
    for (const auto& u : got.unschedulable) unschedulable.push_back(u.unit_id);
    if (placed != expected.placed || waiting != expected.waiting || unschedulable != expected.unschedulable) {
      if (mismatches++ == 0) first = fmt::format(" (first at case {})", c);
    }
  }
  const double seconds = elapsed(start);
  return {mismatches == 0 && seconds < 5.0,
          fmt::format("{} random cases, {} mismatches{} ; {:.3f} s", kCases, mismatches, first, seconds)};
}

Verdict local_null_run() {
  const auto start = Clock::now();
  const auto root = scratch("c6");
  constexpr int kCores = 16;
  LocalBackendConfig config;
  config.cores = kCores;
  config.workdir = root;
  LocalBackend backend(config);
  ProfileSink sink;
  const auto wf = generate_esmacs(2, TaskKind::kNullWorkload);
  const auto r = run_workflow(wf, request(kCores, 600), backend, sink);
  keep(r);
  const double seconds = elapsed(start);
  fs::remove_all(root);

  std::map<std::string, int> task_cores;
  for (const auto& p : wf.pipelines)
    for (const auto& s : p.stages)
      for (const auto& t : s.tasks) task_cores[t.id] = t.cores;

  // Stage ordering: per pipeline, stage k+1 starts no earlier than stage k ends.
  std::map<std::pair<int, int>, std::pair<Seconds, Seconds>> spans;  // first start, last end
  int in_use = 0, peak = 0;
  bool conserved = true;
  std::map<std::string, bool> holding;
  for (const auto& e : sink.events()) {
    if (e.pipeline < 0) continue;
    auto [it, fresh] = spans.try_emplace({e.pipeline, e.stage}, std::make_pair(1e300, -1e300));
    auto& span = it->second;
    if (e.name == EventName::kTranslateBegin) span.first = std::min(span.first, e.time);
    if (is_task_terminal(e.name)) span.second = std::max(span.second, e.time);
    if (e.name == EventName::kSchedule) {
      conserved = conserved && !holding[e.entity];
      holding[e.entity] = true;
      in_use += task_cores.at(e.entity);
    } else if (is_task_terminal(e.name) && holding[e.entity]) {
      holding[e.entity] = false;
      in_use -= task_cores.at(e.entity);
    }
    conserved = conserved && in_use >= 0 && in_use <= kCores;
    peak = std::max(peak, in_use);
  }
  conserved = conserved && in_use == 0;
  bool ordered = true;
  for (const auto& [key, span] : spans) {
    auto next = spans.find({key.first, key.second + 1});
    if (next != spans.end()) ordered = ordered && next->second.first >= span.second;
  }
  const bool ok = r.done == 14 && r.task_count == 14 && ordered && conserved && seconds < 30.0;
  return {ok, fmt::format("{} DONE of {}; stage ordering {}; cores conserved {} (peak {}/{}); {:.3f} s", r.done,
                          r.task_count, ordered ? "holds" : "VIOLATED", conserved ? "yes" : "NO", peak, kCores,
                          seconds)};
}

int counted_peak_demand(const Workflow& wf) {
  std::vector<int> by_stage;
  for (const auto& p : wf.pipelines)
    for (const auto& s : p.stages) {
      const auto i = static_cast<std::size_t>(s.index);
      if (by_stage.size() <= i) by_stage.resize(i + 1);
      by_stage[i] += s.total_cores();
    }
  return *std::max_element(by_stage.begin(), by_stage.end());
}

Verdict template_fidelity() {
  const auto wf = generate_esmacs(25, TaskKind::kSimulated);
  std::vector<int> profile;
  bool uniform = true;
  for (const auto& s : wf.pipelines.front().stages) profile.push_back(s.tasks.front().cores);
  for (const auto& p : wf.pipelines) {
    std::vector<int> mine;
    for (const auto& s : p.stages) mine.push_back(s.tasks.front().cores);
    uniform = uniform && mine == profile && p.stages.size() == 7;
  }
  const int peak25 = counted_peak_demand(wf);
  const int peak8 = counted_peak_demand(generate_esmacs(8, TaskKind::kSimulated));
  const bool ok = wf.pipelines.size() == 25 && wf.task_count() == 175 && uniform &&
                  profile == std::vector<int>{1, 1, 8, 8, 8, 8, 1} && peak25 == 200 && peak8 == 64;
  return {ok, fmt::format("{} pipelines, {} tasks, profile ({}), peak {} ; 8 pipelines peak {}", wf.pipelines.size(),
                          wf.task_count(), fmt::join(profile, ","), peak25, peak8)};
}

Verdict per_stage_shape() {
  // Power-of-two latencies keep every timestamp exactly representable.
  SimBackendConfig config;
  config.pull_latency = LatencyModel::constant(0.25, 2);
  config.fs_latency = LatencyModel::constant(0.5, 3);
  config.fs_latency_per_pipeline = true;
  std::vector<std::map<int, Seconds>> stages;
  std::vector<std::string> parts;
  for (int pipelines : {2, 4, 8, 16}) {
    SimBackend backend(config);
    ProfileSink sink;
    const auto r = run_workflow(generate_esmacs(pipelines, TaskKind::kSimulated), request(8 * pipelines), backend, sink);
    keep(r);
    stages.push_back(r.per_stage_ttx);
    std::vector<std::string> cells;
    for (const auto& [k, v] : r.per_stage_ttx) cells.push_back(fmt::format("{}", v));
    parts.push_back(fmt::format("{}p:({})", pipelines, fmt::join(cells, ",")));
  }
  bool constant = true, growing = true;
  for (std::size_t i = 1; i < stages.size(); ++i) {
    for (int k : {2, 3, 4, 5}) constant = constant && stages[i].at(k) == stages[0].at(k);
    for (int k : {0, 1, 6}) growing = growing && stages[i].at(k) > stages[i - 1].at(k);
  }
  return {constant && growing, fmt::format("stages 3-6 constant: {}; stages 1/2/7 strictly growing: {}; {}",
                                           constant ? "yes" : "no", growing ? "yes" : "no", fmt::join(parts, " "))};
}

Verdict determinism() {
  ExperimentConfig config;
  config.workload = WorkloadKind::kSim;
  config.pipeline_counts = {2, 4, 8, 16};
  config.trials = 2;
  config.seed = 99;
  config.backend = Json{{"type", "sim"},
                        {"queue_wait", {{"kind", "UNIFORM"}, {"low", 1.0}, {"high", 20.0}}},
                        {"pull_latency", {{"kind", "UNIFORM"}, {"low", 0.05}, {"high", 0.4}}},
                        {"fs_latency", {{"kind", "NORMAL_TRUNCATED"}, {"mean", 0.1}, {"stddev", 0.05}}},
                        {"duration_noise", {{"kind", "UNIFORM"}, {"low", 0.9}, {"high", 1.1}}}};
  const auto root = scratch("c9");
  config.output_dir = root / "a";
  for (const auto& r : run_experiment(config).reports) keep(r);
  config.output_dir = root / "b";
  for (const auto& r : run_experiment(config).reports) keep(r);
  const auto a = slurp(root / "a/trials.csv");
  const auto b = slurp(root / "b/trials.csv");
  fs::remove_all(root);
  const bool ok = !a.empty() && a == b;
  return {ok, fmt::format("trials.csv {} bytes vs {} bytes, {}", a.size(), b.size(), a == b ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"weak-scaling invariance (sim)", weak_scaling_invariance},
      {"overhead accounting oracle", overhead_accounting},
      {"engine-overhead growth (local null)", engine_overhead_growth},
      {"scheduler brute-force oracle", scheduler_oracle},
      {"local null-workload run", local_null_run},
      {"template fidelity", template_fidelity},
      {"per-stage breakdown shape", per_stage_shape},
      {"determinism", determinism},
      // Last, so it sees every report produced above.
      {"metric identity", metric_identity},
  };
  const std::map<std::string, int> numbers = {
      {"weak-scaling invariance (sim)", 1}, {"metric identity", 2},        {"overhead accounting oracle", 3},
      {"engine-overhead growth (local null)", 4}, {"scheduler brute-force oracle", 5}, {"local null-workload run", 6},
      {"template fidelity", 7},           {"per-stage breakdown shape", 8}, {"determinism", 9},
  };

  std::map<int, std::string> lines;
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !v.pass;
    lines[numbers.at(name)] = fmt::format("{} {}: {} -- {}", v.pass ? "PASS" : "FAIL", numbers.at(name), name, v.detail);
  }
  for (const auto& [n, line] : lines) std::puts(line.c_str());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
