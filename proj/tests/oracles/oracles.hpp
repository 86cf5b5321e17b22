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

// Independent reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond its plain data types.

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pilotflow/unit.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow::oracle {

struct OracleUnit {
  std::string id;
  int cores = 1;
  int pipeline = 0;
  int stage = 0;
};

struct OraclePlacement {
  std::string id;
  int offset = 0;
  int cores = 0;
  bool operator==(const OraclePlacement&) const = default;
};

struct OracleSchedule {
  std::vector<OraclePlacement> placed;     // in ready-queue order
  std::vector<std::string> waiting;        // in ready-queue order
  std::vector<std::string> unschedulable;  // in ready-queue order
};

// FIFO first-fit stated as an optimization problem and solved by exhaustive
// search: every unit is either left waiting or given an offset, ranges must
// be disjoint and on free cores, and once a unit of a (pipeline, stage) is
// left waiting every later unit of that group waits too. Among all valid
// assignments, pick the lexicographically smallest vector of per-unit values
// (offset when placed, `total` when waiting).
inline OracleSchedule brute_force_schedule(const std::vector<OracleUnit>& ready, std::vector<bool> busy) {
  const int total = static_cast<int>(busy.size());
  OracleSchedule out;
  std::vector<OracleUnit> units;
  for (const auto& u : ready) {
    if (u.cores > total) out.unschedulable.push_back(u.id);
    else units.push_back(u);
  }

  const std::size_t n = units.size();
  std::vector<int> current(n, total);
  std::vector<int> best;
  std::map<std::pair<int, int>, bool> held;

  const auto better = [&](const std::vector<int>& a, const std::vector<int>& b) {
    return b.empty() || std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };

  // Branch and bound: a prefix already lexicographically above the best
  // complete assignment cannot lead to a better one.
  const auto dominated = [&](std::size_t i) {
    if (best.empty()) return false;
    return std::lexicographical_compare(best.begin(), best.begin() + static_cast<long>(i) + 1, current.begin(),
                                        current.begin() + static_cast<long>(i) + 1);
  };

  auto search = [&](auto&& self, std::size_t i, std::map<std::pair<int, int>, bool>& hold) -> void {
    if (i == n) {
      if (better(current, best)) best = current;
      return;
    }
    const auto& u = units[i];
    const auto group = std::make_pair(u.pipeline, u.stage);
    const bool group_held = hold[group];
    if (!group_held) {
      for (int off = 0; off + u.cores <= total; ++off) {
        bool free = true;
        for (int c = off; c < off + u.cores; ++c) free = free && !busy[static_cast<std::size_t>(c)];
        if (!free) continue;
        for (int c = off; c < off + u.cores; ++c) busy[static_cast<std::size_t>(c)] = true;
        current[i] = off;
        if (!dominated(i)) self(self, i + 1, hold);
        for (int c = off; c < off + u.cores; ++c) busy[static_cast<std::size_t>(c)] = false;
      }
    }
    current[i] = total;
    if (dominated(i)) return;
    const bool before = hold[group];
    hold[group] = true;
    self(self, i + 1, hold);
    hold[group] = before;
  };
  search(search, 0, held);

  for (std::size_t i = 0; i < n; ++i) {
    if (best[i] < total) out.placed.push_back({units[i].id, best[i], units[i].cores});
    else out.waiting.push_back(units[i].id);
  }
  return out;
}

// Makespan after pilot activation when every task starts the moment its stage
// is released and nothing costs time but execution: the longest pipeline's sum
// of per-stage longest task durations.
inline Seconds analytical_makespan(const Workflow& workflow) {
  Seconds makespan = 0.0;
  for (const auto& p : workflow.pipelines) {
    Seconds total = 0.0;
    for (const auto& s : p.stages) {
      Seconds longest = 0.0;
      for (const auto& t : s.tasks) longest = std::max(longest, t.expected_duration);
      total += longest;
    }
    makespan = std::max(makespan, total);
  }
  return makespan;
}

}  // namespace pilotflow::oracle
