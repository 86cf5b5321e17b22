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

#include <deque>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "pilotflow/latency.hpp"
#include "pilotflow/unit.hpp"

namespace pilotflow {

/// In-process stand-in for the unit database between the workflow manager
/// and the pilot agent. Every pull call is charged one latency sample,
/// regardless of how many units it returns.
class TaskStore {
 public:
  explicit TaskStore(LatencySampler pull_latency = {});

  struct Pull {
    std::vector<UnitDescription> units;
    Seconds latency = 0.0;
  };

  /// Bulk insert, preserving order. Throws std::invalid_argument on a unit id
  /// that was already inserted.
  void push(std::vector<UnitDescription> units);

  /// Up to `max_bulk` units in insertion order. `max_bulk` must be positive.
  Pull pull(std::size_t max_bulk);

  void mark_completed(const std::string& unit_id);

  std::size_t pending() const;
  std::size_t pull_calls() const;
  std::size_t pulled() const;
  Seconds charged_latency() const;
  bool is_completed(const std::string& unit_id) const;
  std::size_t completed() const;

 private:
  mutable std::mutex mutex_;
  std::deque<UnitDescription> pending_;
  std::set<std::string> known_;
  std::set<std::string> completed_;
  LatencySampler latency_;
  std::size_t pull_calls_ = 0;
  std::size_t pulled_ = 0;
};

}  // namespace pilotflow
