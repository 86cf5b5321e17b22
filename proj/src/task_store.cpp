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

#include "pilotflow/task_store.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace pilotflow {

TaskStore::TaskStore(LatencySampler pull_latency) : latency_(std::move(pull_latency)) {}

void TaskStore::push(std::vector<UnitDescription> units) {
  std::lock_guard lock(mutex_);
  for (const auto& unit : units)
    if (known_.count(unit.unit_id)) throw std::invalid_argument(fmt::format("unit {} inserted twice", unit.unit_id));
  for (auto& unit : units) {
    known_.insert(unit.unit_id);
    pending_.push_back(std::move(unit));
  }
}

TaskStore::Pull TaskStore::pull(std::size_t max_bulk) {
  if (max_bulk == 0) throw std::invalid_argument("pull: max_bulk must be positive");
  std::lock_guard lock(mutex_);
  Pull result;
  const auto n = std::min(max_bulk, pending_.size());
  result.units.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.units.push_back(std::move(pending_.front()));
    pending_.pop_front();
  }
  result.latency = latency_.sample();
  ++pull_calls_;
  pulled_ += n;
  return result;
}

void TaskStore::mark_completed(const std::string& unit_id) {
  std::lock_guard lock(mutex_);
  if (!known_.count(unit_id)) throw std::invalid_argument(fmt::format("unknown unit {}", unit_id));
  completed_.insert(unit_id);
}

std::size_t TaskStore::pending() const {
  std::lock_guard lock(mutex_);
  return pending_.size();
}

std::size_t TaskStore::pull_calls() const {
  std::lock_guard lock(mutex_);
  return pull_calls_;
}

std::size_t TaskStore::pulled() const {
  std::lock_guard lock(mutex_);
  return pulled_;
}

Seconds TaskStore::charged_latency() const {
  std::lock_guard lock(mutex_);
  return latency_.total();
}

bool TaskStore::is_completed(const std::string& unit_id) const {
  std::lock_guard lock(mutex_);
  return completed_.count(unit_id) > 0;
}

std::size_t TaskStore::completed() const {
  std::lock_guard lock(mutex_);
  return completed_.size();
}

}  // namespace pilotflow
