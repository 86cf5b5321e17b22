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

#include "pilotflow/scheduler.hpp"

#include <set>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace pilotflow {

CoreMap::CoreMap(int total) {
  if (total < 1) throw std::invalid_argument(fmt::format("core map needs at least one core, got {}", total));
  busy_.assign(static_cast<std::size_t>(total), false);
}

CoreMap CoreMap::from_mask(const std::vector<bool>& busy) {
  CoreMap map(static_cast<int>(busy.size()));
  for (std::size_t i = 0; i < busy.size(); ++i)
    if (busy[i]) map.occupy(static_cast<int>(i), 1);
  return map;
}

std::optional<int> CoreMap::first_fit(int cores) const {
  if (cores < 1 || cores > total()) return std::nullopt;
  int run = 0;
  for (int i = 0; i < total(); ++i) {
    run = busy_[static_cast<std::size_t>(i)] ? 0 : run + 1;
    if (run == cores) return i - cores + 1;
  }
  return std::nullopt;
}

void CoreMap::occupy(int offset, int cores) {
  if (offset < 0 || cores < 1 || offset + cores > total())
    throw std::logic_error(fmt::format("occupy [{}, {}) outside pilot of {} cores", offset, offset + cores, total()));
  for (int i = offset; i < offset + cores; ++i)
    if (busy_[static_cast<std::size_t>(i)]) throw std::logic_error(fmt::format("core {} already occupied", i));
  for (int i = offset; i < offset + cores; ++i) busy_[static_cast<std::size_t>(i)] = true;
  used_ += cores;
}

void CoreMap::release(int offset, int cores) {
  if (offset < 0 || cores < 1 || offset + cores > total())
    throw std::logic_error(fmt::format("release [{}, {}) outside pilot of {} cores", offset, offset + cores, total()));
  for (int i = offset; i < offset + cores; ++i)
    if (!busy_[static_cast<std::size_t>(i)]) throw std::logic_error(fmt::format("core {} was not occupied", i));
  for (int i = offset; i < offset + cores; ++i) busy_[static_cast<std::size_t>(i)] = false;
  used_ -= cores;
}

ScheduleResult schedule(std::deque<UnitDescription>& ready, CoreMap& cores, Seconds now) {
  ScheduleResult result;
  std::deque<UnitDescription> waiting;
  std::set<std::pair<int, int>> blocked;  // (pipeline, stage) with a unit left behind

  for (auto& unit : ready) {
    if (unit.cores > cores.total()) {
      result.unschedulable.push_back(std::move(unit));
      continue;
    }
    const auto group = std::make_pair(unit.pipeline, unit.stage);
    std::optional<int> offset;
    if (!blocked.count(group)) offset = cores.first_fit(unit.cores);
    if (!offset) {
      blocked.insert(group);
      waiting.push_back(std::move(unit));
      continue;
    }
    cores.occupy(*offset, unit.cores);
    result.placements.push_back(Placement{unit.unit_id, *offset, unit.cores, now});
  }
  ready = std::move(waiting);
  return result;
}

}  // namespace pilotflow
