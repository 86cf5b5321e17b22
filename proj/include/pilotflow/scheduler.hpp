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
#include <optional>
#include <string>
#include <vector>

#include "pilotflow/unit.hpp"

namespace pilotflow {

/// Occupancy of the pilot's cores, addressed 0..total-1.
class CoreMap {
 public:
  explicit CoreMap(int total);
  /// `busy[i]` marks core i as occupied.
  static CoreMap from_mask(const std::vector<bool>& busy);

  int total() const { return static_cast<int>(busy_.size()); }
  int free() const { return total() - used_; }
  bool is_free(int core) const { return !busy_.at(static_cast<std::size_t>(core)); }

  /// Lowest offset of `cores` contiguous free cores.
  std::optional<int> first_fit(int cores) const;

  /// Both throw std::logic_error when the range is out of bounds or not in the
  /// expected state.
  void occupy(int offset, int cores);
  void release(int offset, int cores);

 private:
  std::vector<bool> busy_;
  int used_ = 0;
};

struct Placement {
  std::string unit_id;
  int core_offset = 0;
  int cores = 0;
  Seconds start_time = 0.0;

  bool operator==(const Placement&) const = default;
};

struct ScheduleResult {
  std::vector<Placement> placements;
  /// Units whose request exceeds the pilot; removed from the ready queue.
  std::vector<UnitDescription> unschedulable;
};

/// FIFO first-fit. Ready units are scanned in order; each one that fits is
/// placed at the lowest free offset and removed from `ready`. A unit that does
/// not fit stays queued, and so does every later unit of the same
/// (pipeline, stage): units of one stage never overtake each other, while
/// units of other stages may backfill. Placed ranges are marked in `cores`.
ScheduleResult schedule(std::deque<UnitDescription>& ready, CoreMap& cores, Seconds now);

}  // namespace pilotflow
