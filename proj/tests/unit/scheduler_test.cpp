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

#include <random>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "../oracles/oracles.hpp"
#include "pilotflow/scheduler.hpp"

namespace pilotflow {
namespace {

UnitDescription unit(std::string id, int cores, int pipeline = 0, int stage = 0) {
  UnitDescription u;
  u.unit_id = std::move(id);
  u.cores = cores;
  u.pipeline = pipeline;
  u.stage = stage;
  return u;
}

std::deque<UnitDescription> units_of(const std::vector<int>& cores) {
  std::deque<UnitDescription> ready;
  for (std::size_t i = 0; i < cores.size(); ++i)
    ready.push_back(unit(fmt::format("u{}", i), cores[i], static_cast<int>(i), 0));
  return ready;
}

TEST(Schedule, EightUnitsOfEightOnSixtyFourCores) {
  CoreMap cores(64);
  auto ready = units_of(std::vector<int>(8, 8));
  const auto result = schedule(ready, cores, 3.0);
  ASSERT_EQ(result.placements.size(), 8u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(result.placements[static_cast<std::size_t>(i)].core_offset, 8 * i);
    EXPECT_EQ(result.placements[static_cast<std::size_t>(i)].start_time, 3.0);
  }
  EXPECT_TRUE(ready.empty());
  EXPECT_EQ(cores.free(), 0);
}

TEST(Schedule, ThirdUnitWaits) {
  CoreMap cores(16);
  auto ready = units_of({8, 8, 8});
  const auto result = schedule(ready, cores, 0.0);
  ASSERT_EQ(result.placements.size(), 2u);
  ASSERT_EQ(ready.size(), 1u);
  EXPECT_EQ(ready.front().unit_id, "u2");
}

TEST(Schedule, OversizedUnitIsUnschedulable) {
  CoreMap cores(8);
  auto ready = units_of({9});
  const auto result = schedule(ready, cores, 0.0);
  EXPECT_TRUE(result.placements.empty());
  ASSERT_EQ(result.unschedulable.size(), 1u);
  EXPECT_TRUE(ready.empty());
}

TEST(Schedule, OtherStagesBackfillButSameStageDoesNotOvertake) {
  CoreMap cores(10);
  std::deque<UnitDescription> ready = {unit("a", 6, 0, 0), unit("b", 6, 0, 0), unit("c", 2, 0, 0),
                                       unit("d", 2, 1, 0)};
  const auto result = schedule(ready, cores, 0.0);
  std::vector<std::string> placed;
  for (const auto& p : result.placements) placed.push_back(p.unit_id);
  EXPECT_EQ(placed, (std::vector<std::string>{"a", "d"}));
  ASSERT_EQ(ready.size(), 2u);
  EXPECT_EQ(ready[0].unit_id, "b");
  EXPECT_EQ(ready[1].unit_id, "c");
}

TEST(Schedule, LowestContiguousOffsetInFragmentedMap) {
  auto cores = CoreMap::from_mask({true, false, true, false, false, true, false, false, false});
  auto ready = units_of({2, 1, 3});
  const auto result = schedule(ready, cores, 0.0);
  ASSERT_EQ(result.placements.size(), 3u);
  EXPECT_EQ(result.placements[0].core_offset, 3);
  EXPECT_EQ(result.placements[1].core_offset, 1);
  EXPECT_EQ(result.placements[2].core_offset, 6);
}

TEST(CoreMap, OccupyReleaseChecks) {
  CoreMap cores(4);
  cores.occupy(1, 2);
  EXPECT_EQ(cores.free(), 2);
  EXPECT_THROW(cores.occupy(2, 1), std::logic_error);
  EXPECT_THROW(cores.release(0, 1), std::logic_error);
  EXPECT_THROW(cores.occupy(3, 2), std::logic_error);
  cores.release(1, 2);
  EXPECT_EQ(cores.free(), 4);
  EXPECT_EQ(cores.first_fit(4), 0);
  EXPECT_FALSE(cores.first_fit(5));
}

// Random sequences of schedule/release never overlap or overcommit.
TEST(Schedule, CoreConservationUnderChurn) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> size(1, 12);
  CoreMap cores(32);
  std::deque<UnitDescription> ready;
  std::vector<Placement> running;
  int next = 0;
  for (int step = 0; step < 2000; ++step) {
    if (rng() % 2 == 0 || running.empty()) {
      ready.push_back(unit(fmt::format("u{}", next++), size(rng), static_cast<int>(rng() % 4), static_cast<int>(rng() % 2)));
      for (auto& p : schedule(ready, cores, step).placements) running.push_back(p);
    } else {
      const auto i = rng() % running.size();
      cores.release(running[i].core_offset, running[i].cores);
      running.erase(running.begin() + static_cast<long>(i));
    }
    std::vector<int> owner(32, -1);
    int used = 0;
    for (std::size_t i = 0; i < running.size(); ++i) {
      for (int c = running[i].core_offset; c < running[i].core_offset + running[i].cores; ++c) {
        ASSERT_EQ(owner[static_cast<std::size_t>(c)], -1);
        owner[static_cast<std::size_t>(c)] = static_cast<int>(i);
      }
      used += running[i].cores;
    }
    ASSERT_LE(used, 32);
    ASSERT_EQ(cores.free(), 32 - used);
  }
}

TEST(Schedule, MatchesBruteForceOracleOnRandomSmallCases) {
  std::mt19937 rng(17);
  for (int round = 0; round < 300; ++round) {
    const int total = 1 + static_cast<int>(rng() % 16);
    std::vector<bool> busy(static_cast<std::size_t>(total));
    for (auto&& b : busy) b = rng() % 4 == 0;
    const int n = 1 + static_cast<int>(rng() % 6);
    std::deque<UnitDescription> ready;
    std::vector<oracle::OracleUnit> oracle_units;
    for (int i = 0; i < n; ++i) {
      auto u = unit(fmt::format("u{}", i), 1 + static_cast<int>(rng() % 9), static_cast<int>(rng() % 3),
                    static_cast<int>(rng() % 2));
      oracle_units.push_back({u.unit_id, u.cores, u.pipeline, u.stage});
      ready.push_back(std::move(u));
    }
    const auto expected = oracle::brute_force_schedule(oracle_units, busy);
    auto cores = CoreMap::from_mask(busy);
    const auto got = schedule(ready, cores, 0.0);
    std::vector<oracle::OraclePlacement> placed;
    for (const auto& p : got.placements) placed.push_back({p.unit_id, p.core_offset, p.cores});
    EXPECT_EQ(placed, expected.placed) << "round " << round;
    std::vector<std::string> waiting, unsched;
    for (const auto& u : ready) waiting.push_back(u.unit_id);
    for (const auto& u : got.unschedulable) unsched.push_back(u.unit_id);
    EXPECT_EQ(waiting, expected.waiting);
    EXPECT_EQ(unsched, expected.unschedulable);
  }
}

}  // namespace
}  // namespace pilotflow
