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

#include <cmath>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "pilotflow/errors.hpp"
#include "pilotflow/latency.hpp"
#include "pilotflow/profile.hpp"

namespace pilotflow {
namespace {

TEST(ProfileSink, OrdersByTimeStableOnTies) {
  ProfileSink sink;
  sink.emit(2.0, "a", EventName::kDone);
  sink.emit(1.0, "b", EventName::kExecBegin);
  sink.emit(2.0, "c", EventName::kFailed);
  sink.emit(1.0, "d", EventName::kExecEnd);
  const auto events = sink.events();
  std::vector<std::string> order;
  for (const auto& e : events) order.push_back(e.entity);
  EXPECT_EQ(order, (std::vector<std::string>{"b", "d", "a", "c"}));
}

TEST(ProfileSink, ConcurrentProducersLoseNothing) {
  ProfileSink sink;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 1000; ++i) sink.emit(i * 0.001, fmt::format("w{}", t), EventName::kSchedule);
    });
  for (auto& th : threads) th.join();
  const auto events = sink.events();
  EXPECT_EQ(events.size(), 4000u);
  EXPECT_TRUE(std::is_sorted(events.begin(), events.end(), [](auto& a, auto& b) { return a.time < b.time; }));
}

TEST(EventLogCsv, RoundTripIsExact) {
  EventLog log = {{0.0, "pilot.0000", EventName::kSubmit},
                  {0.1 + 0.2, "agent", EventName::kPullBegin},
                  {1e-17, "x", EventName::kCanceled},
                  {12345.678901234567, "esmacs-p0-s3", EventName::kStageOutEnd}};
  std::ostringstream out;
  write_event_log_csv(out, log);
  EXPECT_EQ(out.str().substr(0, 20), "time_s,entity,event\n");
  std::istringstream in(out.str());
  const auto back = read_event_log_csv(in);
  ASSERT_EQ(back.size(), log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(back[i].time, log[i].time);
    EXPECT_EQ(back[i].entity, log[i].entity);
    EXPECT_EQ(back[i].name, log[i].name);
  }
}

TEST(EventLogCsv, RejectsUnknownEvent) {
  std::istringstream in("time_s,entity,event\n1,a,launch\n");
  EXPECT_THROW(read_event_log_csv(in), ConfigError);
  std::istringstream no_header("1,a,done\n");
  EXPECT_THROW(read_event_log_csv(no_header), ConfigError);
}

TEST(EventName, EveryNameRoundTrips) {
  for (int i = 0; i <= static_cast<int>(EventName::kCanceled); ++i) {
    const auto name = static_cast<EventName>(i);
    EXPECT_EQ(parse_event_name(to_string(name)), name);
  }
  EXPECT_FALSE(parse_event_name("bogus"));
  EXPECT_TRUE(is_task_terminal(EventName::kCanceled));
  EXPECT_FALSE(is_task_terminal(EventName::kExecEnd));
}

TEST(Latency, ConstantReadsBack) {
  LatencySampler s(LatencyModel::constant(0.2), 1);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s.sample(), 0.2);
  EXPECT_EQ(s.draws(), 4u);
  EXPECT_DOUBLE_EQ(s.total(), 0.8);
}

TEST(Latency, SameSeedAndStreamSameSequence) {
  for (auto model : {LatencyModel::uniform(0.1, 0.9, 3), LatencyModel::normal_truncated(0.5, 0.4, 3)}) {
    LatencySampler a(model, 42), b(model, 42), c(model, 43);
    LatencySampler d(LatencyModel{model.kind, model.value, model.low, model.high, model.mean, model.stddev, 4}, 42);
    bool differs_seed = false, differs_stream = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a.sample();
      EXPECT_EQ(x, b.sample());
      differs_seed = differs_seed || x != c.sample();
      differs_stream = differs_stream || x != d.sample();
    }
    EXPECT_TRUE(differs_seed);
    EXPECT_TRUE(differs_stream);
  }
}

TEST(Latency, SamplesAreNonnegativeAndInRange) {
  LatencySampler u(LatencyModel::uniform(0.5, 1.5), 7);
  LatencySampler n(LatencyModel::normal_truncated(0.0, 1.0), 7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto x = u.sample();
    EXPECT_GE(x, 0.5);
    EXPECT_LE(x, 1.5);
    const auto y = n.sample();
    EXPECT_GE(y, 0.0);
    sum += y;
  }
  // Half-normal mean sqrt(2/pi).
  EXPECT_NEAR(sum / 20000.0, std::sqrt(2.0 / M_PI), 0.02);
  EXPECT_NEAR(LatencyModel::normal_truncated(0.0, 1.0).expected(), std::sqrt(2.0 / M_PI), 1e-9);
  EXPECT_DOUBLE_EQ(LatencyModel::uniform(1.0, 3.0).expected(), 2.0);
}

TEST(Latency, InvalidParametersRejected) {
  EXPECT_THROW(LatencyModel::constant(-1.0).validate(), ValidationError);
  EXPECT_THROW(LatencyModel::uniform(2.0, 1.0).validate(), ValidationError);
  EXPECT_THROW(LatencyModel::normal_truncated(1.0, -0.1).validate(), ValidationError);
}

TEST(Latency, JsonForms) {
  EXPECT_EQ(latency_from_json(Json(0.25), "x", 9), LatencyModel::constant(0.25, 9));
  const auto u = latency_from_json(Json{{"kind", "UNIFORM"}, {"low", 1}, {"high", 2}, {"stream", 3}}, "x", 9);
  EXPECT_EQ(u, LatencyModel::uniform(1, 2, 3));
  EXPECT_EQ(latency_from_json(to_json(u), "x", 0), u);
  EXPECT_THROW(latency_from_json(Json{{"kind", "POISSON"}}, "x", 0), ConfigError);
}

}  // namespace
}  // namespace pilotflow
