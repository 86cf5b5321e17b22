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

#include <gtest/gtest.h>

#include "pilotflow/errors.hpp"
#include "pilotflow/task_state.hpp"

namespace pilotflow {
namespace {

TaskRecord record(TaskState state) { return TaskRecord{"t0", "unit.000000", 0, 0, state, {}}; }

TEST(TaskState, NewTranslated) {
  ProfileSink sink;
  const auto r = advance_task_state(record(TaskState::kNew), LifecycleEvent::kTranslated, 1.5, sink);
  EXPECT_EQ(r.state, TaskState::kTranslated);
  const auto events = sink.events();
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0], (ProfileEvent{1.5, "t0", EventName::kTranslateEnd, 0, 0}));
}

TEST(TaskState, ExecutingCompletedGoesToStagingOut) {
  ProfileSink sink;
  EXPECT_EQ(advance_task_state(record(TaskState::kExecuting), LifecycleEvent::kCompleted, 0, sink).state,
            TaskState::kStagingOut);
}

TEST(TaskState, TerminalStatesAbsorb) {
  ProfileSink sink;
  try {
    advance_task_state(record(TaskState::kDone), LifecycleEvent::kScheduled, 0, sink);
    FAIL();
  } catch (const StateMachineError& e) {
    EXPECT_NE(std::string(e.what()).find("illegal transition from terminal state"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("DONE"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("scheduled"), std::string::npos);
  }
  EXPECT_EQ(sink.size(), 0u);
}

const std::vector<LifecycleEvent> kAllEvents = {
    LifecycleEvent::kTranslated,  LifecycleEvent::kScheduled, LifecycleEvent::kStagingStarted,
    LifecycleEvent::kExecStarted, LifecycleEvent::kCompleted, LifecycleEvent::kStagedOut,
    LifecycleEvent::kFailed,      LifecycleEvent::kCanceled};

const std::vector<TaskState> kAllStates = {TaskState::kNew,        TaskState::kTranslated, TaskState::kScheduled,
                                           TaskState::kStagingIn,  TaskState::kExecuting,  TaskState::kStagingOut,
                                           TaskState::kDone,       TaskState::kFailed,     TaskState::kCanceled};

TEST(TaskState, TransitionTable) {
  const std::vector<std::tuple<TaskState, LifecycleEvent, TaskState>> legal = {
      {TaskState::kNew, LifecycleEvent::kTranslated, TaskState::kTranslated},
      {TaskState::kTranslated, LifecycleEvent::kScheduled, TaskState::kScheduled},
      {TaskState::kScheduled, LifecycleEvent::kStagingStarted, TaskState::kStagingIn},
      {TaskState::kStagingIn, LifecycleEvent::kExecStarted, TaskState::kExecuting},
      {TaskState::kExecuting, LifecycleEvent::kCompleted, TaskState::kStagingOut},
      {TaskState::kStagingOut, LifecycleEvent::kStagedOut, TaskState::kDone},
  };
  for (auto s : kAllStates) {
    for (auto e : kAllEvents) {
      std::optional<TaskState> expected;
      for (const auto& [from, ev, to] : legal)
        if (from == s && ev == e) expected = to;
      if (!is_terminal(s) && e == LifecycleEvent::kFailed) expected = TaskState::kFailed;
      if (!is_terminal(s) && e == LifecycleEvent::kCanceled) expected = TaskState::kCanceled;
      EXPECT_EQ(next_state(s, e), expected) << to_string(s) << " / " << to_string(e);
    }
  }
}

// Random walks: legal events never throw, every illegal event throws and
// leaves the record untouched.
TEST(TaskState, RandomSequencesProperty) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, kAllEvents.size() - 1);
  for (int walk = 0; walk < 500; ++walk) {
    ProfileSink sink;
    auto rec = record(TaskState::kNew);
    for (int step = 0; step < 12; ++step) {
      const auto ev = kAllEvents[pick(rng)];
      const auto before = rec;
      const auto emitted = sink.size();
      if (next_state(rec.state, ev)) {
        EXPECT_NO_THROW(rec = advance_task_state(rec, ev, step, sink));
        EXPECT_EQ(sink.size(), emitted + 1);
      } else {
        EXPECT_THROW(advance_task_state(rec, ev, step, sink), StateMachineError);
        EXPECT_EQ(rec, before);
        EXPECT_EQ(sink.size(), emitted);
      }
    }
  }
}

TEST(TaskState, EventNames) {
  EXPECT_EQ(transition_event_name(LifecycleEvent::kScheduled), EventName::kSchedule);
  EXPECT_EQ(transition_event_name(LifecycleEvent::kStagingStarted), EventName::kStageInBegin);
  EXPECT_EQ(transition_event_name(LifecycleEvent::kExecStarted), EventName::kExecBegin);
  EXPECT_EQ(transition_event_name(LifecycleEvent::kCompleted), EventName::kExecEnd);
  EXPECT_EQ(transition_event_name(LifecycleEvent::kStagedOut), EventName::kDone);
  EXPECT_EQ(transition_event_name(LifecycleEvent::kCanceled), EventName::kCanceled);
}

TEST(StageState, DerivedFromTasks) {
  using S = TaskState;
  EXPECT_EQ(derive_stage_state(std::vector{S::kNew, S::kNew}), StageState::kNew);
  EXPECT_EQ(derive_stage_state(std::vector{S::kDone, S::kExecuting}), StageState::kActive);
  EXPECT_EQ(derive_stage_state(std::vector{S::kDone, S::kDone}), StageState::kDone);
  EXPECT_EQ(derive_stage_state(std::vector{S::kDone, S::kFailed}), StageState::kFailed);
  EXPECT_EQ(derive_stage_state(std::vector{S::kCanceled}), StageState::kFailed);
}

TEST(PipelineState, DerivedFromStages) {
  using S = StageState;
  EXPECT_EQ(derive_pipeline_state(std::vector{S::kNew, S::kNew}), PipelineState::kNew);
  EXPECT_EQ(derive_pipeline_state(std::vector{S::kDone, S::kNew}), PipelineState::kActive);
  EXPECT_EQ(derive_pipeline_state(std::vector{S::kDone, S::kDone}), PipelineState::kDone);
  EXPECT_EQ(derive_pipeline_state(std::vector{S::kDone, S::kFailed}), PipelineState::kFailed);
}

TEST(StageState, OnlyForwardTransitions) {
  EXPECT_EQ(advance_stage_state(StageState::kNew, StageState::kActive), StageState::kActive);
  EXPECT_EQ(advance_stage_state(StageState::kActive, StageState::kFailed), StageState::kFailed);
  EXPECT_THROW(advance_stage_state(StageState::kDone, StageState::kActive), StateMachineError);
  EXPECT_THROW(advance_stage_state(StageState::kNew, StageState::kDone), StateMachineError);
  EXPECT_THROW(advance_pipeline_state(PipelineState::kFailed, PipelineState::kDone), StateMachineError);
}

}  // namespace
}  // namespace pilotflow
