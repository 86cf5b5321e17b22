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

#include "pilotflow/engine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <unordered_map>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"
#include "pilotflow/pilot.hpp"
#include "pilotflow/scheduler.hpp"
#include "pilotflow/task_state.hpp"
#include "pilotflow/task_store.hpp"
#include "pilotflow/unit.hpp"

namespace pilotflow {

namespace {

class Run {
 public:
  Run(const Workflow& workflow, const ResourceRequest& request, Backend& backend, ProfileSink& sink,
      const RunOptions& options)
      : workflow_(workflow),
        request_(request),
        backend_(backend),
        sink_(sink),
        loop_(backend.loop()),
        options_(options),
        cores_(request.cores) {
    if (options_.max_bulk == 0) throw std::invalid_argument("max_bulk must be positive");
    const auto& pipelines = workflow_.pipelines;
    pipeline_state_.assign(pipelines.size(), PipelineState::kNew);
    current_stage_.assign(pipelines.size(), 0);
    stage_ids_.resize(pipelines.size());
    for (std::size_t p = 0; p < pipelines.size(); ++p) {
      for (const auto& stage : pipelines[p].stages) {
        auto& ids = stage_ids_[p].emplace_back();
        for (const auto& task : stage.tasks) {
          ids.push_back(task.id);
          tasks_.emplace(task.id, Slot{TaskRecord{task.id, {}, static_cast<int>(p), stage.index, TaskState::kNew, {}},
                                       &task});
        }
      }
    }
  }

  RunReport execute() {
    backend_.begin_run(workflow_);
    store_.emplace(backend_.make_pull_sampler());
    PilotDescription desc{request_.cores, request_.walltime, request_.queue_name};
    pilot_ = submit_pilot(desc, backend_, &sink_, [this](Pilot& pilot) { on_active(pilot); });
    loop_.run();
    backend_.end_run();
    if (pilot_failed_) throw PilotFailure(fmt::format("pilot {} failed at t={}s", pilot_->id, *pilot_->end_time));

    RunReport report = compute_report(sink_.events());
    report.trial_id = options_.trial_id;
    report.workload = options_.workload;
    report.config_digest = options_.config_digest;
    report.cores = request_.cores;
    report.failures = failures_;
    return report;
  }

 private:
  struct Slot {
    TaskRecord record;
    const TaskSpec* task;
  };

  // ---- pilot lifecycle ----

  void on_active(Pilot& pilot) {
    const Seconds t = *pilot.active_time;
    loop_.post_at(t + pilot.description.walltime, [this] { terminate(EventName::kPilotDone); });
    if (auto after = backend_.pilot_failure_after())
      loop_.post_at(t + *after, [this] { terminate(EventName::kPilotFailed); });
    for (std::size_t p = 0; p < workflow_.pipelines.size(); ++p) {
      pipeline_state_[p] = advance_pipeline_state(pipeline_state_[p], PipelineState::kActive);
      stage_requests_.push_back(static_cast<int>(p));
    }
    wake_wfm();
  }

  // Walltime or pilot death: stop everything still running and close the run.
  void terminate(EventName pilot_event) {
    if (finished_) return;
    const Seconds t = loop_.now();
    backend_.cancel_all();
    if (pull_open_) {
      sink_.emit(t, kAgentEntity, EventName::kPullEnd);
      pull_open_ = false;
    }
    for (auto& [id, slot] : tasks_) {
      if (is_terminal(slot.record.state)) continue;
      slot.record = advance_task_state(slot.record, LifecycleEvent::kCanceled, t, sink_);
      if (auto it = placements_.find(slot.record.unit_id); it != placements_.end()) {
        cores_.release(it->second.core_offset, it->second.cores);
        placements_.erase(it);
      }
    }
    for (auto& state : pipeline_state_)
      if (state == PipelineState::kActive) state = PipelineState::kFailed;
    pilot_failed_ = pilot_event == EventName::kPilotFailed;
    finish(pilot_event, pilot_failed_ ? PilotState::kFailed : PilotState::kDone);
  }

  void finish(EventName pilot_event, PilotState state) {
    finished_ = true;
    pilot_->state = state;
    pilot_->end_time = loop_.now();
    sink_.emit(*pilot_->end_time, pilot_->id, pilot_event);
    loop_.stop();
  }

  void maybe_finish() {
    if (finished_ || live_units_ > 0) return;
    const bool all_terminal = std::all_of(pipeline_state_.begin(), pipeline_state_.end(), [](PipelineState s) {
      return s == PipelineState::kDone || s == PipelineState::kFailed;
    });
    if (all_terminal) finish(EventName::kPilotDone, PilotState::kDone);
  }

  // ---- workflow manager ----

  void wake_wfm() {
    if (wfm_scheduled_ || finished_) return;
    wfm_scheduled_ = true;
    loop_.post_at(std::max(loop_.now(), wfm_busy_until_), [this] {
      wfm_scheduled_ = false;
      wfm_step();
    });
  }

  void wfm_step() {
    if (finished_) return;
    while (!completions_.empty()) {
      const auto task_id = std::move(completions_.front());
      completions_.pop_front();
      on_task_terminal(tasks_.at(task_id).record);
    }
    while (!stage_requests_.empty()) {
      const int p = stage_requests_.front();
      stage_requests_.pop_front();
      translate_stage(p);
    }
    maybe_finish();
  }

  void on_task_terminal(const TaskRecord& record) {
    const auto p = static_cast<std::size_t>(record.pipeline);
    if (pipeline_state_[p] != PipelineState::kActive || current_stage_[p] != record.stage) return;
    const auto& ids = stage_ids_[p][static_cast<std::size_t>(record.stage)];
    bool any_failed = false;
    for (const auto& id : ids) {
      const auto state = tasks_.at(id).record.state;
      if (!is_terminal(state)) return;
      any_failed = any_failed || state != TaskState::kDone;
    }
    if (any_failed) {
      pipeline_state_[p] = advance_pipeline_state(pipeline_state_[p], PipelineState::kFailed);
      const Seconds t = loop_.now();
      for (auto& stage : stage_ids_[p])
        for (const auto& id : stage) {
          auto& slot = tasks_.at(id);
          if (slot.record.state == TaskState::kNew)
            slot.record = advance_task_state(slot.record, LifecycleEvent::kCanceled, t, sink_);
        }
      return;
    }
    if (static_cast<std::size_t>(record.stage) + 1 < stage_ids_[p].size()) {
      ++current_stage_[p];
      stage_requests_.push_back(static_cast<int>(p));
    } else {
      pipeline_state_[p] = advance_pipeline_state(pipeline_state_[p], PipelineState::kDone);
    }
  }

  // Translation is sequential: each task's interval starts where the previous
  // one ended, and the modeled cost (zero on real backends) is added on top of
  // the time the translation itself took.
  void translate_stage(int p) {
    const auto& stage = workflow_.pipelines[static_cast<std::size_t>(p)].stages[static_cast<std::size_t>(
        current_stage_[static_cast<std::size_t>(p)])];
    Seconds cursor = std::max(wfm_busy_until_, loop_.now());
    std::vector<UnitDescription> units;
    units.reserve(stage.tasks.size());
    for (const auto& task : stage.tasks) {
      auto& slot = tasks_.at(task.id);
      cursor = std::max(cursor, loop_.now());
      sink_.emit(cursor, task.id, EventName::kTranslateBegin, p, stage.index);
      auto unit = translator_.translate_task(task, p, stage.index);
      cursor = std::max(cursor, loop_.now()) + backend_.sample_translate_cost();
      slot.record.unit_id = unit.unit_id;
      slot.record = advance_task_state(slot.record, LifecycleEvent::kTranslated, cursor, sink_);
      unit_task_[unit.unit_id] = task.id;
      units.push_back(std::move(unit));
    }
    wfm_busy_until_ = cursor;
    loop_.post_at(cursor, [this, units = std::move(units)]() mutable { enqueue(std::move(units)); });
  }

  void enqueue(std::vector<UnitDescription> units) {
    if (finished_) return;
    sink_.emit(loop_.now(), kWorkflowManagerEntity, EventName::kEnqueueBegin);
    store_->push(std::move(units));
    sink_.emit(loop_.now(), kWorkflowManagerEntity, EventName::kEnqueueEnd);
    kick_em();
  }

  // ---- execution manager ----

  void kick_em() {
    if (em_scheduled_ || finished_) return;
    em_scheduled_ = true;
    loop_.post([this] {
      em_scheduled_ = false;
      em_step();
    });
  }

  void em_step() {
    if (finished_ || pilot_->state != PilotState::kActive) return;
    if (!pull_open_ && store_->pending() > 0) start_pull();
    schedule_ready();
  }

  void start_pull() {
    pull_open_ = true;
    sink_.emit(loop_.now(), kAgentEntity, EventName::kPullBegin);
    auto pulled = store_->pull(options_.max_bulk);
    loop_.post_at(loop_.now() + pulled.latency, [this, units = std::move(pulled.units)]() mutable {
      if (finished_) return;
      sink_.emit(loop_.now(), kAgentEntity, EventName::kPullEnd);
      pull_open_ = false;
      for (auto& unit : units) {
        ready_.push_back(unit);
        units_.emplace(unit.unit_id, std::move(unit));
      }
      schedule_ready();
      kick_em();
    });
  }

  void schedule_ready() {
    if (ready_.empty() || finished_) return;
    const Seconds now = loop_.now();
    sink_.emit(now, kAgentEntity, EventName::kScheduleBegin);
    auto result = schedule(ready_, cores_, now);
    sink_.emit(loop_.now(), kAgentEntity, EventName::kScheduleEnd);

    for (const auto& unit : result.unschedulable) {
      fail_task(unit_task_.at(unit.unit_id),
                fmt::format("unschedulable: unit needs {} cores, pilot has {}", unit.cores, cores_.total()));
    }
    for (const auto& placement : result.placements) {
      auto& slot = tasks_.at(unit_task_.at(placement.unit_id));
      slot.record = advance_task_state(slot.record, LifecycleEvent::kScheduled, now, sink_);
      placements_.emplace(placement.unit_id, placement);
      ++live_units_;
      backend_.execute(units_.at(placement.unit_id), placement,
                       [this, id = placement.unit_id](const UnitPhase& phase) { on_phase(id, phase); });
    }
  }

  void on_phase(const std::string& unit_id, const UnitPhase& phase) {
    if (finished_) return;
    auto& slot = tasks_.at(unit_task_.at(unit_id));
    auto& rec = slot.record;
    const auto emit = [&](EventName name) { sink_.emit(phase.time, rec.task_id, name, rec.pipeline, rec.stage); };
    using Kind = UnitPhase::Kind;
    switch (phase.kind) {
      case Kind::kUnitIoBegin: emit(EventName::kUnitIoBegin); break;
      case Kind::kUnitIoEnd: emit(EventName::kUnitIoEnd); break;
      case Kind::kStageInBegin:
        rec = advance_task_state(rec, LifecycleEvent::kStagingStarted, phase.time, sink_);
        break;
      case Kind::kStageInEnd: emit(EventName::kStageInEnd); break;
      case Kind::kExecBegin: rec = advance_task_state(rec, LifecycleEvent::kExecStarted, phase.time, sink_); break;
      case Kind::kExecEnd: rec = advance_task_state(rec, LifecycleEvent::kCompleted, phase.time, sink_); break;
      case Kind::kStageOutBegin: emit(EventName::kStageOutBegin); break;
      case Kind::kStageOutEnd: emit(EventName::kStageOutEnd); break;
      case Kind::kDone:
        rec = advance_task_state(rec, LifecycleEvent::kStagedOut, phase.time, sink_);
        unit_finished(unit_id, rec.task_id);
        break;
      case Kind::kFailed:
        rec.diagnostic = phase.diagnostic;
        rec = advance_task_state(rec, LifecycleEvent::kFailed, phase.time, sink_);
        failures_.push_back(fmt::format("{}: {}", rec.task_id, phase.diagnostic));
        unit_finished(unit_id, rec.task_id);
        break;
    }
  }

  void unit_finished(const std::string& unit_id, const std::string& task_id) {
    const auto& placement = placements_.at(unit_id);
    cores_.release(placement.core_offset, placement.cores);
    placements_.erase(unit_id);
    store_->mark_completed(unit_id);
    --live_units_;
    completions_.push_back(task_id);
    wake_wfm();
    kick_em();
  }

  void fail_task(const std::string& task_id, std::string diagnostic) {
    auto& rec = tasks_.at(task_id).record;
    rec.diagnostic = diagnostic;
    rec = advance_task_state(rec, LifecycleEvent::kFailed, loop_.now(), sink_);
    failures_.push_back(fmt::format("{}: {}", task_id, diagnostic));
    completions_.push_back(task_id);
    wake_wfm();
  }

  const Workflow& workflow_;
  const ResourceRequest& request_;
  Backend& backend_;
  ProfileSink& sink_;
  EventLoop& loop_;
  RunOptions options_;

  std::shared_ptr<Pilot> pilot_;
  bool finished_ = false;
  bool pilot_failed_ = false;

  std::unordered_map<std::string, Slot> tasks_;
  std::vector<std::vector<std::vector<std::string>>> stage_ids_;
  std::vector<PipelineState> pipeline_state_;
  std::vector<int> current_stage_;
  std::unordered_map<std::string, std::string> unit_task_;

  // workflow manager
  UnitTranslator translator_;
  std::deque<std::string> completions_;
  std::deque<int> stage_requests_;
  bool wfm_scheduled_ = false;
  Seconds wfm_busy_until_ = 0.0;

  // execution manager
  std::optional<TaskStore> store_;
  CoreMap cores_;
  std::deque<UnitDescription> ready_;
  std::unordered_map<std::string, UnitDescription> units_;
  std::map<std::string, Placement> placements_;
  bool em_scheduled_ = false;
  bool pull_open_ = false;
  int live_units_ = 0;
  std::vector<std::string> failures_;
};

}  // namespace

RunReport run_workflow(const Workflow& workflow, const ResourceRequest& request, Backend& backend, ProfileSink& sink,
                       const RunOptions& options) {
  if (auto result = validate_workflow(workflow); !result.ok()) throw ValidationError(result.violations);
  PilotDescription{request.cores, request.walltime, request.queue_name}.validate();
  Run run(workflow, request, backend, sink, options);
  return run.execute();
}

}  // namespace pilotflow
