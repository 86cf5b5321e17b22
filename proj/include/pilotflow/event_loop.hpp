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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <queue>
#include <vector>

#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// Single-consumer callback loop. All engine actors run on the thread that
/// calls run(); other threads talk to them only through post_at().
class EventLoop {
 public:
  using Callback = std::function<void()>;

  virtual ~EventLoop() = default;

  virtual Seconds now() const = 0;
  /// Runs `fn` on the loop at time `t` (or as soon as possible if `t` has
  /// passed). Callbacks due at the same time run in posting order.
  virtual void post_at(Seconds t, Callback fn) = 0;
  void post(Callback fn) { post_at(now(), std::move(fn)); }

  /// Processes callbacks until stop() or until nothing is left to do.
  virtual void run() = 0;
  virtual void stop() = 0;
  /// Restarts the clock at zero and discards pending callbacks.
  virtual void reset() = 0;
};

/// Discrete-event loop: time jumps to the next due callback. Ties are ordered
/// by insertion, so a run is a pure function of what was posted.
class SimulatedLoop final : public EventLoop {
 public:
  Seconds now() const override { return now_; }
  void post_at(Seconds t, Callback fn) override;
  void run() override;
  void stop() override { stopped_ = true; }
  void reset() override;

  std::size_t pending() const { return queue_.size(); }

 private:
  struct Entry {
    Seconds time;
    std::uint64_t seq;
    Callback fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  Seconds now_ = 0.0;
  std::uint64_t seq_ = 0;
  bool stopped_ = false;
};

/// Wall-clock loop on a monotonic clock, zeroed at construction or reset().
/// Thread-safe posting; worker threads hold a WorkGuard while they may still
/// post, so run() does not return early.
class RealtimeLoop final : public EventLoop {
 public:
  RealtimeLoop();

  Seconds now() const override;
  void post_at(Seconds t, Callback fn) override;
  void run() override;
  void stop() override;
  void reset() override;

  class WorkGuard {
   public:
    explicit WorkGuard(RealtimeLoop& loop);
    ~WorkGuard();
    WorkGuard(const WorkGuard&) = delete;
    WorkGuard& operator=(const WorkGuard&) = delete;

   private:
    RealtimeLoop& loop_;
  };

 private:
  using Clock = std::chrono::steady_clock;
  struct Entry {
    Seconds time;
    std::uint64_t seq;
    Callback fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  Clock::time_point origin_;
  std::uint64_t seq_ = 0;
  int outstanding_ = 0;
  bool stopped_ = false;
};

}  // namespace pilotflow
