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

#include "pilotflow/event_loop.hpp"

namespace pilotflow {

void SimulatedLoop::post_at(Seconds t, Callback fn) {
  queue_.push(Entry{t < now_ ? now_ : t, seq_++, std::move(fn)});
}

void SimulatedLoop::run() {
  stopped_ = false;
  while (!stopped_ && !queue_.empty()) {
    // priority_queue::top is const; the callback is moved out before pop.
    auto entry = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    now_ = entry.time;
    entry.fn();
  }
}

void SimulatedLoop::reset() {
  queue_ = {};
  now_ = 0.0;
  seq_ = 0;
  stopped_ = false;
}

RealtimeLoop::RealtimeLoop() : origin_(Clock::now()) {}

Seconds RealtimeLoop::now() const {
  std::chrono::duration<double> elapsed = Clock::now() - origin_;
  return elapsed.count();
}

void RealtimeLoop::post_at(Seconds t, Callback fn) {
  {
    std::lock_guard lock(mutex_);
    queue_.push(Entry{t, seq_++, std::move(fn)});
  }
  wake_.notify_one();
}

void RealtimeLoop::run() {
  std::unique_lock lock(mutex_);
  stopped_ = false;
  while (!stopped_) {
    if (queue_.empty()) {
      if (outstanding_ == 0) break;
      wake_.wait(lock);
      continue;
    }
    const Seconds due = queue_.top().time;
    const Seconds current = now();
    if (due > current) {
      wake_.wait_for(lock, std::chrono::duration<double>(due - current));
      continue;
    }
    auto entry = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    lock.unlock();
    entry.fn();
    lock.lock();
  }
}

void RealtimeLoop::stop() {
  {
    std::lock_guard lock(mutex_);
    stopped_ = true;
  }
  wake_.notify_all();
}

void RealtimeLoop::reset() {
  std::lock_guard lock(mutex_);
  queue_ = {};
  seq_ = 0;
  stopped_ = false;
  origin_ = Clock::now();
}

RealtimeLoop::WorkGuard::WorkGuard(RealtimeLoop& loop) : loop_(loop) {
  std::lock_guard lock(loop_.mutex_);
  ++loop_.outstanding_;
}

RealtimeLoop::WorkGuard::~WorkGuard() {
  {
    std::lock_guard lock(loop_.mutex_);
    --loop_.outstanding_;
  }
  loop_.wake_.notify_all();
}

}  // namespace pilotflow
