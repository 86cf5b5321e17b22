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

#include <sys/types.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pilotflow/backend.hpp"
#include "pilotflow/json_io.hpp"

namespace pilotflow {

struct LocalBackendConfig {
  /// Execution slots modeled as cores; 0 means the host's logical CPU count.
  int cores = 0;
  /// Sandboxes go to workdir/run-NNN/<pipeline>; empty means a fresh
  /// directory under the system temp dir.
  std::filesystem::path workdir;
  /// Relative sources of COPY_IN/TAR_IN directives resolve here.
  std::filesystem::path input_root = ".";
  /// Relative targets of COPY_OUT/TAR_OUT directives resolve here; empty
  /// means workdir/outputs.
  std::filesystem::path output_root;
  /// Injected store latency per pull (e.g. a remote database).
  LatencyModel pull_latency = LatencyModel::constant(0.0, 2);
  std::uint64_t seed = 0;

  int effective_cores() const;
};

Json to_json(const LocalBackendConfig& config);
LocalBackendConfig local_config_from_json(const Json& json);

struct LocalRunOptions {
  std::filesystem::path input_root = ".";
  std::filesystem::path output_root = ".";
  /// Timestamp source; defaults to the steady clock in seconds since its epoch.
  std::function<Seconds()> clock;
  /// Called with every child pid right after it is spawned.
  std::function<void(pid_t)> on_spawn;
};

struct LocalRunResult {
  bool ok = false;
  int exit_code = -1;
  /// Taken just before the spawn and just after the child is reaped.
  Seconds start = 0.0;
  Seconds end = 0.0;
  std::string diagnostic;
};

/// Runs one unit in `sandbox`: writes and re-reads its description, performs
/// input staging, runs the executable (SIMULATED units sleep for their
/// expected duration), performs output staging. Each phase is reported
/// synchronously through `on_phase`. Never throws for unit-level failures.
LocalRunResult local_run(const UnitDescription& unit, const std::filesystem::path& sandbox,
                         const LocalRunOptions& options = {}, const PhaseCallback& on_phase = {});

/// Runs `args` (PATH lookup on args[0]) in `cwd` with output discarded and
/// returns its exit status, 128+signal if killed. Throws Error when the
/// program cannot be started.
int run_command(const std::vector<std::string>& args, const std::filesystem::path& cwd);

/// Runs units as concurrent OS processes, one worker thread per unit.
class LocalBackend final : public Backend {
 public:
  explicit LocalBackend(LocalBackendConfig config = {});
  ~LocalBackend() override;

  std::string_view name() const override { return "local"; }
  int capacity_cores() const override { return cores_; }
  EventLoop& loop() override { return loop_; }

  void begin_run(const Workflow& workflow) override;
  void end_run() override;

  Seconds sample_queue_wait() override { return 0.0; }
  LatencySampler make_pull_sampler() override;
  Seconds sample_translate_cost() override { return 0.0; }

  void execute(const UnitDescription& unit, const Placement& placement, PhaseCallback report) override;
  void cancel_all() override;

  const std::filesystem::path& run_dir() const { return run_dir_; }
  const std::filesystem::path& output_root() const { return output_root_; }

 private:
  void join_workers();

  LocalBackendConfig config_;
  int cores_ = 1;
  RealtimeLoop loop_;
  std::filesystem::path workdir_;
  std::filesystem::path run_dir_;
  std::filesystem::path output_root_;
  int runs_ = 0;

  std::mutex mutex_;
  std::vector<std::thread> workers_;
  std::map<std::string, pid_t> live_pids_;
  std::atomic<std::uint64_t> generation_{0};
};

}  // namespace pilotflow
