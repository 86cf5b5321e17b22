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

#include "pilotflow/local_backend.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

extern char** environ;

namespace pilotflow {

namespace fs = std::filesystem;

namespace {

Seconds steady_seconds() {
  std::chrono::duration<double> t = std::chrono::steady_clock::now().time_since_epoch();
  return t.count();
}

struct SpawnResult {
  int spawn_errno = 0;
  int exit_code = -1;
};

SpawnResult spawn_and_wait(const std::vector<std::string>& args, const fs::path& cwd, const fs::path& out,
                           const fs::path& err, const LocalRunOptions& options) {
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addchdir_np(&actions, cwd.c_str());

  SpawnResult result;
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    result.spawn_errno = rc;
    return result;
  }
  if (options.on_spawn) options.on_spawn(pid);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
  return result;
}

std::string read_head(const fs::path& path, std::size_t limit = 4096) {
  std::ifstream in(path, std::ios::binary);
  std::string text(limit, '\0');
  in.read(text.data(), static_cast<std::streamsize>(limit));
  text.resize(static_cast<std::size_t>(in.gcount()));
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

fs::path resolve(const fs::path& root, const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? p : root / p;
}

// Runs a helper command (tar) for staging; throws with its stderr on failure.
void run_helper(const std::vector<std::string>& args, const fs::path& sandbox, const std::string& tag,
                const LocalRunOptions& options) {
  const auto out = sandbox / ".units" / (tag + ".staging.out");
  const auto err = sandbox / ".units" / (tag + ".staging.err");
  auto r = spawn_and_wait(args, sandbox, out, err, options);
  if (r.spawn_errno != 0) throw Error(fmt::format("cannot run {}: {}", args[0], std::strerror(r.spawn_errno)));
  if (r.exit_code != 0) throw Error(fmt::format("{} exited with {}: {}", args[0], r.exit_code, read_head(err)));
}

void copy_any(const fs::path& from, const fs::path& to) {
  if (!fs::exists(from)) throw Error(fmt::format("staging source {} does not exist", from.string()));
  if (to.has_parent_path()) fs::create_directories(to.parent_path());
  fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

void stage(const StagingDirective& d, const fs::path& sandbox, const std::string& tag, const LocalRunOptions& options) {
  switch (d.mode) {
    case StagingMode::kCopyIn:
      copy_any(resolve(options.input_root, d.source), sandbox / d.target);
      break;
    case StagingMode::kTarIn: {
      const auto archive = resolve(options.input_root, d.source);
      if (!fs::exists(archive)) throw Error(fmt::format("archive {} does not exist", archive.string()));
      const auto dest = sandbox / d.target;
      fs::create_directories(dest);
      run_helper({"tar", "-xf", fs::absolute(archive).string(), "-C", fs::absolute(dest).string()}, sandbox, tag,
                 options);
      break;
    }
    case StagingMode::kCopyOut:
      copy_any(sandbox / d.source, resolve(options.output_root, d.target));
      break;
    case StagingMode::kTarOut: {
      const auto archive = fs::absolute(resolve(options.output_root, d.target));
      if (!fs::exists(sandbox / d.source))
        throw Error(fmt::format("staging source {} does not exist", (sandbox / d.source).string()));
      if (archive.has_parent_path()) fs::create_directories(archive.parent_path());
      run_helper({"tar", "-cf", archive.string(), "-C", fs::absolute(sandbox).string(), d.source}, sandbox, tag,
                 options);
      break;
    }
  }
}

}  // namespace

int LocalBackendConfig::effective_cores() const {
  if (cores > 0) return cores;
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Json to_json(const LocalBackendConfig& config) {
  return Json{{"type", "local"},
              {"cores", config.cores},
              {"workdir", config.workdir.string()},
              {"input_root", config.input_root.string()},
              {"output_root", config.output_root.string()},
              {"pull_latency", to_json(config.pull_latency)},
              {"seed", config.seed}};
}

LocalBackendConfig local_config_from_json(const Json& json) {
  constexpr std::string_view where = "backend";
  LocalBackendConfig config;
  const auto type = optional_field<std::string>(json, "type", where, "local");
  if (type != "local") throw ConfigError(fmt::format("backend.type: expected 'local', got '{}'", type));
  config.cores = optional_field<int>(json, "cores", where, 0);
  if (config.cores < 0) throw ConfigError("backend.cores: must be >= 0");
  config.workdir = optional_field<std::string>(json, "workdir", where, "");
  config.input_root = optional_field<std::string>(json, "input_root", where, ".");
  config.output_root = optional_field<std::string>(json, "output_root", where, "");
  if (auto it = json.find("pull_latency"); it != json.end() && !it->is_null())
    config.pull_latency = latency_from_json(*it, "backend.pull_latency", 2);
  config.seed = optional_field<std::uint64_t>(json, "seed", where, 0);
  return config;
}

LocalRunResult local_run(const UnitDescription& unit, const fs::path& sandbox, const LocalRunOptions& options,
                         const PhaseCallback& on_phase) {
  using Kind = UnitPhase::Kind;
  const auto clock = options.clock ? options.clock : std::function<Seconds()>(steady_seconds);
  const auto report = [&](Kind kind, int code = 0, std::string diagnostic = {}) {
    if (on_phase) on_phase(UnitPhase{kind, clock(), code, std::move(diagnostic)});
  };
  LocalRunResult result;
  const auto fail = [&](int code, std::string diagnostic) {
    result.ok = false;
    result.exit_code = code;
    result.diagnostic = diagnostic;
    report(Kind::kFailed, code, std::move(diagnostic));
    return result;
  };

  const auto meta = sandbox / ".units";
  try {
    fs::create_directories(meta);
    report(Kind::kUnitIoBegin);
    const auto doc_path = meta / (unit.unit_id + ".json");
    {
      std::ofstream out(doc_path, std::ios::binary | std::ios::trunc);
      out << unit.document;
      if (!out) throw Error(fmt::format("cannot write {}", doc_path.string()));
    }
    std::ifstream in(doc_path, std::ios::binary);
    std::stringstream readback;
    readback << in.rdbuf();
    if (readback.str() != unit.document) throw Error(fmt::format("unit description {} did not read back", unit.unit_id));
    report(Kind::kUnitIoEnd);

    report(Kind::kStageInBegin);
    for (const auto& d : unit.inputs) stage(d, sandbox, unit.unit_id, options);
    report(Kind::kStageInEnd);
  } catch (const std::exception& e) {
    return fail(-1, fmt::format("input staging failed: {}", e.what()));
  }

  std::vector<std::string> args;
  if (unit.kind == TaskKind::kSimulated) {
    args = {"sleep", fmt::format("{}", unit.expected_duration)};
  } else {
    if (unit.executable.empty()) return fail(127, "unit has no executable");
    args.push_back(unit.executable);
    args.insert(args.end(), unit.arguments.begin(), unit.arguments.end());
  }

  const auto out = meta / (unit.unit_id + ".out");
  const auto err = meta / (unit.unit_id + ".err");
  report(Kind::kExecBegin);
  result.start = clock();
  const auto spawned = spawn_and_wait(args, sandbox, out, err, options);
  result.end = clock();
  if (spawned.spawn_errno != 0) {
    return fail(127, fmt::format("cannot execute '{}': {}", args[0], std::strerror(spawned.spawn_errno)));
  }
  if (spawned.exit_code != 0) {
    auto stderr_text = read_head(err);
    return fail(spawned.exit_code, stderr_text.empty()
                                       ? fmt::format("exit status {}", spawned.exit_code)
                                       : fmt::format("exit status {}: {}", spawned.exit_code, stderr_text));
  }
  report(Kind::kExecEnd);

  try {
    report(Kind::kStageOutBegin);
    for (const auto& d : unit.outputs) stage(d, sandbox, unit.unit_id, options);
    report(Kind::kStageOutEnd);
  } catch (const std::exception& e) {
    return fail(-1, fmt::format("output staging failed: {}", e.what()));
  }
  result.ok = true;
  result.exit_code = 0;
  report(Kind::kDone);
  return result;
}

int run_command(const std::vector<std::string>& args, const fs::path& cwd) {
  if (args.empty()) throw std::invalid_argument("run_command: empty argument list");
  const auto r = spawn_and_wait(args, cwd, "/dev/null", "/dev/null", LocalRunOptions{});
  if (r.spawn_errno != 0) throw Error(fmt::format("cannot run {}: {}", args[0], std::strerror(r.spawn_errno)));
  return r.exit_code;
}

LocalBackend::LocalBackend(LocalBackendConfig config) : config_(std::move(config)) {
  static std::atomic<int> instances{0};
  cores_ = config_.effective_cores();
  workdir_ = config_.workdir.empty()
                 ? fs::temp_directory_path() / fmt::format("pilotflow-{}-{}", ::getpid(), instances.fetch_add(1))
                 : config_.workdir;
  workdir_ = fs::absolute(workdir_);
  output_root_ = fs::absolute(config_.output_root.empty() ? workdir_ / "outputs" : config_.output_root);
}

LocalBackend::~LocalBackend() {
  cancel_all();
  join_workers();
}

void LocalBackend::begin_run(const Workflow& /*workflow*/) {
  join_workers();
  loop_.reset();
  ++runs_;
  run_dir_ = workdir_ / fmt::format("run-{:03d}", runs_);
  fs::create_directories(run_dir_);
  fs::create_directories(output_root_);
}

void LocalBackend::end_run() { join_workers(); }

LatencySampler LocalBackend::make_pull_sampler() { return LatencySampler(config_.pull_latency, config_.seed); }

void LocalBackend::execute(const UnitDescription& unit, const Placement& /*placement*/, PhaseCallback report) {
  const auto generation = generation_.load();
  const auto sandbox = run_dir_ / (unit.pipeline >= 0 ? fmt::format("pipeline-{:04d}", unit.pipeline) : unit.unit_id);

  LocalRunOptions options;
  options.input_root = fs::absolute(config_.input_root);
  options.output_root = output_root_;
  options.clock = [this] { return loop_.now(); };
  options.on_spawn = [this, id = unit.unit_id, generation](pid_t pid) {
    std::lock_guard lock(mutex_);
    live_pids_[id] = pid;
    if (generation != generation_.load()) ::kill(pid, SIGKILL);
  };

  // The guard is taken here, on the loop thread, so run() cannot see an idle
  // loop between now and the worker's first post.
  auto guard = std::make_unique<RealtimeLoop::WorkGuard>(loop_);
  std::lock_guard lock(mutex_);
  workers_.emplace_back([this, unit, sandbox, options = std::move(options), report = std::move(report), generation,
                         guard = std::move(guard)] {
    local_run(unit, sandbox, options, [&](const UnitPhase& phase) {
      loop_.post_at(phase.time, [this, report, phase, generation] {
        if (generation != generation_.load()) return;
        report(phase);
      });
    });
    std::lock_guard lock(mutex_);
    live_pids_.erase(unit.unit_id);
  });
}

void LocalBackend::cancel_all() {
  ++generation_;
  std::lock_guard lock(mutex_);
  for (const auto& [id, pid] : live_pids_) ::kill(pid, SIGKILL);
}

void LocalBackend::join_workers() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (auto& w : workers)
    if (w.joinable()) w.join();
}

}  // namespace pilotflow
