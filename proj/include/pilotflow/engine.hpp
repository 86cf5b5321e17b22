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

#include <cstddef>
#include <string>

#include "pilotflow/backend.hpp"
#include "pilotflow/metrics.hpp"
#include "pilotflow/profile.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

struct RunOptions {
  /// Units per pull from the task store.
  std::size_t max_bulk = 1024;
  /// Copied into the report.
  std::string trial_id;
  std::string workload;
  std::string config_digest;
};

/// Executes `workflow` on one pilot of `request.cores` cores.
///
/// Two cooperative actors share the backend's loop: the workflow manager
/// translates a pipeline's next stage into units and enqueues them in the task
/// store once the previous stage is DONE; the execution manager pulls units in
/// bulk, places them first-fit on the pilot's cores and drives them through
/// the backend. They only communicate through the store and completion
/// notifications.
///
/// A failed task fails its pipeline (its remaining tasks are CANCELED); other
/// pipelines continue. At walltime every unfinished task is CANCELED.
///
/// Throws ValidationError before submitting anything for an invalid workflow,
/// SubmissionError when the backend rejects the pilot, and PilotFailure when
/// the pilot dies; the events recorded up to that point stay in `sink`.
RunReport run_workflow(const Workflow& workflow, const ResourceRequest& request, Backend& backend, ProfileSink& sink,
                       const RunOptions& options = {});

}  // namespace pilotflow
