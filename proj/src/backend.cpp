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

#include "pilotflow/backend.hpp"

namespace pilotflow {

std::string_view to_string(UnitPhase::Kind kind) {
  using Kind = UnitPhase::Kind;
  switch (kind) {
    case Kind::kUnitIoBegin: return "unit_io_begin";
    case Kind::kUnitIoEnd: return "unit_io_end";
    case Kind::kStageInBegin: return "stage_in_begin";
    case Kind::kStageInEnd: return "stage_in_end";
    case Kind::kExecBegin: return "exec_begin";
    case Kind::kExecEnd: return "exec_end";
    case Kind::kStageOutBegin: return "stage_out_begin";
    case Kind::kStageOutEnd: return "stage_out_end";
    case Kind::kDone: return "done";
    case Kind::kFailed: return "failed";
  }
  return "?";
}

}  // namespace pilotflow
