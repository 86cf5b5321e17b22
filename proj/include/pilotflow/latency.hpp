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

#include <cstdint>
#include <random>
#include <string_view>

#include "pilotflow/json_io.hpp"
#include "pilotflow/workflow.hpp"

namespace pilotflow {

/// A nonnegative delay distribution. Parameters must be stated explicitly;
/// there are no hidden defaults beyond CONSTANT 0.
struct LatencyModel {
  enum class Kind { kConstant, kUniform, kNormalTruncated };

  Kind kind = Kind::kConstant;
  double value = 0.0;  // CONSTANT
  double low = 0.0;    // UNIFORM
  double high = 0.0;
  double mean = 0.0;  // NORMAL_TRUNCATED (truncated at 0)
  double stddev = 0.0;
  std::uint64_t stream = 0;

  static LatencyModel constant(double value, std::uint64_t stream = 0);
  static LatencyModel uniform(double low, double high, std::uint64_t stream = 0);
  static LatencyModel normal_truncated(double mean, double stddev, std::uint64_t stream = 0);

  /// Throws ValidationError for negative or inverted parameters.
  void validate() const;
  /// Mean of the distribution (of the truncated one for NORMAL_TRUNCATED).
  double expected() const;
  bool is_zero() const { return kind == Kind::kConstant && value == 0.0; }

  bool operator==(const LatencyModel&) const = default;
};

std::string_view to_string(LatencyModel::Kind kind);

/// Draws from a LatencyModel with an RNG derived from (seed, model.stream,
/// substream). Equal inputs give equal sequences.
class LatencySampler {
 public:
  LatencySampler() = default;
  LatencySampler(LatencyModel model, std::uint64_t seed, std::uint64_t substream = 0);

  Seconds sample();

  const LatencyModel& model() const { return model_; }
  std::size_t draws() const { return draws_; }
  Seconds total() const { return total_; }

 private:
  LatencyModel model_;
  std::mt19937_64 rng_;
  std::size_t draws_ = 0;
  Seconds total_ = 0.0;
};

/// Stable 64-bit FNV-1a, used to derive per-task RNG substreams.
std::uint64_t fnv1a64(std::string_view text);

Json to_json(const LatencyModel& model);
/// `{"kind": "CONSTANT", "value": 0.2}` etc. `default_stream` applies when the
/// document does not name a stream.
LatencyModel latency_from_json(const Json& json, std::string_view where, std::uint64_t default_stream);

}  // namespace pilotflow
