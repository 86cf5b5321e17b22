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

#include "pilotflow/latency.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "pilotflow/errors.hpp"

namespace pilotflow {

LatencyModel LatencyModel::constant(double value, std::uint64_t stream) {
  LatencyModel m;
  m.kind = Kind::kConstant;
  m.value = value;
  m.stream = stream;
  return m;
}

LatencyModel LatencyModel::uniform(double low, double high, std::uint64_t stream) {
  LatencyModel m;
  m.kind = Kind::kUniform;
  m.low = low;
  m.high = high;
  m.stream = stream;
  return m;
}

LatencyModel LatencyModel::normal_truncated(double mean, double stddev, std::uint64_t stream) {
  LatencyModel m;
  m.kind = Kind::kNormalTruncated;
  m.mean = mean;
  m.stddev = stddev;
  m.stream = stream;
  return m;
}

void LatencyModel::validate() const {
  std::vector<std::string> violations;
  const auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  switch (kind) {
    case Kind::kConstant:
      if (!finite_nonneg(value)) violations.push_back(fmt::format("CONSTANT value {} must be >= 0", value));
      break;
    case Kind::kUniform:
      if (!finite_nonneg(low) || !std::isfinite(high) || high < low)
        violations.push_back(fmt::format("UNIFORM bounds [{}, {}] must satisfy 0 <= low <= high", low, high));
      break;
    case Kind::kNormalTruncated:
      if (!std::isfinite(mean)) violations.push_back("NORMAL_TRUNCATED mean must be finite");
      if (!finite_nonneg(stddev)) violations.push_back(fmt::format("NORMAL_TRUNCATED stddev {} must be >= 0", stddev));
      break;
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

double LatencyModel::expected() const {
  switch (kind) {
    case Kind::kConstant: return value;
    case Kind::kUniform: return 0.5 * (low + high);
    case Kind::kNormalTruncated: {
      if (stddev == 0.0) return std::max(mean, 0.0);
      // Mean of N(mean, stddev) conditioned on x >= 0.
      const double alpha = -mean / stddev;
      const double pdf = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * std::numbers::pi);
      const double tail = 0.5 * std::erfc(alpha / std::numbers::sqrt2);
      return tail > 0.0 ? mean + stddev * pdf / tail : 0.0;
    }
  }
  return 0.0;
}

std::string_view to_string(LatencyModel::Kind kind) {
  switch (kind) {
    case LatencyModel::Kind::kConstant: return "CONSTANT";
    case LatencyModel::Kind::kUniform: return "UNIFORM";
    case LatencyModel::Kind::kNormalTruncated: return "NORMAL_TRUNCATED";
  }
  return "?";
}

LatencySampler::LatencySampler(LatencyModel model, std::uint64_t seed, std::uint64_t substream)
    : model_(model) {
  model_.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(model_.stream), static_cast<std::uint32_t>(model_.stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  rng_.seed(seq);
}

Seconds LatencySampler::sample() {
  Seconds x = 0.0;
  switch (model_.kind) {
    case LatencyModel::Kind::kConstant:
      x = model_.value;
      break;
    case LatencyModel::Kind::kUniform:
      x = model_.low == model_.high ? model_.low : std::uniform_real_distribution<double>(model_.low, model_.high)(rng_);
      break;
    case LatencyModel::Kind::kNormalTruncated: {
      if (model_.stddev == 0.0) {
        x = std::max(model_.mean, 0.0);
        break;
      }
      std::normal_distribution<double> normal(model_.mean, model_.stddev);
      // Rejection sampling; a mass this far below zero is a config mistake,
      // so give up after a bounded number of tries and clamp.
      x = 0.0;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const double candidate = normal(rng_);
        if (candidate >= 0.0) {
          x = candidate;
          break;
        }
      }
      break;
    }
  }
  ++draws_;
  total_ += x;
  return x;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

Json to_json(const LatencyModel& model) {
  Json json{{"kind", to_string(model.kind)}, {"stream", model.stream}};
  switch (model.kind) {
    case LatencyModel::Kind::kConstant: json["value"] = model.value; break;
    case LatencyModel::Kind::kUniform:
      json["low"] = model.low;
      json["high"] = model.high;
      break;
    case LatencyModel::Kind::kNormalTruncated:
      json["mean"] = model.mean;
      json["stddev"] = model.stddev;
      break;
  }
  return json;
}

LatencyModel latency_from_json(const Json& json, std::string_view where, std::uint64_t default_stream) {
  // A bare number is shorthand for CONSTANT.
  if (json.is_number()) {
    auto model = LatencyModel::constant(json.get<double>(), default_stream);
    model.validate();
    return model;
  }
  const auto kind = require_field<std::string>(json, "kind", where);
  LatencyModel model;
  if (kind == "CONSTANT") {
    model.kind = LatencyModel::Kind::kConstant;
    model.value = require_field<double>(json, "value", where);
  } else if (kind == "UNIFORM") {
    model.kind = LatencyModel::Kind::kUniform;
    model.low = require_field<double>(json, "low", where);
    model.high = require_field<double>(json, "high", where);
  } else if (kind == "NORMAL_TRUNCATED") {
    model.kind = LatencyModel::Kind::kNormalTruncated;
    model.mean = require_field<double>(json, "mean", where);
    model.stddev = require_field<double>(json, "stddev", where);
  } else {
    throw ConfigError(fmt::format("{}.kind: unknown latency model '{}' (expected CONSTANT, UNIFORM or NORMAL_TRUNCATED)",
                                  where, kind));
  }
  model.stream = optional_field<std::uint64_t>(json, "stream", where, default_stream);
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  return model;
}

}  // namespace pilotflow
