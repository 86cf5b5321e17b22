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

#include <stdexcept>
#include <string>
#include <vector>

namespace pilotflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A workflow, protocol or pilot description violates its invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class StateMachineError : public Error {
 public:
  using Error::Error;
};

/// The backend refused a pilot (e.g. more cores than it can ever provide).
class SubmissionError : public Error {
 public:
  using Error::Error;
};

/// The pilot died while the workflow was running. The profile collected up to
/// that point stays in the caller's sink.
class PilotFailure : public Error {
 public:
  using Error::Error;
};

class MalformedProfileError : public Error {
 public:
  using Error::Error;
};

/// Parse or schema problem in a JSON document (workflow, protocol, experiment
/// or backend configuration).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownProtocolError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace pilotflow
