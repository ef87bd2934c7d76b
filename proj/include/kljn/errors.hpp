// Copyright 2026 The kljnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace kljn {

enum class ErrorCategory {
  Config,
  Domain,
  Shape,
  Inference,
  Io,
  Simulation,
};

const char* category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Invalid configuration value or violated precondition on a spec type.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::Config, message) {}
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ErrorCategory::Domain, message) {}
};

// Waveforms or state vectors whose lengths / sample rates disagree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message)
      : Error(ErrorCategory::Shape, message) {}
};

// Degenerate measurement that cannot support a resistance estimate.
class InferenceError : public Error {
 public:
  explicit InferenceError(const std::string& message)
      : Error(ErrorCategory::Inference, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::Io, message) {}
};

}  // namespace kljn
