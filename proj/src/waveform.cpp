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

#include "kljn/waveform.hpp"

#include <cmath>
#include <string>

#include "kljn/errors.hpp"

namespace kljn {

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Config: return "configuration";
    case ErrorCategory::Domain: return "domain";
    case ErrorCategory::Shape: return "shape";
    case ErrorCategory::Inference: return "inference";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Simulation: return "simulation";
  }
  return "unknown";
}

Waveform::Waveform(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (samples_.empty()) throw ShapeError("waveform must not be empty");
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw ShapeError("waveform sample rate must be positive");
  }
  for (double s : samples_) {
    if (!std::isfinite(s)) throw ShapeError("waveform sample is not finite");
  }
}

Waveform Waveform::zeros(std::size_t count, double sample_rate_hz) {
  return Waveform(std::vector<double>(count, 0.0), sample_rate_hz);
}

void require_aligned(const Waveform& a, const Waveform& b, std::string_view what) {
  if (a.size() != b.size() || a.sample_rate_hz() != b.sample_rate_hz()) {
    throw ShapeError(std::string(what) + ": waveforms differ in length or sample rate (" +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " samples)");
  }
}

Waveform& Waveform::operator+=(const Waveform& other) {
  require_aligned(*this, other, "waveform addition");
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
  return *this;
}

Waveform& Waveform::operator-=(const Waveform& other) {
  require_aligned(*this, other, "waveform subtraction");
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
  return *this;
}

Waveform& Waveform::operator*=(double scale) noexcept {
  for (double& s : samples_) s *= scale;
  return *this;
}

}  // namespace kljn
