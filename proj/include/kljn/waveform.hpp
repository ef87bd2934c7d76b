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

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kljn {

/// Uniformly sampled, real-valued time series.
///
/// Every voltage and current in the simulator is carried as a Waveform. The
/// sample vector is never empty and every sample is finite; arithmetic
/// between two waveforms requires equal length and sample rate.
class Waveform {
 public:
  Waveform(std::vector<double> samples, double sample_rate_hz);

  static Waveform zeros(std::size_t count, double sample_rate_hz);

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> mutable_samples() noexcept { return samples_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double dt() const noexcept { return 1.0 / sample_rate_hz_; }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  Waveform& operator+=(const Waveform& other);
  Waveform& operator-=(const Waveform& other);
  Waveform& operator*=(double scale) noexcept;

  friend Waveform operator+(Waveform a, const Waveform& b) { return a += b; }
  friend Waveform operator-(Waveform a, const Waveform& b) { return a -= b; }
  friend Waveform operator*(Waveform a, double s) noexcept { return a *= s; }
  friend Waveform operator*(double s, Waveform a) noexcept { return a *= s; }
  Waveform operator-() const { return *this * -1.0; }

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

/// Throws ShapeError naming `what` unless both waveforms share length and rate.
void require_aligned(const Waveform& a, const Waveform& b, std::string_view what);

}  // namespace kljn
