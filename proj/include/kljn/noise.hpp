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
#include <cstdint>
#include <span>

#include "kljn/waveform.hpp"

namespace kljn {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

/// sqrt(4 k T R B): rms Johnson noise voltage of `resistance` at `t_eff`
/// over `bandwidth_hz`. Throws DomainError unless all arguments are positive.
double johnson_rms_voltage(double resistance, double t_eff, double bandwidth_hz);

struct NoiseSpec {
  double bandwidth_hz = 250.0;
  double sample_rate_hz = 2000.0;
  double duration_s = 0.1;
  double target_rms = 1.0;
  std::uint64_t seed = 0;

  // Throws ConfigError on a violated invariant.
  void validate() const;
  std::size_t sample_count() const;
};

/// Band-limited white Gaussian noise.
///
/// Draws an independent complex Gaussian for every DFT bin in (0, bandwidth],
/// leaves DC and all bins above the bandwidth at zero and inverse transforms.
/// The result is scaled by target_rms over the theoretical standard
/// deviation, so the rms of a short segment fluctuates naturally around the
/// target. The output is periodic over its duration.
Waveform synth_band_limited_gaussian(const NoiseSpec& spec);

/// Number of non-zero positive-frequency bins the synthesizer populates.
std::size_t populated_bins(const NoiseSpec& spec);

double rms(std::span<const double> samples);
inline double rms(const Waveform& w) { return rms(w.samples()); }

}  // namespace kljn
