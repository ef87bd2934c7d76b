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
#include <optional>
#include <span>

#include "kljn/circuit.hpp"
#include "kljn/waveform.hpp"

namespace kljn {

struct DetectionConfig {
  // Absolute residual threshold in amperes.
  double threshold = 0.0;
  // Number of consecutive samples that must exceed the threshold.
  std::size_t consecutive_samples = 1;
  // Pooled rms of the no-attack residuals the threshold was derived from.
  std::optional<double> calibration_rms;
  // Cable check only: a sample counts when both end residuals exceed the
  // threshold. An injected current always splits between the two ends.
  bool both_ends = false;

  void validate() const;
};

struct DetectionVerdict {
  bool attacked = false;
  // Sample index at which the consecutive-exceedance criterion fired.
  std::optional<std::size_t> first_detection_sample;
  double max_residual = 0.0;
  // Alice-end residual (or the single loop residual of the ideal check).
  Waveform residual_trace;
  std::optional<Waveform> residual_trace_bob;

  // first_detection_sample over the trace length; nullopt when not attacked.
  std::optional<double> latency_fraction() const;
};

/// Ideal-wire check: r(t) = i_cha(t) - i_chb(t) with both in Loop
/// convention. With no injection the two ends carry the same loop current.
DetectionVerdict compare_instantaneous_ideal(const Waveform& i_cha, const Waveform& i_chb,
                                             const DetectionConfig& cfg);

struct ExpectedCurrents {
  Waveform i_star_cha;
  Waveform i_star_chb;
};

/// Replays the publicly exchanged end voltages through the cable model (no
/// injection source) and returns the end currents the cable alone would
/// draw, Loop convention.
ExpectedCurrents simulate_expected_currents(const CableModel& model, const LoopConfig& cfg,
                                            const Waveform& u_cha, const Waveform& u_chb);

/// Residual test at both ends: measured minus simulated current. Fires on
/// the earlier end, or on coincident exceedances when cfg.both_ends is set.
DetectionVerdict model_based_detect(const ChannelSignals& measured,
                                    const ExpectedCurrents& simulated,
                                    const DetectionConfig& cfg);

/// threshold = multiplier * rms of all pooled no-attack residual samples.
/// All-zero residuals give the smallest positive threshold.
DetectionConfig calibrate_threshold(std::span<const Waveform> no_attack_residuals,
                                    double multiplier = 5.0,
                                    std::size_t consecutive_samples = 1);

inline constexpr std::size_t kMinCalibrationTraces = 10;

/// Copy of `model` with every per-unit line constant scaled by (1 + mismatch).
CableModel perturbed_model(const CableModel& model, double mismatch);

}  // namespace kljn
