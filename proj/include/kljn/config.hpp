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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kljn/attack.hpp"
#include "kljn/circuit.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

enum class SelectionMode : std::uint8_t {
  // Alice picks at random and Bob takes the other resistor: every bit is LH or HL.
  RandomizedLHHL,
  // Alice always R_L, Bob always R_H.
  FixedLH,
  // Both pick independently; HH and LL bits are discarded.
  Independent,
};

enum class InjectionReference : std::uint8_t {
  // Level relative to reference_rms_channel_current().
  Analytic,
  // Level relative to the measured rms of the unattacked Alice-end current of the bit.
  Empirical,
};

/// Complete description of an experiment. Defaults are the reference
/// parameter set: 1 kOhm / 9 kOhm, 7.25e16 K, 250 Hz, 0.1 s, 10000 bits.
struct SimConfig {
  double r_l = 1000.0;
  double r_h = 9000.0;
  double t_eff = 7.25e16;
  double bandwidth_hz = 250.0;
  double tau_s = 0.1;
  double sample_rate_hz = 2000.0;
  std::size_t n_bits = 10000;

  CircuitVariant variant{VariantKind::Ideal, 1000.0, 10};
  CableParameters cable;
  double injection_position = 0.5;
  // Circuit used by the defense experiment; the other experiments use `variant`.
  CircuitVariant defense_variant{VariantKind::Cable, 1000.0, 10};

  std::optional<double> injection_level = 0.1;
  InjectionReference injection_reference = InjectionReference::Analytic;
  std::uint64_t injection_seed = 0;

  SelectionMode selection_mode = SelectionMode::RandomizedLHHL;

  // Absent: calibrate from `calibration_bits` unattacked bits.
  std::optional<double> detection_threshold;
  double detection_multiplier = 5.0;
  // Two coincident samples at both ends keep the false-alarm rate of the
  // round-off-level cable residual well under 1 %.
  std::size_t detection_consecutive = 2;
  bool detection_both_ends = true;
  std::size_t calibration_bits = 100;
  double defense_model_mismatch = 0.0;

  std::uint64_t master_seed = 1;
  // 0 selects std::thread::hardware_concurrency(). Never affects results.
  std::size_t workers = 0;

  void validate() const;

  std::size_t samples_per_bit() const;
  ResistorSet resistors() const { return {r_l, r_h}; }
  LoopConfig loop_config(double r_alice, double r_bob) const;
  std::optional<CableModel> cable_model() const;
  std::optional<InjectionSpec> injection() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Keys accepted by parse_config / apply_setting, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Throws ConfigError naming the key.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);
std::string get_setting(const SimConfig& cfg, std::string_view key);

/// Flat `key = value` text; '#' starts a comment; blank lines ignored.
SimConfig parse_config_text(std::string_view text);
SimConfig parse_config(const std::filesystem::path& path);

/// Every key with its current value; parse_config_text(format_config(c)) == c.
std::string format_config(const SimConfig& cfg);

const char* to_string(SelectionMode m) noexcept;

}  // namespace kljn
