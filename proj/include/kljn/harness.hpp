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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kljn/attack.hpp"
#include "kljn/config.hpp"
#include "kljn/defense.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

/// Calls fn(i) for every i in [0, n) on `workers` threads (0 = hardware
/// concurrency). Work is split into contiguous blocks; fn must only write to
/// per-index storage so that results never depend on the worker count.
void parallel_for_bits(std::size_t n, std::size_t workers,
                       const std::function<void(std::size_t)>& fn);

/// Reduced outcome of one attacked bit exchange.
struct AttackedBit {
  BitClass classification = BitClass::DiscardLL;
  bool honest_correct = false;
  std::optional<BitAttackOutcome> attack;  // secure bits only
  std::uint8_t key_bit = 0;                // 0 for LH, 1 for HL
  std::uint8_t eve_bit = 0;
};

/// Simulates cfg.n_bits exchanges under cfg's attack and variant.
std::vector<AttackedBit> run_attack_bits(const SimConfig& cfg);

struct Table1Cell {
  CircuitVariant variant;
  double level = 0.0;
  SuccessEstimate p_e;
  // Fraction of kept bits where both honest parties inferred correctly.
  SuccessEstimate honest;
};

struct Table1Grid {
  std::vector<CircuitVariant> variants;
  std::vector<double> levels;

  // ideal, 100 m, 1000 m, 1000 m + killer at 0.1 %, 1 %, 10 %.
  static Table1Grid reference(std::size_t n_segments = 10);
};

struct Table1Report {
  std::vector<Table1Cell> cells;
};

struct DefenseBitRow {
  std::uint64_t bit = 0;
  bool attacked = false;
  bool detected = false;
  std::optional<double> latency_fraction;
  double max_residual = 0.0;
};

struct DefenseReport {
  CircuitVariant variant;
  double level = 0.0;
  DetectionConfig detection;
  SuccessEstimate detection_rate;
  SuccessEstimate false_positive_rate;
  double median_latency_fraction = 0.0;
  double mean_latency_fraction = 0.0;
  std::vector<DefenseBitRow> rows;
  std::optional<Waveform> trace_attacked;
  std::optional<Waveform> trace_clean;
};

struct PrivacyStage {
  std::string stage;
  double p_e = 0.0;
  double std_error = 0.0;
  std::size_t key_length = 0;
};

struct PrivacyReport {
  SuccessEstimate raw;
  SuccessEstimate after_one_pass;
  SuccessEstimate after_two_passes;
  double predicted_one_pass = 0.0;
  double predicted_two_passes = 0.0;
  std::size_t key_length_raw = 0;
  std::size_t key_length_one_pass = 0;
  std::size_t key_length_two_passes = 0;

  // |pipeline - closed form| <= 3 binomial sigma for both passes.
  bool closed_form_consistent() const;
  std::vector<PrivacyStage> stages() const;
};

struct SingleBitReport {
  BitExchangeRecord record;
  std::optional<BitAttackOutcome> attack;
};

struct ExperimentReport {
  SimConfig config;
  std::optional<Table1Report> table1;
  std::optional<DefenseReport> defense;
  std::optional<PrivacyReport> privacy;
  std::optional<SingleBitReport> single_bit;

  std::string summary() const;
};

ExperimentReport run_table1(const SimConfig& cfg, const Table1Grid& grid = Table1Grid::reference());

/// Calibrates the threshold on unattacked bits (unless cfg fixes it), then
/// runs every bit twice, clean and attacked, with identical party noise.
ExperimentReport run_defense_experiment(const SimConfig& cfg);

/// Attack at cfg's level and variant, then one and two XOR passes.
ExperimentReport run_privacy_experiment(const SimConfig& cfg);

ExperimentReport run_single_bit(const SimConfig& cfg, std::uint64_t bit_index);

/// Writes the CSV files of every present section plus summary.txt and an
/// echo of the configuration (config.txt). Throws IoError.
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace kljn
