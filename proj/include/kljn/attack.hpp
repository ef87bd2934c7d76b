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
#include <vector>

#include "kljn/circuit.hpp"
#include "kljn/seeds.hpp"
#include "kljn/waveform.hpp"

namespace kljn {

/// Eve's injected current: band-limited Gaussian at `level_fraction` of the
/// rms channel current, same bandwidth as the channel noise.
struct InjectionSpec {
  double level_fraction = 0.1;
  double bandwidth_hz = 250.0;
  // Salt folded into Eve's per-bit noise seeds.
  std::uint64_t seed = 0;

  // 0 <= level_fraction < 1 (zero means Eve injects nothing) and the
  // bandwidth must equal the channel bandwidth.
  void validate(double channel_bandwidth_hz) const;
};

/// rms loop current of a secure (LH or HL) bit: sqrt(4 k T B / (R_L + R_H)).
double reference_rms_channel_current(double r_l, double r_h, double t_eff, double bandwidth_hz);

/// <I_inj(t) I_end(t)> over the waveform. `i_ch_end` must already be in the
/// DividerFromInjection convention.
double correlate(const Waveform& i_inj, const Waveform& i_ch_end);

enum class Arrangement : std::uint8_t { LH, HL };

/// Sign of rho_a - rho_b. An exact tie is settled by a fair coin from `coin`.
Arrangement eve_decide(double rho_a, double rho_b, RngStream& coin);

struct BitAttackOutcome {
  double rho_a = 0.0;
  double rho_b = 0.0;
  double rho = 0.0;
  Arrangement guess = Arrangement::LH;
  bool correct = false;
};

/// Runs Eve's correlators and decision on one secure bit.
BitAttackOutcome attack_bit(const ChannelSignals& signals, const Waveform& i_inj,
                            Arrangement truth, RngStream& coin);

/// Mean of q with its binomial standard error sqrt(p(1-p)/n).
struct SuccessEstimate {
  double p_e = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

SuccessEstimate success_probability(std::span<const std::uint8_t> q);

struct AttackResult {
  std::vector<BitAttackOutcome> bits;
  SuccessEstimate estimate;
};

AttackResult summarize_attack(std::vector<BitAttackOutcome> bits);

}  // namespace kljn
