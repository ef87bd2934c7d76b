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

#include <cstdint>
#include <optional>

#include "kljn/attack.hpp"
#include "kljn/circuit.hpp"
#include "kljn/seeds.hpp"
#include "kljn/waveform.hpp"

namespace kljn {

struct SimConfig;

enum class Bit : std::uint8_t { Low, High };

struct ResistorSet {
  double r_low = 1000.0;
  double r_high = 9000.0;

  void validate() const;
  double resistance(Bit b) const noexcept { return b == Bit::Low ? r_low : r_high; }
};

struct ResistorChoice {
  Bit value = Bit::Low;
  double resistance = 0.0;
};

ResistorChoice select_bit(RngStream& stream, const ResistorSet& set);

enum class BitClass : std::uint8_t { SecureLH, SecureHL, DiscardHH, DiscardLL };

BitClass classify_bit_pair(const ResistorChoice& alice, const ResistorChoice& bob);
bool is_secure(BitClass c) noexcept;
const char* to_string(BitClass c) noexcept;

/// Johnson-formula estimate of the far-end resistor from the mean-square
/// channel current: 4 k T B / <i^2> - own_r. Throws InferenceError when the
/// measured power is not positive.
double infer_remote_resistance(const Waveform& u_ch, const Waveform& i_ch, double own_r,
                               double t_eff, double bandwidth_hz);

/// Decides which resistor sits at the far end.
///
/// <u^2> and <i^2> are independent scaled chi-square statistics with equal
/// degrees of freedom, so the log-likelihood of a hypothesis with expected
/// powers (S_u, S_i) is, up to a common factor, -(ln S_u + m_u/S_u + ln S_i +
/// m_i/S_i). Returns nullopt on an exact tie, which the caller counts as a
/// bit error.
std::optional<Bit> identify_remote(const Waveform& u_ch, const Waveform& i_ch, Bit own,
                                   const ResistorSet& set, double t_eff, double bandwidth_hz);

/// Per-bit seeds of every random stream a bit exchange uses.
struct BitSeeds {
  std::uint64_t alice_choice = 0;
  std::uint64_t bob_choice = 0;
  std::uint64_t alice_noise = 0;
  std::uint64_t bob_noise = 0;
  std::uint64_t eve_injection = 0;
  std::uint64_t eve_coin = 0;

  static BitSeeds derive(std::uint64_t master_seed, SeedDomain domain, std::uint64_t bit_index);
};

struct BitExchangeRecord {
  std::uint64_t index = 0;
  ResistorChoice alice_choice;
  ResistorChoice bob_choice;
  ChannelSignals signals;
  // Emitter voltages of the two noise generators.
  Waveform u_alice;
  Waveform u_bob;
  std::optional<Waveform> injected;
  BitClass classification = BitClass::DiscardLL;
  std::optional<double> alice_inferred_remote;
  std::optional<double> bob_inferred_remote;
  std::optional<Bit> alice_identified;
  std::optional<Bit> bob_identified;

  // Both parties named the other's resistor correctly.
  bool honest_correct() const noexcept;
};

/// One full bit exchange period: choices, noise synthesis, loop solution,
/// optional injection and both parties' inference.
BitExchangeRecord run_bit_exchange(const SimConfig& cfg, const std::optional<CableModel>& model,
                                   std::uint64_t bit_index, const BitSeeds& seeds,
                                   const std::optional<InjectionSpec>& attack);

}  // namespace kljn
