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

#include "kljn/attack.hpp"

#include <cmath>

#include "kljn/errors.hpp"
#include "kljn/noise.hpp"

namespace kljn {

void InjectionSpec::validate(double channel_bandwidth_hz) const {
  if (!(level_fraction >= 0.0 && level_fraction < 1.0)) {
    throw ConfigError("injection level_fraction must lie in [0, 1)");
  }
  if (bandwidth_hz != channel_bandwidth_hz) {
    throw ConfigError("injection bandwidth must equal the channel noise bandwidth");
  }
}

double reference_rms_channel_current(double r_l, double r_h, double t_eff, double bandwidth_hz) {
  if (!(r_l > 0.0) || !(r_h > 0.0) || !(t_eff > 0.0) || !(bandwidth_hz > 0.0)) {
    throw DomainError("reference_rms_channel_current: arguments must be positive");
  }
  return std::sqrt(4.0 * kBoltzmann * t_eff * bandwidth_hz / (r_l + r_h));
}

double correlate(const Waveform& i_inj, const Waveform& i_ch_end) {
  require_aligned(i_inj, i_ch_end, "correlate");
  double acc = 0.0;
  for (std::size_t t = 0; t < i_inj.size(); ++t) acc += i_inj[t] * i_ch_end[t];
  return acc / static_cast<double>(i_inj.size());
}

Arrangement eve_decide(double rho_a, double rho_b, RngStream& coin) {
  const double rho = rho_a - rho_b;
  if (rho > 0.0) return Arrangement::LH;
  if (rho < 0.0) return Arrangement::HL;
  return (coin() >> 63) != 0 ? Arrangement::LH : Arrangement::HL;
}

BitAttackOutcome attack_bit(const ChannelSignals& signals, const Waveform& i_inj,
                            Arrangement truth, RngStream& coin) {
  const ChannelSignals s = signals.in_convention(SignConvention::DividerFromInjection);
  BitAttackOutcome out;
  out.rho_a = correlate(i_inj, s.i_cha);
  out.rho_b = correlate(i_inj, s.i_chb);
  out.rho = out.rho_a - out.rho_b;
  out.guess = eve_decide(out.rho_a, out.rho_b, coin);
  out.correct = out.guess == truth;
  return out;
}

SuccessEstimate success_probability(std::span<const std::uint8_t> q) {
  if (q.empty()) throw DomainError("success_probability needs at least one bit");
  std::size_t hits = 0;
  for (auto v : q) hits += v != 0 ? 1 : 0;
  const double n = static_cast<double>(q.size());
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), q.size()};
}

AttackResult summarize_attack(std::vector<BitAttackOutcome> bits) {
  std::vector<std::uint8_t> q;
  q.reserve(bits.size());
  for (const auto& b : bits) q.push_back(b.correct ? 1 : 0);
  const SuccessEstimate est = success_probability(q);
  return {std::move(bits), est};
}

}  // namespace kljn
