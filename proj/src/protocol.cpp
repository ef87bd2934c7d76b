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

#include "kljn/protocol.hpp"

#include <cmath>

#include "kljn/config.hpp"
#include "kljn/errors.hpp"
#include "kljn/noise.hpp"

namespace kljn {

void ResistorSet::validate() const {
  if (!(r_low > 0.0) || !(r_high > 0.0)) throw ConfigError("resistors must be positive");
  if (!(r_low < r_high)) throw ConfigError("r_l must be smaller than r_h");
}

ResistorChoice select_bit(RngStream& stream, const ResistorSet& set) {
  const Bit b = (stream() >> 63) != 0 ? Bit::High : Bit::Low;
  return {b, set.resistance(b)};
}

BitClass classify_bit_pair(const ResistorChoice& alice, const ResistorChoice& bob) {
  if (alice.value == Bit::Low) return bob.value == Bit::High ? BitClass::SecureLH : BitClass::DiscardLL;
  return bob.value == Bit::Low ? BitClass::SecureHL : BitClass::DiscardHH;
}

bool is_secure(BitClass c) noexcept {
  return c == BitClass::SecureLH || c == BitClass::SecureHL;
}

const char* to_string(BitClass c) noexcept {
  switch (c) {
    case BitClass::SecureLH: return "LH";
    case BitClass::SecureHL: return "HL";
    case BitClass::DiscardHH: return "HH";
    case BitClass::DiscardLL: return "LL";
  }
  return "?";
}

namespace {

double mean_square(const Waveform& w) {
  double acc = 0.0;
  for (double s : w.samples()) acc += s * s;
  return acc / static_cast<double>(w.size());
}

}  // namespace

double infer_remote_resistance(const Waveform& u_ch, const Waveform& i_ch, double own_r,
                               double t_eff, double bandwidth_hz) {
  require_aligned(u_ch, i_ch, "infer_remote_resistance");
  if (!(own_r > 0.0) || !(t_eff > 0.0) || !(bandwidth_hz > 0.0)) {
    throw DomainError("infer_remote_resistance: resistance, temperature and bandwidth must be positive");
  }
  const double power = mean_square(i_ch);
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw InferenceError("channel current carries no measurable power");
  }
  const double loop = 4.0 * kBoltzmann * t_eff * bandwidth_hz / power;
  return loop - own_r;
}

std::optional<Bit> identify_remote(const Waveform& u_ch, const Waveform& i_ch, Bit own,
                                   const ResistorSet& set, double t_eff, double bandwidth_hz) {
  require_aligned(u_ch, i_ch, "identify_remote");
  const double m_u = mean_square(u_ch);
  const double m_i = mean_square(i_ch);
  if (!(m_u > 0.0) || !(m_i > 0.0)) throw InferenceError("channel carries no measurable power");

  const double unit = 4.0 * kBoltzmann * t_eff * bandwidth_hz;
  const double r_own = set.resistance(own);
  const auto score = [&](double r_remote) {
    const double loop = r_own + r_remote;
    const double s_i = unit / loop;
    const double s_u = unit * r_own * r_remote / loop;
    return std::log(s_u) + m_u / s_u + std::log(s_i) + m_i / s_i;
  };
  const double low = score(set.r_low);
  const double high = score(set.r_high);
  if (low < high) return Bit::Low;
  if (high < low) return Bit::High;
  return std::nullopt;
}

BitSeeds BitSeeds::derive(std::uint64_t master_seed, SeedDomain domain, std::uint64_t bit_index) {
  const auto d = [&](StreamId s) { return derive_seed(master_seed, domain, bit_index, s); };
  return {d(StreamId::AliceChoice), d(StreamId::BobChoice),    d(StreamId::AliceNoise),
          d(StreamId::BobNoise),    d(StreamId::EveInjection), d(StreamId::EveCoin)};
}

bool BitExchangeRecord::honest_correct() const noexcept {
  return alice_identified == bob_choice.value && bob_identified == alice_choice.value;
}

BitExchangeRecord run_bit_exchange(const SimConfig& cfg, const std::optional<CableModel>& model,
                                   std::uint64_t bit_index, const BitSeeds& seeds,
                                   const std::optional<InjectionSpec>& attack) {
  cfg.validate();
  const ResistorSet set = cfg.resistors();

  RngStream alice_stream(seeds.alice_choice);
  ResistorChoice alice = select_bit(alice_stream, set);
  ResistorChoice bob;
  switch (cfg.selection_mode) {
    case SelectionMode::FixedLH:
      alice = {Bit::Low, set.r_low};
      bob = {Bit::High, set.r_high};
      break;
    case SelectionMode::RandomizedLHHL: {
      const Bit other = alice.value == Bit::Low ? Bit::High : Bit::Low;
      bob = {other, set.resistance(other)};
      break;
    }
    case SelectionMode::Independent: {
      RngStream bob_stream(seeds.bob_choice);
      bob = select_bit(bob_stream, set);
      break;
    }
  }

  NoiseSpec spec{cfg.bandwidth_hz, cfg.sample_rate_hz, cfg.tau_s, 1.0, 0};
  spec.target_rms = johnson_rms_voltage(alice.resistance, cfg.t_eff, cfg.bandwidth_hz);
  spec.seed = seeds.alice_noise;
  Waveform u_a = synth_band_limited_gaussian(spec);
  spec.target_rms = johnson_rms_voltage(bob.resistance, cfg.t_eff, cfg.bandwidth_hz);
  spec.seed = seeds.bob_noise;
  Waveform u_b = synth_band_limited_gaussian(spec);

  const LoopConfig loop = cfg.loop_config(alice.resistance, bob.resistance);

  std::optional<Waveform> injected;
  if (attack) {
    attack->validate(cfg.bandwidth_hz);
    if (attack->level_fraction == 0.0) {
      injected = Waveform::zeros(u_a.size(), u_a.sample_rate_hz());
    } else {
      double reference = reference_rms_channel_current(set.r_low, set.r_high, cfg.t_eff,
                                                       cfg.bandwidth_hz);
      if (cfg.injection_reference == InjectionReference::Empirical) {
        reference = rms(solve_loop(loop, model, u_a, u_b).i_cha);
      }
      NoiseSpec eve{attack->bandwidth_hz, cfg.sample_rate_hz, cfg.tau_s,
                    attack->level_fraction * reference,
                    seeds.eve_injection ^ splitmix64(attack->seed)};
      injected = synth_band_limited_gaussian(eve);
    }
  }

  ChannelSignals signals = solve_loop(loop, model, u_a, u_b, injected);

  BitExchangeRecord rec{bit_index,
                        alice,
                        bob,
                        std::move(signals),
                        std::move(u_a),
                        std::move(u_b),
                        std::move(injected),
                        classify_bit_pair(alice, bob),
                        std::nullopt,
                        std::nullopt,
                        std::nullopt,
                        std::nullopt};

  const auto& s = rec.signals;
  try {
    rec.alice_inferred_remote =
        infer_remote_resistance(s.u_cha, s.i_cha, alice.resistance, cfg.t_eff, cfg.bandwidth_hz);
    rec.bob_inferred_remote =
        infer_remote_resistance(s.u_chb, s.i_chb, bob.resistance, cfg.t_eff, cfg.bandwidth_hz);
    rec.alice_identified =
        identify_remote(s.u_cha, s.i_cha, alice.value, set, cfg.t_eff, cfg.bandwidth_hz);
    rec.bob_identified =
        identify_remote(s.u_chb, s.i_chb, bob.value, set, cfg.t_eff, cfg.bandwidth_hz);
  } catch (const InferenceError&) {
    rec.alice_inferred_remote.reset();
    rec.bob_inferred_remote.reset();
    rec.alice_identified.reset();
    rec.bob_identified.reset();
  }
  return rec;
}

}  // namespace kljn
