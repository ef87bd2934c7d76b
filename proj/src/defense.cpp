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

#include "kljn/defense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kljn/errors.hpp"

namespace kljn {
namespace {

// Index at which `run` consecutive samples of |r| > threshold end, if any.
std::optional<std::size_t> first_run(std::span<const double> r, double threshold, std::size_t run) {
  std::size_t count = 0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    count = std::abs(r[t]) > threshold ? count + 1 : 0;
    if (count >= run) return t;
  }
  return std::nullopt;
}

double max_abs(std::span<const double> r) {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void DetectionConfig::validate() const {
  if (!(threshold > 0.0)) throw ConfigError("detection threshold must be positive");
  if (consecutive_samples < 1) throw ConfigError("detection consecutive_samples must be at least 1");
}

std::optional<double> DetectionVerdict::latency_fraction() const {
  if (!first_detection_sample) return std::nullopt;
  return static_cast<double>(*first_detection_sample) / static_cast<double>(residual_trace.size());
}

DetectionVerdict compare_instantaneous_ideal(const Waveform& i_cha, const Waveform& i_chb,
                                             const DetectionConfig& cfg) {
  require_aligned(i_cha, i_chb, "compare_instantaneous_ideal");
  cfg.validate();
  Waveform residual = i_cha - i_chb;
  const auto hit = first_run(residual.samples(), cfg.threshold, cfg.consecutive_samples);
  const double peak = max_abs(residual.samples());
  return DetectionVerdict{hit.has_value(), hit, peak, std::move(residual), std::nullopt};
}

ExpectedCurrents simulate_expected_currents(const CableModel& model, const LoopConfig& cfg,
                                            const Waveform& u_cha, const Waveform& u_chb) {
  require_aligned(u_cha, u_chb, "simulate_expected_currents");
  const CableSolver solver(model, cfg, u_cha.dt(), CableSolver::Boundary::ClampedVoltage);
  const std::size_t n = u_cha.size();
  std::vector<double> ia(n), ib(n);

  CableState state = solver.operating_point(u_cha[0], u_chb[0], 0.0);
  EndSample e = solver.outputs(state, u_cha[0], u_chb[0], 0.0);
  ia[0] = e.i_cha;
  ib[0] = e.i_chb;
  for (std::size_t t = 1; t < n; ++t) {
    e = solver.step(state, u_cha[t], u_chb[t], 0.0);
    ia[t] = e.i_cha;
    ib[t] = e.i_chb;
  }
  const double fs = u_cha.sample_rate_hz();
  return {Waveform(std::move(ia), fs), Waveform(std::move(ib), fs)};
}

DetectionVerdict model_based_detect(const ChannelSignals& measured,
                                    const ExpectedCurrents& simulated,
                                    const DetectionConfig& cfg) {
  measured.validate();
  require_aligned(measured.i_cha, simulated.i_star_cha, "model_based_detect");
  require_aligned(measured.i_chb, simulated.i_star_chb, "model_based_detect");
  cfg.validate();

  const ChannelSignals loop = measured.in_convention(SignConvention::Loop);
  Waveform res_a = loop.i_cha - simulated.i_star_cha;
  Waveform res_b = loop.i_chb - simulated.i_star_chb;

  std::optional<std::size_t> hit;
  if (cfg.both_ends) {
    std::vector<double> common(res_a.size());
    for (std::size_t t = 0; t < common.size(); ++t) {
      common[t] = std::min(std::abs(res_a[t]), std::abs(res_b[t]));
    }
    hit = first_run(common, cfg.threshold, cfg.consecutive_samples);
  } else {
    const auto hit_a = first_run(res_a.samples(), cfg.threshold, cfg.consecutive_samples);
    const auto hit_b = first_run(res_b.samples(), cfg.threshold, cfg.consecutive_samples);
    if (hit_a && hit_b) {
      hit = std::min(*hit_a, *hit_b);
    } else {
      hit = hit_a ? hit_a : hit_b;
    }
  }
  const double peak = std::max(max_abs(res_a.samples()), max_abs(res_b.samples()));
  return DetectionVerdict{hit.has_value(), hit, peak, std::move(res_a), std::move(res_b)};
}

DetectionConfig calibrate_threshold(std::span<const Waveform> no_attack_residuals,
                                    double multiplier, std::size_t consecutive_samples) {
  if (no_attack_residuals.empty()) throw DomainError("calibrate_threshold needs residual data");
  if (no_attack_residuals.size() < kMinCalibrationTraces) {
    throw DomainError("calibrate_threshold needs at least 10 no-attack bits");
  }
  if (!(multiplier > 0.0)) throw ConfigError("detection multiplier must be positive");

  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& w : no_attack_residuals) {
    for (double x : w.samples()) acc += x * x;
    count += w.size();
  }
  const double pooled = std::sqrt(acc / static_cast<double>(count));
  const double threshold = std::max(multiplier * pooled, std::numeric_limits<double>::denorm_min());
  DetectionConfig cfg{threshold, consecutive_samples, pooled};
  cfg.validate();
  return cfg;
}

CableModel perturbed_model(const CableModel& model, double mismatch) {
  if (!(mismatch > -1.0)) throw ConfigError("model mismatch must exceed -1");
  CableModel m = model;
  const double s = 1.0 + mismatch;
  m.per_unit.r_per_m *= s;
  m.per_unit.l_per_m *= s;
  m.per_unit.c_per_m *= s;
  m.per_unit.g_per_m *= s;
  return m;
}

}  // namespace kljn
