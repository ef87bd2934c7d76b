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

#include "kljn/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include <boost/random/normal_distribution.hpp>

#include "kljn/errors.hpp"
#include "kljn/seeds.hpp"

namespace kljn {
namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

// The FFTW planner is not re-entrant; executing an existing plan on new
// arrays is. Plans are created once per length and kept for the process.
class InversePlanCache {
 public:
  fftw_plan get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto in = fftw_buffer<fftw_complex>(n / 2 + 1);
    auto out = fftw_buffer<double>(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    plans_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

InversePlanCache& plan_cache() {
  static InversePlanCache cache;
  return cache;
}

}  // namespace

double johnson_rms_voltage(double resistance, double t_eff, double bandwidth_hz) {
  if (!(resistance > 0.0) || !(t_eff > 0.0) || !(bandwidth_hz > 0.0)) {
    throw DomainError("johnson_rms_voltage: resistance, temperature and bandwidth must be positive");
  }
  return std::sqrt(4.0 * kBoltzmann * t_eff * resistance * bandwidth_hz);
}

std::size_t NoiseSpec::sample_count() const {
  const double exact = duration_s * sample_rate_hz;
  return static_cast<std::size_t>(std::llround(exact));
}

void NoiseSpec::validate() const {
  if (!(bandwidth_hz > 0.0)) throw ConfigError("noise bandwidth_hz must be positive");
  if (!(sample_rate_hz >= 4.0 * bandwidth_hz)) {
    throw ConfigError("noise sample_rate_hz must be at least 4 x bandwidth_hz");
  }
  if (!(duration_s > 0.0)) throw ConfigError("noise duration_s must be positive");
  const double exact = duration_s * sample_rate_hz;
  const double rounded = std::round(exact);
  if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * exact) {
    throw ConfigError("noise duration_s x sample_rate_hz must be a positive integer");
  }
  if (!(target_rms > 0.0) || !std::isfinite(target_rms)) {
    throw ConfigError("noise target_rms must be positive");
  }
  if (populated_bins(*this) == 0) {
    throw ConfigError("noise duration_s too short to hold any in-band frequency");
  }
}

std::size_t populated_bins(const NoiseSpec& spec) {
  // Bin k sits at k * fs / n; keep 1 <= k with k * fs / n <= B.
  const double n = static_cast<double>(spec.sample_count());
  return static_cast<std::size_t>(std::floor(spec.bandwidth_hz * n / spec.sample_rate_hz + 1e-9));
}

Waveform synth_band_limited_gaussian(const NoiseSpec& spec) {
  spec.validate();
  const std::size_t n = spec.sample_count();
  const std::size_t bins = populated_bins(spec);

  auto spectrum = fftw_buffer<fftw_complex>(n / 2 + 1);
  auto out = fftw_buffer<double>(n);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    spectrum[k][0] = 0.0;
    spectrum[k][1] = 0.0;
  }

  RngStream rng(spec.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 1; k <= bins; ++k) {
    spectrum[k][0] = normal(rng);
    spectrum[k][1] = normal(rng);
  }

  fftw_execute_dft_c2r(plan_cache().get(n), spectrum.get(), out.get());

  // Unnormalized c2r: x[t] = 2 sum_k Re(X_k e^{i...}); each bin adds
  // variance 4, so sigma = 2 sqrt(bins).
  const double scale = spec.target_rms / (2.0 * std::sqrt(static_cast<double>(bins)));
  std::vector<double> samples(out.get(), out.get() + n);
  for (double& s : samples) s *= scale;
  return Waveform(std::move(samples), spec.sample_rate_hz);
}

double rms(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("rms of an empty waveform");
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

}  // namespace kljn
