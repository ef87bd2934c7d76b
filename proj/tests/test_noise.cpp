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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "kljn/errors.hpp"
#include "kljn/noise.hpp"
#include "support.hpp"

using namespace kljn;

TEST_CASE("johnson voltage follows sqrt(4kTRB)") {
  // 4 * 1.380649e-23 * 7.25e16 * 250 = 1.0009705...e-3 V^2/ohm, by hand.
  const double per_ohm = 4.0 * 1.380649 * 7.25 * 250.0 * 1e-7;
  CHECK(johnson_rms_voltage(1000.0, 7.25e16, 250.0) ==
        doctest::Approx(std::sqrt(per_ohm * 1000.0)).epsilon(1e-12));
  CHECK(johnson_rms_voltage(9000.0, 7.25e16, 250.0) ==
        doctest::Approx(std::sqrt(per_ohm * 9000.0)).epsilon(1e-12));

  // About 1.0002 V and 3.0007 V; the residual 3e-4 comes from rounding k to 1.38e-23.
  CHECK(johnson_rms_voltage(1000.0, 7.25e16, 250.0) == doctest::Approx(1.0002).epsilon(5e-4));
  CHECK(johnson_rms_voltage(9000.0, 7.25e16, 250.0) == doctest::Approx(3.0007).epsilon(5e-4));
  CHECK(johnson_rms_voltage(9000.0, 7.25e16, 250.0) ==
        doctest::Approx(3.0 * johnson_rms_voltage(1000.0, 7.25e16, 250.0)).epsilon(1e-14));
}

TEST_CASE("johnson voltage vanishes toward zero temperature") {
  CHECK(johnson_rms_voltage(1.0, 1e-300, 250.0) < 1e-140);
  CHECK_THROWS_AS(johnson_rms_voltage(1.0, 0.0, 250.0), DomainError);
  CHECK_THROWS_AS(johnson_rms_voltage(-5.0, 300.0, 250.0), DomainError);
  CHECK_THROWS_AS(johnson_rms_voltage(1.0, 300.0, 0.0), DomainError);
}

TEST_CASE("rms of simple sequences") {
  CHECK(rms(std::vector<double>(17, 3.0)) == doctest::Approx(3.0));
  CHECK(rms(std::vector<double>{1, -1, 1, -1, 1, -1}) == doctest::Approx(1.0));
  CHECK(rms(std::vector<double>{0.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(rms(std::vector<double>{}), DomainError);
}

TEST_CASE("noise spec preconditions") {
  NoiseSpec spec;
  CHECK(spec.sample_count() == 200);
  CHECK(populated_bins(spec) == 25);

  spec.target_rms = 0.0;
  CHECK_THROWS_AS(synth_band_limited_gaussian(spec), ConfigError);
  spec = NoiseSpec{};
  spec.sample_rate_hz = 900.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = NoiseSpec{};
  spec.duration_s = 0.10025;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = NoiseSpec{};
  spec.duration_s = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("long noise record has the target moments") {
  const NoiseSpec spec{250.0, 2000.0, 10.0, 1.0, 42};
  const Waveform w = synth_band_limited_gaussian(spec);
  REQUIRE(w.size() == 20000);
  const auto x = w.samples();
  const double m = test::mean(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  CHECK(rms(w) >= 0.98);
  CHECK(rms(w) <= 1.02);
  CHECK(std::abs(m3 / std::pow(m2, 1.5)) <= 0.1);
  CHECK(std::abs(m4 / (m2 * m2) - 3.0) <= 0.1);
  CHECK(std::abs(m) < 1e-12);  // DC bin is left empty
}

TEST_CASE("same spec gives the same samples") {
  const NoiseSpec spec{250.0, 2000.0, 0.1, 2.5, 7};
  CHECK(synth_band_limited_gaussian(spec) == synth_band_limited_gaussian(spec));
  NoiseSpec other = spec;
  other.seed = 8;
  CHECK_FALSE(synth_band_limited_gaussian(spec) == synth_band_limited_gaussian(other));
}

TEST_CASE("amplitude scales linearly with target rms") {
  NoiseSpec spec{250.0, 2000.0, 0.1, 0.7, 99};
  const Waveform base = synth_band_limited_gaussian(spec);
  spec.target_rms = 0.7 * 3.5;
  const Waveform scaled = synth_band_limited_gaussian(spec);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled[i] == doctest::Approx(3.5 * base[i]).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("different seeds are uncorrelated") {
  const double bound = 4.0 / std::sqrt(2.0 * 250.0 * 0.1);
  int inside = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const auto a = synth_band_limited_gaussian({250.0, 2000.0, 0.1, 1.0, 1000u + 2u * t});
    const auto b = synth_band_limited_gaussian({250.0, 2000.0, 0.1, 1.0, 1001u + 2u * t});
    double ab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i];
    const double rho = ab / (static_cast<double>(a.size()) * rms(a) * rms(b));
    if (std::abs(rho) < bound) ++inside;
  }
  CHECK(inside >= 0.95 * trials);
}

TEST_CASE("spectrum is flat in band and empty above it") {
  const NoiseSpec spec{250.0, 2000.0, 100.0, 1.0, 2024};
  const Waveform w = synth_band_limited_gaussian(spec);
  const std::size_t segment = 1024;
  const auto psd = test::welch_psd(w.samples(), spec.sample_rate_hz, segment);
  const double df = spec.sample_rate_hz / static_cast<double>(segment);
  const double flat = 1.0 / spec.bandwidth_hz;  // unit variance spread over (0, B]

  double worst_db = 0.0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < 10.0 || f > 240.0) continue;
    worst_db = std::max(worst_db, std::abs(10.0 * std::log10(psd[k] / flat)));
  }
  CHECK(worst_db <= 1.0);

  const auto at_2b = static_cast<std::size_t>(std::lround(2.0 * spec.bandwidth_hz / df));
  CHECK(10.0 * std::log10(psd[at_2b] / flat) <= -40.0);
}
