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

#include <boost/random/bernoulli_distribution.hpp>

#include "kljn/config.hpp"
#include "kljn/errors.hpp"
#include "kljn/harness.hpp"
#include "kljn/privacy.hpp"
#include "kljn/seeds.hpp"

using namespace kljn;

namespace {

// Probability that the XOR of two guesses is right, by listing the four
// outcomes of two independent guesses.
double enumerate_xor_success(double p) {
  double total = 0.0;
  for (int first = 0; first < 2; ++first) {
    for (int second = 0; second < 2; ++second) {
      const double weight = (first ? p : 1 - p) * (second ? p : 1 - p);
      const bool xor_right = first == second;  // two errors cancel
      if (xor_right) total += weight;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("xor compression") {
  CHECK(xor_compress({{1, 0, 1, 1}, KeyProvenance::True}).bits == std::vector<std::uint8_t>{1, 0});
  CHECK(xor_compress({std::vector<std::uint8_t>(8, 0), KeyProvenance::True}).bits ==
        std::vector<std::uint8_t>(4, 0));
  const auto odd = xor_compress({{1, 1, 0, 1, 1}, KeyProvenance::EveGuess});
  CHECK(odd.bits == std::vector<std::uint8_t>{0, 1});
  CHECK(odd.provenance == KeyProvenance::EveGuess);
  CHECK_THROWS_AS(xor_compress({{1}, KeyProvenance::True}), DomainError);
  CHECK_THROWS_AS(xor_compress({{}, KeyProvenance::True}), DomainError);
}

TEST_CASE("closed-form leak after one pass") {
  CHECK(predicted_leak_after_xor(0.5) == 0.5);
  CHECK(predicted_leak_after_xor(1.0) == 1.0);
  CHECK(predicted_leak_after_xor(0.613) == doctest::Approx(0.5256).epsilon(1e-4));
  CHECK(predicted_leak_after_xor(predicted_leak_after_xor(0.613)) == doctest::Approx(0.5013).epsilon(1e-4));
  for (int k = 0; k <= 20; ++k) {
    const double p = k / 20.0;
    CHECK(predicted_leak_after_xor(p) == doctest::Approx(enumerate_xor_success(p)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(predicted_leak_after_xor(-0.01), DomainError);
  CHECK_THROWS_AS(predicted_leak_after_xor(1.01), DomainError);
}

TEST_CASE("repeated passes contract toward one half") {
  for (double p : {0.51, 0.613, 0.8, 0.99}) {
    double q = p;
    // The excess over 1/2 squares each pass: p' - 1/2 = 2 (p - 1/2)^2.
    int passes = 0;
    while (q - 0.5 > 1e-6) {
      const double next = predicted_leak_after_xor(q);
      CHECK(next > 0.5);
      CHECK(next < q);
      CHECK(next - 0.5 == doctest::Approx(2.0 * (q - 0.5) * (q - 0.5)));
      q = next;
      ++passes;
    }
    CHECK(passes <= 12);
  }
}

TEST_CASE("agreement after amplification") {
  const KeyBits key{{1, 0, 0, 1, 1, 1, 0, 1}, KeyProvenance::True};
  for (std::size_t passes = 0; passes <= 2; ++passes) {
    CHECK(eve_success_after_amplification(key, {key.bits, KeyProvenance::EveGuess}, passes) == 1.0);
  }
  CHECK_THROWS_AS(eve_success_after_amplification(key, {{1, 0}, KeyProvenance::EveGuess}, 1),
                  ShapeError);

  RngStream rng(77);
  boost::random::bernoulli_distribution<> fair(0.5);
  KeyBits a{{}, KeyProvenance::True}, b{{}, KeyProvenance::EveGuess};
  for (int i = 0; i < 10000; ++i) {
    a.bits.push_back(fair(rng) ? 1 : 0);
    b.bits.push_back(fair(rng) ? 1 : 0);
  }
  CHECK(std::abs(eve_success_after_amplification(a, b, 1) - 0.5) <= 0.015);
}

TEST_CASE("pipeline matches the closed form on independent guesses") {
  RngStream rng(2024);
  boost::random::bernoulli_distribution<> fair(0.5);
  const std::size_t n = 1000000;
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    CAPTURE(p);
    boost::random::bernoulli_distribution<> right(p);
    KeyBits truth{std::vector<std::uint8_t>(n), KeyProvenance::True};
    KeyBits guess{std::vector<std::uint8_t>(n), KeyProvenance::EveGuess};
    for (std::size_t i = 0; i < n; ++i) {
      truth.bits[i] = fair(rng) ? 1 : 0;
      guess.bits[i] = right(rng) ? truth.bits[i] : static_cast<std::uint8_t>(1 - truth.bits[i]);
    }
    const double expected = predicted_leak_after_xor(p);
    const double sigma = std::sqrt(expected * (1 - expected) / (n / 2.0));
    CHECK(std::abs(eve_success_after_amplification(truth, guess, 1) - expected) <= 3.0 * sigma + 1e-15);
  }
}

TEST_CASE("privacy experiment key lengths") {
  SimConfig cfg;
  cfg.n_bits = 4;
  const auto rep = *run_privacy_experiment(cfg).privacy;
  CHECK(rep.key_length_raw == 4);
  CHECK(rep.key_length_one_pass == 2);
  CHECK(rep.key_length_two_passes == 1);
}

TEST_CASE("privacy chain at zero injection stays at one half") {
  SimConfig cfg;
  cfg.injection_level = 0.0;
  const auto rep = *run_privacy_experiment(cfg).privacy;
  CHECK(std::abs(rep.raw.p_e - 0.5) <= 3 * 0.005);
  CHECK(std::abs(rep.after_one_pass.p_e - 0.5) <= 3 * std::sqrt(0.25 / 5000.0));
  CHECK(std::abs(rep.after_two_passes.p_e - 0.5) <= 3 * std::sqrt(0.25 / 2500.0));
  CHECK(rep.closed_form_consistent());
}
