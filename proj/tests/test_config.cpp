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

#include <fstream>
#include <string>

#include "kljn/config.hpp"
#include "kljn/errors.hpp"
#include "support.hpp"

using namespace kljn;

namespace {

std::string message_of(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty config gives the reference parameters") {
  const SimConfig cfg = parse_config_text("");
  CHECK(cfg == SimConfig{});
  CHECK(cfg.r_l == 1000.0);
  CHECK(cfg.r_h == 9000.0);
  CHECK(cfg.t_eff == 7.25e16);
  CHECK(cfg.bandwidth_hz == 250.0);
  CHECK(cfg.tau_s == 0.1);
  CHECK(cfg.n_bits == 10000);
  CHECK(cfg.samples_per_bit() == 200);
  CHECK(parse_config_text("# only a comment\n\n   \n") == SimConfig{});
}

TEST_CASE("settings are parsed by key") {
  const SimConfig cfg = parse_config_text(
      "n_bits = 250\n"
      "variant = cable_killer   # trailing comment\n"
      "cable_length_m = 100\n"
      "injection_level = none\n"
      "detection_threshold = 1e-9\n"
      "detection_both_ends = false\n"
      "selection_mode = fixed_lh\n"
      "defense_variant = ideal\n"
      "master_seed = 18446744073709551615\n");
  CHECK(cfg.n_bits == 250);
  CHECK(cfg.variant == CircuitVariant::cable_with_killer(100.0, 10));
  CHECK_FALSE(cfg.injection_level.has_value());
  CHECK(*cfg.detection_threshold == 1e-9);
  CHECK_FALSE(cfg.detection_both_ends);
  CHECK(cfg.selection_mode == SelectionMode::FixedLH);
  CHECK(cfg.defense_variant.kind == VariantKind::Ideal);
  CHECK(cfg.master_seed == 18446744073709551615ULL);
  CHECK(cfg.cable_model()->total_capacitance() == doctest::Approx(10e-9));
}

TEST_CASE("errors name the offending key") {
  CHECK(message_of("n_bits = -1").find("n_bits") != std::string::npos);
  CHECK(message_of("n_bits = 0").find("n_bits") != std::string::npos);
  CHECK(message_of("r_l = abc").find("r_l") != std::string::npos);
  CHECK(message_of("bogus_key = 1").find("bogus_key") != std::string::npos);
  CHECK(message_of("variant = coax").find("variant") != std::string::npos);
  CHECK(message_of("tau_s = 0").find("tau_s") != std::string::npos);
  CHECK(message_of("r_l = 9000\nr_h = 1000").find("r_l") != std::string::npos);
  CHECK(message_of("injection_level = 1.5").find("injection_level") != std::string::npos);
  CHECK(message_of("detection_multiplier = 0").find("detection_multiplier") != std::string::npos);
  CHECK(message_of("calibration_bits = 5").find("calibration_bits") != std::string::npos);
  CHECK(message_of("sample_rate_hz = 600").find("sample_rate_hz") != std::string::npos);
  CHECK(message_of("n_bits 12").find("line 1") != std::string::npos);
  CHECK(message_of("tau_s = 0.1\nsample_rate_hz = 2500").empty());
}

TEST_CASE("formatted config parses back to the same value") {
  CHECK(parse_config_text(format_config(SimConfig{})) == SimConfig{});

  SimConfig odd;
  odd.t_eff = 1.0 / 3.0 * 1e17;
  odd.injection_level.reset();
  odd.detection_threshold = 2.5e-13;
  odd.variant = CircuitVariant::cable(123.456, 17);
  odd.selection_mode = SelectionMode::Independent;
  odd.injection_reference = InjectionReference::Empirical;
  odd.master_seed = 987654321;
  odd.workers = 3;
  CHECK(parse_config_text(format_config(odd)) == odd);

  for (const auto& key : config_keys()) {
    SimConfig c;
    CHECK_NOTHROW(apply_setting(c, key, get_setting(odd, key)));
  }
}

TEST_CASE("config files") {
  const auto dir = test::scratch_dir("config");
  const auto path = dir / "run.cfg";
  {
    std::ofstream out(path);
    out << "n_bits = 42\nmaster_seed = 9\n";
  }
  const SimConfig cfg = parse_config(path);
  CHECK(cfg.n_bits == 42);
  CHECK(cfg.master_seed == 9);
  CHECK_THROWS_AS(parse_config(dir / "missing.cfg"), IoError);
}
