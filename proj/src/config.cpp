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

#include "kljn/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kljn/errors.hpp"
#include "kljn/noise.hpp"

namespace kljn {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError(std::string(key) + ": expected " + std::string(want) + ", got '" +
                    std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, value, "a number");
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "a non-negative integer");
  return out;
}

std::string format_double(double v) {
  // Shortest text that parses back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

const char* kind_name(VariantKind k) {
  switch (k) {
    case VariantKind::Ideal: return "ideal";
    case VariantKind::Cable: return "cable";
    case VariantKind::CableWithKiller: return "cable_killer";
  }
  return "?";
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what);
}

}  // namespace

const char* to_string(SelectionMode m) noexcept {
  switch (m) {
    case SelectionMode::RandomizedLHHL: return "randomized_lhhl";
    case SelectionMode::FixedLH: return "fixed_lh";
    case SelectionMode::Independent: return "independent";
  }
  return "?";
}

void SimConfig::validate() const {
  require(r_l > 0.0, "r_l", "must be positive");
  require(r_h > 0.0, "r_h", "must be positive");
  require(r_l < r_h, "r_l", "must be smaller than r_h");
  require(t_eff > 0.0, "t_eff", "must be positive");
  require(bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
  require(tau_s > 0.0, "tau_s", "must be positive");
  require(sample_rate_hz >= 4.0 * bandwidth_hz, "sample_rate_hz", "must be at least 4 x bandwidth_hz");
  const double samples = tau_s * sample_rate_hz;
  require(std::abs(samples - std::round(samples)) <= 1e-9 * samples, "tau_s",
          "tau_s x sample_rate_hz must be an integer");
  require(n_bits >= 1, "n_bits", "must be at least 1");
  require(injection_position >= 0.0 && injection_position <= 1.0, "injection_position",
          "must lie in [0, 1]");
  if (injection_level) {
    require(*injection_level >= 0.0 && *injection_level < 1.0, "injection_level",
            "must lie in [0, 1)");
  }
  if (detection_threshold) require(*detection_threshold > 0.0, "detection_threshold", "must be positive");
  require(detection_multiplier > 0.0, "detection_multiplier", "must be positive");
  require(detection_consecutive >= 1, "detection_consecutive", "must be at least 1");
  require(calibration_bits >= 10, "calibration_bits", "must be at least 10");
  require(defense_model_mismatch > -1.0, "defense_model_mismatch", "must exceed -1");
  if (variant.has_cable()) {
    require(variant.length_m > 0.0, "cable_length_m", "must be positive");
    require(variant.n_segments >= 1, "cable_segments", "must be at least 1");
    (void)cable_model();
  }
  if (defense_variant.has_cable()) {
    require(defense_variant.length_m > 0.0, "defense_cable_length_m", "must be positive");
    require(defense_variant.n_segments >= 1, "defense_cable_segments", "must be at least 1");
    (void)build_cable_model(defense_variant.length_m, defense_variant.n_segments,
                            defense_variant.kind == VariantKind::CableWithKiller, bandwidth_hz, cable);
  }
  NoiseSpec probe{bandwidth_hz, sample_rate_hz, tau_s, 1.0, 0};
  probe.validate();
}

std::size_t SimConfig::samples_per_bit() const {
  return static_cast<std::size_t>(std::llround(tau_s * sample_rate_hz));
}

LoopConfig SimConfig::loop_config(double r_alice, double r_bob) const {
  return LoopConfig{r_alice, r_bob, variant, injection_position};
}

std::optional<CableModel> SimConfig::cable_model() const {
  if (!variant.has_cable()) return std::nullopt;
  return build_cable_model(variant.length_m, variant.n_segments,
                           variant.kind == VariantKind::CableWithKiller, bandwidth_hz, cable);
}

std::optional<InjectionSpec> SimConfig::injection() const {
  if (!injection_level) return std::nullopt;
  return InjectionSpec{*injection_level, bandwidth_hz, injection_seed};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "r_l",           "r_h",
      "t_eff",         "bandwidth_hz",
      "tau_s",         "sample_rate_hz",
      "n_bits",        "variant",
      "cable_length_m", "cable_segments",
      "cable_r_per_m", "cable_l_per_m",
      "cable_c_per_m", "cable_g_per_m",
      "defense_variant", "defense_cable_length_m",
      "defense_cable_segments",
      "injection_position", "injection_level",
      "injection_reference", "injection_seed",
      "selection_mode", "detection_threshold",
      "detection_multiplier", "detection_consecutive",
      "detection_both_ends",
      "calibration_bits", "defense_model_mismatch",
      "master_seed",   "workers",
  };
  return keys;
}

void apply_setting(SimConfig& cfg, std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  const auto num = [&] { return parse_double(key, value); };
  const auto uint = [&] { return parse_unsigned(key, value); };

  const auto kind = [&] {
    if (value == "ideal") return VariantKind::Ideal;
    if (value == "cable") return VariantKind::Cable;
    if (value == "cable_killer") return VariantKind::CableWithKiller;
    bad_value(key, value, "ideal, cable or cable_killer");
  };

  if (key == "r_l") cfg.r_l = num();
  else if (key == "r_h") cfg.r_h = num();
  else if (key == "t_eff") cfg.t_eff = num();
  else if (key == "bandwidth_hz") cfg.bandwidth_hz = num();
  else if (key == "tau_s") cfg.tau_s = num();
  else if (key == "sample_rate_hz") cfg.sample_rate_hz = num();
  else if (key == "n_bits") cfg.n_bits = uint();
  else if (key == "variant") cfg.variant.kind = kind();
  else if (key == "cable_length_m") cfg.variant.length_m = num();
  else if (key == "cable_segments") cfg.variant.n_segments = uint();
  else if (key == "cable_r_per_m") cfg.cable.r_per_m = num();
  else if (key == "cable_l_per_m") cfg.cable.l_per_m = num();
  else if (key == "cable_c_per_m") cfg.cable.c_per_m = num();
  else if (key == "cable_g_per_m") cfg.cable.g_per_m = num();
  else if (key == "defense_variant") cfg.defense_variant.kind = kind();
  else if (key == "defense_cable_length_m") cfg.defense_variant.length_m = num();
  else if (key == "defense_cable_segments") cfg.defense_variant.n_segments = uint();
  else if (key == "injection_position") cfg.injection_position = num();
  else if (key == "injection_level") {
    if (value == "none") cfg.injection_level.reset();
    else cfg.injection_level = num();
  }
  else if (key == "injection_reference") {
    if (value == "analytic") cfg.injection_reference = InjectionReference::Analytic;
    else if (value == "empirical") cfg.injection_reference = InjectionReference::Empirical;
    else bad_value(key, value, "analytic or empirical");
  }
  else if (key == "injection_seed") cfg.injection_seed = uint();
  else if (key == "selection_mode") {
    if (value == "randomized_lhhl") cfg.selection_mode = SelectionMode::RandomizedLHHL;
    else if (value == "fixed_lh") cfg.selection_mode = SelectionMode::FixedLH;
    else if (value == "independent") cfg.selection_mode = SelectionMode::Independent;
    else bad_value(key, value, "randomized_lhhl, fixed_lh or independent");
  }
  else if (key == "detection_threshold") {
    if (value == "auto") cfg.detection_threshold.reset();
    else cfg.detection_threshold = num();
  }
  else if (key == "detection_multiplier") cfg.detection_multiplier = num();
  else if (key == "detection_consecutive") cfg.detection_consecutive = uint();
  else if (key == "detection_both_ends") {
    if (value == "true") cfg.detection_both_ends = true;
    else if (value == "false") cfg.detection_both_ends = false;
    else bad_value(key, value, "true or false");
  }
  else if (key == "calibration_bits") cfg.calibration_bits = uint();
  else if (key == "defense_model_mismatch") cfg.defense_model_mismatch = num();
  else if (key == "master_seed") cfg.master_seed = uint();
  else if (key == "workers") cfg.workers = uint();
  else throw ConfigError("unknown configuration key '" + key + "'");
}

std::string get_setting(const SimConfig& cfg, std::string_view key) {
  const auto d = format_double;
  const auto u = [](std::uint64_t v) { return std::to_string(v); };
  if (key == "r_l") return d(cfg.r_l);
  if (key == "r_h") return d(cfg.r_h);
  if (key == "t_eff") return d(cfg.t_eff);
  if (key == "bandwidth_hz") return d(cfg.bandwidth_hz);
  if (key == "tau_s") return d(cfg.tau_s);
  if (key == "sample_rate_hz") return d(cfg.sample_rate_hz);
  if (key == "n_bits") return u(cfg.n_bits);
  if (key == "variant") return kind_name(cfg.variant.kind);
  if (key == "defense_variant") return kind_name(cfg.defense_variant.kind);
  if (key == "defense_cable_length_m") return d(cfg.defense_variant.length_m);
  if (key == "defense_cable_segments") return u(cfg.defense_variant.n_segments);
  if (key == "cable_length_m") return d(cfg.variant.length_m);
  if (key == "cable_segments") return u(cfg.variant.n_segments);
  if (key == "cable_r_per_m") return d(cfg.cable.r_per_m);
  if (key == "cable_l_per_m") return d(cfg.cable.l_per_m);
  if (key == "cable_c_per_m") return d(cfg.cable.c_per_m);
  if (key == "cable_g_per_m") return d(cfg.cable.g_per_m);
  if (key == "injection_position") return d(cfg.injection_position);
  if (key == "injection_level") return cfg.injection_level ? d(*cfg.injection_level) : "none";
  if (key == "injection_reference") {
    return cfg.injection_reference == InjectionReference::Analytic ? "analytic" : "empirical";
  }
  if (key == "injection_seed") return u(cfg.injection_seed);
  if (key == "selection_mode") return to_string(cfg.selection_mode);
  if (key == "detection_threshold") return cfg.detection_threshold ? d(*cfg.detection_threshold) : "auto";
  if (key == "detection_multiplier") return d(cfg.detection_multiplier);
  if (key == "detection_consecutive") return u(cfg.detection_consecutive);
  if (key == "detection_both_ends") return cfg.detection_both_ends ? "true" : "false";
  if (key == "calibration_bits") return u(cfg.calibration_bits);
  if (key == "defense_model_mismatch") return d(cfg.defense_model_mismatch);
  if (key == "master_seed") return u(cfg.master_seed);
  if (key == "workers") return u(cfg.workers);
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

SimConfig parse_config_text(std::string_view text) {
  SimConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_setting(cfg, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read configuration file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string format_config(const SimConfig& cfg) {
  std::string out;
  for (const auto& key : config_keys()) out += key + " = " + get_setting(cfg, key) + "\n";
  return out;
}

}  // namespace kljn
