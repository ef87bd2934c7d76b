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

#include "kljn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "kljn/errors.hpp"
#include "kljn/privacy.hpp"

namespace kljn {
namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

Arrangement arrangement_of(BitClass c) {
  return c == BitClass::SecureLH ? Arrangement::LH : Arrangement::HL;
}

SuccessEstimate estimate_from_fraction(double p, std::size_t n) {
  return {p, n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0, n};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_trace(const std::filesystem::path& path, const Waveform& w) {
  auto out = open_output(path);
  out << "time_s,residual_A\n";
  for (std::size_t t = 0; t < w.size(); ++t) {
    out << fmt("%.6f", static_cast<double>(t) * w.dt()) << ',' << fmt("%.9e", w[t]) << '\n';
  }
  finish(out, path);
}

// Verdict of whichever defense applies to the variant.
DetectionVerdict defend(const SimConfig& cfg, const std::optional<CableModel>& defense_model,
                        const BitExchangeRecord& rec, const DetectionConfig& detection) {
  if (!defense_model) {
    const auto loop = rec.signals.in_convention(SignConvention::Loop);
    return compare_instantaneous_ideal(loop.i_cha, loop.i_chb, detection);
  }
  const LoopConfig lc = cfg.loop_config(rec.alice_choice.resistance, rec.bob_choice.resistance);
  const auto expected = simulate_expected_currents(*defense_model, lc, rec.signals.u_cha,
                                                   rec.signals.u_chb);
  return model_based_detect(rec.signals, expected, detection);
}

}  // namespace

void parallel_for_bits(std::size_t n, std::size_t workers,
                       const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<AttackedBit> run_attack_bits(const SimConfig& cfg) {
  cfg.validate();
  const auto model = cfg.cable_model();
  // Without an injection Eve still runs her correlators on a zero probe.
  const InjectionSpec injection =
      cfg.injection().value_or(InjectionSpec{0.0, cfg.bandwidth_hz, cfg.injection_seed});

  std::vector<AttackedBit> bits(cfg.n_bits);
  parallel_for_bits(cfg.n_bits, cfg.workers, [&](std::size_t i) {
    const BitSeeds seeds = BitSeeds::derive(cfg.master_seed, SeedDomain::Exchange, i);
    const BitExchangeRecord rec = run_bit_exchange(cfg, model, i, seeds, injection);
    AttackedBit& out = bits[i];
    out.classification = rec.classification;
    out.honest_correct = rec.honest_correct();
    if (is_secure(rec.classification)) {
      RngStream coin(seeds.eve_coin);
      const Arrangement truth = arrangement_of(rec.classification);
      out.attack = attack_bit(rec.signals, *rec.injected, truth, coin);
      out.key_bit = truth == Arrangement::HL ? 1 : 0;
      out.eve_bit = out.attack->guess == Arrangement::HL ? 1 : 0;
    }
  });
  return bits;
}

Table1Grid Table1Grid::reference(std::size_t n_segments) {
  return Table1Grid{{CircuitVariant::ideal(), CircuitVariant::cable(100.0, n_segments),
                     CircuitVariant::cable(1000.0, n_segments),
                     CircuitVariant::cable_with_killer(1000.0, n_segments)},
                    {0.001, 0.01, 0.1}};
}

ExperimentReport run_table1(const SimConfig& cfg, const Table1Grid& grid) {
  cfg.validate();
  Table1Report table;
  for (const auto& variant : grid.variants) {
    for (double level : grid.levels) {
      SimConfig cell = cfg;
      cell.variant = variant;
      cell.injection_level = level;
      const auto bits = run_attack_bits(cell);

      std::vector<std::uint8_t> q;
      std::vector<std::uint8_t> honest;
      for (const auto& b : bits) {
        if (!b.attack) continue;
        q.push_back(b.attack->correct ? 1 : 0);
        honest.push_back(b.honest_correct ? 1 : 0);
      }
      if (q.empty()) throw DomainError("no secure bits in Table 1 cell " + variant.label());
      table.cells.push_back({variant, level, success_probability(q), success_probability(honest)});
    }
  }
  ExperimentReport report{cfg, std::move(table), std::nullopt, std::nullopt, std::nullopt};
  return report;
}

ExperimentReport run_defense_experiment(const SimConfig& base) {
  base.validate();
  SimConfig cfg = base;
  cfg.variant = base.defense_variant;
  const auto injection = cfg.injection();
  if (!injection) throw ConfigError("injection_level: the defense experiment needs an injection");

  const auto model = cfg.cable_model();
  std::optional<CableModel> defense_model;
  if (model) defense_model = perturbed_model(*model, cfg.defense_model_mismatch);

  DetectionConfig detection;
  if (cfg.detection_threshold) {
    detection = DetectionConfig{*cfg.detection_threshold, cfg.detection_consecutive, std::nullopt};
    detection.validate();
  } else {
    // Residuals of unattacked calibration bits; both ends for the cable check.
    std::vector<std::vector<Waveform>> per_bit(cfg.calibration_bits);
    parallel_for_bits(cfg.calibration_bits, cfg.workers, [&](std::size_t i) {
      const BitSeeds seeds = BitSeeds::derive(cfg.master_seed, SeedDomain::Calibration, i);
      const auto rec = run_bit_exchange(cfg, model, i, seeds, std::nullopt);
      // Only the residual traces matter here, so the probe threshold never fires.
      const DetectionConfig probe{std::numeric_limits<double>::max(), 1, std::nullopt};
      auto verdict = defend(cfg, defense_model, rec, probe);
      per_bit[i].push_back(std::move(verdict.residual_trace));
      if (verdict.residual_trace_bob) per_bit[i].push_back(std::move(*verdict.residual_trace_bob));
    });
    std::vector<Waveform> traces;
    for (auto& v : per_bit) {
      for (auto& w : v) traces.push_back(std::move(w));
    }
    detection = calibrate_threshold(traces, cfg.detection_multiplier, cfg.detection_consecutive);
  }
  detection.both_ends = cfg.detection_both_ends;

  struct PairResult {
    DefenseBitRow clean;
    DefenseBitRow attacked;
    std::optional<Waveform> clean_trace;
    std::optional<Waveform> attacked_trace;
  };
  std::vector<std::optional<PairResult>> pairs(cfg.n_bits);
  parallel_for_bits(cfg.n_bits, cfg.workers, [&](std::size_t i) {
    const BitSeeds seeds = BitSeeds::derive(cfg.master_seed, SeedDomain::Exchange, i);
    const auto clean = run_bit_exchange(cfg, model, i, seeds, std::nullopt);
    const auto hit = run_bit_exchange(cfg, model, i, seeds, injection);
    auto v_clean = defend(cfg, defense_model, clean, detection);
    auto v_hit = defend(cfg, defense_model, hit, detection);
    PairResult r{{i, false, v_clean.attacked, v_clean.latency_fraction(), v_clean.max_residual},
                 {i, true, v_hit.attacked, v_hit.latency_fraction(), v_hit.max_residual},
                 std::nullopt,
                 std::nullopt};
    if (i == 0) {
      r.clean_trace = std::move(v_clean.residual_trace);
      r.attacked_trace = std::move(v_hit.residual_trace);
    }
    pairs[i] = std::move(r);
  });

  DefenseReport rep{cfg.variant, injection->level_fraction, detection, {}, {}, 0.0, 0.0, {},
                    std::nullopt, std::nullopt};
  std::vector<std::uint8_t> detected;
  std::vector<std::uint8_t> false_alarm;
  std::vector<double> latencies;
  for (auto& p : pairs) {
    detected.push_back(p->attacked.detected ? 1 : 0);
    false_alarm.push_back(p->clean.detected ? 1 : 0);
    if (p->attacked.latency_fraction) latencies.push_back(*p->attacked.latency_fraction);
    rep.rows.push_back(p->clean);
    rep.rows.push_back(p->attacked);
    if (p->clean_trace) rep.trace_clean = std::move(p->clean_trace);
    if (p->attacked_trace) rep.trace_attacked = std::move(p->attacked_trace);
  }
  rep.detection_rate = success_probability(detected);
  rep.false_positive_rate = success_probability(false_alarm);
  rep.median_latency_fraction = median(latencies);
  rep.mean_latency_fraction =
      latencies.empty() ? 0.0
                        : std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                              static_cast<double>(latencies.size());

  return ExperimentReport{base, std::nullopt, std::move(rep), std::nullopt, std::nullopt};
}

bool PrivacyReport::closed_form_consistent() const {
  const auto within = [](const SuccessEstimate& e, double predicted) {
    const double sigma = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(e.n));
    return std::abs(e.p_e - predicted) <= 3.0 * sigma;
  };
  return within(after_one_pass, predicted_one_pass) && within(after_two_passes, predicted_two_passes);
}

std::vector<PrivacyStage> PrivacyReport::stages() const {
  return {
      {"raw", raw.p_e, raw.std_error, key_length_raw},
      {"xor1", after_one_pass.p_e, after_one_pass.std_error, key_length_one_pass},
      {"xor2", after_two_passes.p_e, after_two_passes.std_error, key_length_two_passes},
      {"predicted_xor1", predicted_one_pass, 0.0, key_length_one_pass},
      {"predicted_xor2", predicted_two_passes, 0.0, key_length_two_passes},
  };
}

ExperimentReport run_privacy_experiment(const SimConfig& cfg) {
  cfg.validate();
  const auto bits = run_attack_bits(cfg);
  KeyBits truth{{}, KeyProvenance::True};
  KeyBits eve{{}, KeyProvenance::EveGuess};
  std::vector<std::uint8_t> q;
  for (const auto& b : bits) {
    if (!b.attack) continue;
    truth.bits.push_back(b.key_bit);
    eve.bits.push_back(b.eve_bit);
    q.push_back(b.attack->correct ? 1 : 0);
  }
  if (truth.bits.size() < 4) throw DomainError("privacy amplification needs at least 4 secure bits");

  PrivacyReport rep;
  rep.raw = success_probability(q);
  rep.key_length_raw = truth.bits.size();
  rep.key_length_one_pass = truth.bits.size() / 2;
  rep.key_length_two_passes = truth.bits.size() / 2 / 2;
  rep.after_one_pass =
      estimate_from_fraction(eve_success_after_amplification(truth, eve, 1), rep.key_length_one_pass);
  rep.after_two_passes = estimate_from_fraction(eve_success_after_amplification(truth, eve, 2),
                                                rep.key_length_two_passes);
  rep.predicted_one_pass = predicted_leak_after_xor(rep.raw.p_e);
  rep.predicted_two_passes = predicted_leak_after_xor(rep.predicted_one_pass);
  return ExperimentReport{cfg, std::nullopt, std::nullopt, std::move(rep), std::nullopt};
}

ExperimentReport run_single_bit(const SimConfig& cfg, std::uint64_t bit_index) {
  cfg.validate();
  const auto model = cfg.cable_model();
  const BitSeeds seeds = BitSeeds::derive(cfg.master_seed, SeedDomain::Exchange, bit_index);
  auto rec = run_bit_exchange(cfg, model, bit_index, seeds, cfg.injection());
  std::optional<BitAttackOutcome> attack;
  if (rec.injected && is_secure(rec.classification)) {
    RngStream coin(seeds.eve_coin);
    attack = attack_bit(rec.signals, *rec.injected, arrangement_of(rec.classification), coin);
  }
  return ExperimentReport{cfg, std::nullopt, std::nullopt, std::nullopt,
                          SingleBitReport{std::move(rec), attack}};
}

std::string ExperimentReport::summary() const {
  std::ostringstream os;
  os << "seed " << config.master_seed << ", " << config.n_bits << " bits per run, tau "
     << config.tau_s << " s, B " << config.bandwidth_hz << " Hz, fs " << config.sample_rate_hz
     << " Hz\n";
  if (table1) {
    os << "\nEve success probability (secure bits)\n";
    os << "  variant               level    p_E       stderr    n      honest_ok\n";
    for (const auto& c : table1->cells) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-20s  %-7g  %.4f    %.4f    %-6zu %.4f\n",
                    c.variant.label().c_str(), c.level, c.p_e.p_e, c.p_e.std_error, c.p_e.n,
                    c.honest.p_e);
      os << line;
    }
  }
  if (defense) {
    const auto& d = *defense;
    os << "\nDefense on " << d.variant.label() << " at injection level " << d.level << "\n";
    os << "  threshold            " << fmt("%.3e", d.detection.threshold) << " A ("
       << d.detection.consecutive_samples << " consecutive samples"
       << (d.detection.both_ends && d.variant.has_cable() ? ", both ends" : "") << ")\n";
    os << "  detection rate       " << fmt("%.4f", d.detection_rate.p_e) << " (n = "
       << d.detection_rate.n << ", stderr " << fmt("%.4f", d.detection_rate.std_error) << ")\n";
    os << "  false positive rate  " << fmt("%.4f", d.false_positive_rate.p_e) << " (n = "
       << d.false_positive_rate.n << ", stderr " << fmt("%.4f", d.false_positive_rate.std_error)
       << ")\n";
    os << "  latency / tau        median " << fmt("%.4f", d.median_latency_fraction) << ", mean "
       << fmt("%.4f", d.mean_latency_fraction) << "\n";
  }
  if (privacy) {
    os << "\nXOR privacy amplification\n";
    for (const auto& s : privacy->stages()) {
      char line[128];
      std::snprintf(line, sizeof line, "  %-15s p_E %.4f  stderr %.4f  key length %zu\n",
                    s.stage.c_str(), s.p_e, s.std_error, s.key_length);
      os << line;
    }
    os << "  closed form within 3 sigma: " << (privacy->closed_form_consistent() ? "yes" : "no")
       << "\n";
  }
  if (single_bit) {
    const auto& r = single_bit->record;
    os << "\nBit " << r.index << ": " << to_string(r.classification) << " (R_A "
       << r.alice_choice.resistance << ", R_B " << r.bob_choice.resistance << ")\n";
    if (r.alice_inferred_remote) {
      os << "  Alice infers remote " << fmt("%.1f", *r.alice_inferred_remote) << " ohm, Bob infers "
         << fmt("%.1f", *r.bob_inferred_remote) << " ohm, both correct: "
         << (r.honest_correct() ? "yes" : "no") << "\n";
    }
    if (single_bit->attack) {
      const auto& a = *single_bit->attack;
      os << "  rho_a " << fmt("%.6e", a.rho_a) << ", rho_b " << fmt("%.6e", a.rho_b)
         << ", Eve guesses " << (a.guess == Arrangement::LH ? "LH" : "HL") << " ("
         << (a.correct ? "correct" : "wrong") << ")\n";
    }
  }
  return os.str();
}

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  {
    const auto path = out_dir / "config.txt";
    auto out = open_output(path);
    out << format_config(report.config);
    finish(out, path);
  }
  {
    const auto path = out_dir / "summary.txt";
    auto out = open_output(path);
    out << report.summary();
    finish(out, path);
  }
  if (report.table1) {
    const auto path = out_dir / "table1.csv";
    auto out = open_output(path);
    out << "variant,level,p_e,stderr,n\n";
    for (const auto& c : report.table1->cells) {
      out << c.variant.label() << ',' << fmt("%g", c.level) << ',' << fmt("%.6f", c.p_e.p_e) << ','
          << fmt("%.6f", c.p_e.std_error) << ',' << c.p_e.n << '\n';
    }
    finish(out, path);
  }
  if (report.defense) {
    const auto& d = *report.defense;
    const auto path = out_dir / "defense.csv";
    auto out = open_output(path);
    out << "bit,attacked,detected,latency_fraction,max_residual\n";
    for (const auto& r : d.rows) {
      out << r.bit << ',' << (r.attacked ? 1 : 0) << ',' << (r.detected ? 1 : 0) << ','
          << (r.latency_fraction ? fmt("%.6f", *r.latency_fraction) : std::string()) << ','
          << fmt("%.9e", r.max_residual) << '\n';
    }
    finish(out, path);
    if (d.trace_attacked) write_trace(out_dir / "residual_trace_attacked.csv", *d.trace_attacked);
    if (d.trace_clean) write_trace(out_dir / "residual_trace_clean.csv", *d.trace_clean);
  }
  if (report.privacy) {
    const auto path = out_dir / "privacy.csv";
    auto out = open_output(path);
    out << "stage,p_e,stderr,key_length\n";
    for (const auto& s : report.privacy->stages()) {
      out << s.stage << ',' << fmt("%.6f", s.p_e) << ',' << fmt("%.6f", s.std_error) << ','
          << s.key_length << '\n';
    }
    finish(out, path);
  }
  if (report.single_bit) {
    const auto& r = report.single_bit->record;
    const auto path = out_dir / "single_bit.csv";
    auto out = open_output(path);
    out << "time_s,u_alice,u_bob,i_inj,i_cha,i_chb,u_cha,u_chb\n";
    const auto& s = r.signals;
    for (std::size_t t = 0; t < s.i_cha.size(); ++t) {
      out << fmt("%.6f", static_cast<double>(t) * s.i_cha.dt()) << ',' << fmt("%.9e", r.u_alice[t])
          << ',' << fmt("%.9e", r.u_bob[t]) << ',' << fmt("%.9e", r.injected ? (*r.injected)[t] : 0.0)
          << ',' << fmt("%.9e", s.i_cha[t]) << ',' << fmt("%.9e", s.i_chb[t]) << ','
          << fmt("%.9e", s.u_cha[t]) << ',' << fmt("%.9e", s.u_chb[t]) << '\n';
    }
    finish(out, path);
  }
}

}  // namespace kljn
