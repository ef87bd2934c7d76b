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

#include "kljn/kljn.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <exception>
#include <new>
#include <string>

#include "kljn/attack.hpp"
#include "kljn/config.hpp"
#include "kljn/errors.hpp"
#include "kljn/harness.hpp"
#include "kljn/noise.hpp"
#include "kljn/privacy.hpp"

struct kljn_config {
  kljn::SimConfig cfg;
};

struct kljn_report {
  kljn::ExperimentReport report;
  std::string summary;
};

namespace {

thread_local std::string last_error;

kljn_status status_of(kljn::ErrorCategory c) {
  switch (c) {
    case kljn::ErrorCategory::Config: return KLJN_ERR_CONFIG;
    case kljn::ErrorCategory::Domain: return KLJN_ERR_DOMAIN;
    case kljn::ErrorCategory::Shape: return KLJN_ERR_SHAPE;
    case kljn::ErrorCategory::Inference: return KLJN_ERR_INFERENCE;
    case kljn::ErrorCategory::Io: return KLJN_ERR_IO;
    case kljn::ErrorCategory::Simulation: return KLJN_ERR_SIMULATION;
  }
  return KLJN_ERR_INTERNAL;
}

kljn_status fail(kljn_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
kljn_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return KLJN_OK;
  } catch (const kljn::Error& e) {
    return fail(status_of(e.category()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KLJN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KLJN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KLJN_ERR_INTERNAL, "unknown error");
  }
}

kljn_estimate to_c(const kljn::SuccessEstimate& e) { return {e.p_e, e.std_error, e.n}; }

template <typename Run>
kljn_status run_experiment(const kljn_config* cfg, kljn_report** out, Run&& run) {
  if (cfg == nullptr || out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto report = std::make_unique<kljn_report>(kljn_report{run(cfg->cfg), {}});
    report->summary = report->report.summary();
    *out = report.release();
  });
}

}  // namespace

extern "C" {

const char* kljn_version(void) { return "1.0.0"; }

const char* kljn_status_string(kljn_status status) {
  switch (status) {
    case KLJN_OK: return "ok";
    case KLJN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KLJN_ERR_CONFIG: return "configuration error";
    case KLJN_ERR_IO: return "i/o error";
    case KLJN_ERR_DOMAIN: return "domain error";
    case KLJN_ERR_SHAPE: return "shape error";
    case KLJN_ERR_INFERENCE: return "inference error";
    case KLJN_ERR_SIMULATION: return "simulation error";
    case KLJN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kljn_last_error(void) { return last_error.c_str(); }

kljn_status kljn_config_create(kljn_config** out) {
  if (out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new kljn_config{}; });
}

kljn_status kljn_config_load(const char* path, kljn_config** out) {
  if (path == nullptr || out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new kljn_config{kljn::parse_config(path)}; });
}

kljn_status kljn_config_set(kljn_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    kljn::SimConfig next = cfg->cfg;
    kljn::apply_setting(next, key, value);
    cfg->cfg = next;
  });
}

kljn_status kljn_config_get(const kljn_config* cfg, const char* key, char* buffer,
                            size_t buffer_size, size_t* needed) {
  if (cfg == nullptr || key == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  std::string value;
  const kljn_status s = guarded([&] { value = kljn::get_setting(cfg->cfg, key); });
  if (s != KLJN_OK) return s;
  if (needed != nullptr) *needed = value.size() + 1;
  if (buffer == nullptr || buffer_size == 0) return KLJN_OK;
  if (buffer_size < value.size() + 1) {
    return fail(KLJN_ERR_INVALID_ARGUMENT, std::string(key) + ": buffer too small");
  }
  std::memcpy(buffer, value.c_str(), value.size() + 1);
  return KLJN_OK;
}

kljn_status kljn_config_validate(const kljn_config* cfg) {
  if (cfg == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { cfg->cfg.validate(); });
}

kljn_status kljn_config_write(const kljn_config* cfg, const char* path) {
  if (cfg == nullptr || path == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::FILE* f = std::fopen(path, "wb");
    if (f == nullptr) throw kljn::IoError(std::string("cannot write ") + path);
    const std::string text = kljn::format_config(cfg->cfg);
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) throw kljn::IoError(std::string("failed writing ") + path);
  });
}

void kljn_config_destroy(kljn_config* cfg) { delete cfg; }

kljn_status kljn_run_table1(const kljn_config* cfg, kljn_report** out) {
  return run_experiment(cfg, out, [](const kljn::SimConfig& c) { return kljn::run_table1(c); });
}

kljn_status kljn_run_defense(const kljn_config* cfg, kljn_report** out) {
  return run_experiment(cfg, out,
                        [](const kljn::SimConfig& c) { return kljn::run_defense_experiment(c); });
}

kljn_status kljn_run_privacy(const kljn_config* cfg, kljn_report** out) {
  return run_experiment(cfg, out,
                        [](const kljn::SimConfig& c) { return kljn::run_privacy_experiment(c); });
}

kljn_status kljn_run_single_bit(const kljn_config* cfg, uint64_t bit_index, kljn_report** out) {
  return run_experiment(cfg, out, [bit_index](const kljn::SimConfig& c) {
    return kljn::run_single_bit(c, bit_index);
  });
}

kljn_status kljn_report_write(const kljn_report* report, const char* out_dir) {
  if (report == nullptr || out_dir == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { kljn::write_report(report->report, out_dir); });
}

const char* kljn_report_summary(const kljn_report* report) {
  return report == nullptr ? "" : report->summary.c_str();
}

size_t kljn_report_table1_size(const kljn_report* report) {
  if (report == nullptr || !report->report.table1) return 0;
  return report->report.table1->cells.size();
}

kljn_status kljn_report_table1_cell(const kljn_report* report, size_t index,
                                    kljn_table1_cell* out) {
  if (report == nullptr || out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  if (!report->report.table1 || index >= report->report.table1->cells.size()) {
    return fail(KLJN_ERR_INVALID_ARGUMENT, "table cell index out of range");
  }
  const auto& c = report->report.table1->cells[index];
  std::memset(out, 0, sizeof *out);
  const std::string label = c.variant.label();
  std::strncpy(out->variant, label.c_str(), sizeof out->variant - 1);
  out->level = c.level;
  out->p_e = to_c(c.p_e);
  out->honest = to_c(c.honest);
  return KLJN_OK;
}

kljn_status kljn_report_defense(const kljn_report* report, kljn_defense_summary* out) {
  if (report == nullptr || out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  if (!report->report.defense) return fail(KLJN_ERR_INVALID_ARGUMENT, "report has no defense section");
  const auto& d = *report->report.defense;
  *out = {d.detection.threshold,   d.detection.consecutive_samples, to_c(d.detection_rate),
          to_c(d.false_positive_rate), d.median_latency_fraction,     d.mean_latency_fraction};
  return KLJN_OK;
}

kljn_status kljn_report_privacy(const kljn_report* report, kljn_privacy_summary* out) {
  if (report == nullptr || out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  if (!report->report.privacy) return fail(KLJN_ERR_INVALID_ARGUMENT, "report has no privacy section");
  const auto& p = *report->report.privacy;
  *out = {to_c(p.raw),
          to_c(p.after_one_pass),
          to_c(p.after_two_passes),
          p.predicted_one_pass,
          p.predicted_two_passes,
          p.key_length_raw,
          p.key_length_one_pass,
          p.key_length_two_passes,
          p.closed_form_consistent() ? 1 : 0};
  return KLJN_OK;
}

void kljn_report_destroy(kljn_report* report) { delete report; }

kljn_status kljn_johnson_rms_voltage(double resistance, double t_eff, double bandwidth_hz,
                                     double* out) {
  if (out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = kljn::johnson_rms_voltage(resistance, t_eff, bandwidth_hz); });
}

kljn_status kljn_reference_rms_current(double r_l, double r_h, double t_eff, double bandwidth_hz,
                                       double* out) {
  if (out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded(
      [&] { *out = kljn::reference_rms_channel_current(r_l, r_h, t_eff, bandwidth_hz); });
}

kljn_status kljn_predicted_leak_after_xor(double p, double* out) {
  if (out == nullptr) return fail(KLJN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = kljn::predicted_leak_after_xor(p); });
}

}  // extern "C"
