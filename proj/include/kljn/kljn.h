/*
 * Copyright 2026 The kljnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the KLJN key-exchange simulator.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns a kljn_status; on failure kljn_last_error() returns a
 * message for the calling thread that stays valid until its next API call.
 */
#ifndef KLJN_KLJN_H
#define KLJN_KLJN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define KLJN_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define KLJN_API __attribute__((visibility("default")))
#else
#  define KLJN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kljn_status {
  KLJN_OK = 0,
  KLJN_ERR_INVALID_ARGUMENT = 1,
  KLJN_ERR_CONFIG = 2,
  KLJN_ERR_IO = 3,
  KLJN_ERR_DOMAIN = 4,
  KLJN_ERR_SHAPE = 5,
  KLJN_ERR_INFERENCE = 6,
  KLJN_ERR_SIMULATION = 7,
  KLJN_ERR_INTERNAL = 8
} kljn_status;

typedef struct kljn_config kljn_config;
typedef struct kljn_report kljn_report;

typedef struct kljn_estimate {
  double p;
  double std_error;
  size_t n;
} kljn_estimate;

typedef struct kljn_table1_cell {
  char variant[64];
  double level;
  kljn_estimate p_e;
  kljn_estimate honest;
} kljn_table1_cell;

typedef struct kljn_defense_summary {
  double threshold;
  size_t consecutive_samples;
  kljn_estimate detection_rate;
  kljn_estimate false_positive_rate;
  double median_latency_fraction;
  double mean_latency_fraction;
} kljn_defense_summary;

typedef struct kljn_privacy_summary {
  kljn_estimate raw;
  kljn_estimate after_one_pass;
  kljn_estimate after_two_passes;
  double predicted_one_pass;
  double predicted_two_passes;
  size_t key_length_raw;
  size_t key_length_one_pass;
  size_t key_length_two_passes;
  int closed_form_consistent;
} kljn_privacy_summary;

KLJN_API const char* kljn_version(void);
KLJN_API const char* kljn_status_string(kljn_status status);
KLJN_API const char* kljn_last_error(void);

/* Configuration ---------------------------------------------------------- */

/* Reference defaults. */
KLJN_API kljn_status kljn_config_create(kljn_config** out);
/* Flat "key = value" file; unknown keys and bad values are errors. */
KLJN_API kljn_status kljn_config_load(const char* path, kljn_config** out);
KLJN_API kljn_status kljn_config_set(kljn_config* cfg, const char* key, const char* value);
/* Copies the textual value, NUL-terminated; *needed receives the length
 * including the terminator (may be NULL). */
KLJN_API kljn_status kljn_config_get(const kljn_config* cfg, const char* key, char* buffer,
                                     size_t buffer_size, size_t* needed);
KLJN_API kljn_status kljn_config_validate(const kljn_config* cfg);
KLJN_API kljn_status kljn_config_write(const kljn_config* cfg, const char* path);
KLJN_API void kljn_config_destroy(kljn_config* cfg);

/* Experiments ------------------------------------------------------------ */

KLJN_API kljn_status kljn_run_table1(const kljn_config* cfg, kljn_report** out);
KLJN_API kljn_status kljn_run_defense(const kljn_config* cfg, kljn_report** out);
KLJN_API kljn_status kljn_run_privacy(const kljn_config* cfg, kljn_report** out);
KLJN_API kljn_status kljn_run_single_bit(const kljn_config* cfg, uint64_t bit_index,
                                         kljn_report** out);

/* Reports ---------------------------------------------------------------- */

KLJN_API kljn_status kljn_report_write(const kljn_report* report, const char* out_dir);
/* Human-readable summary; owned by the report. */
KLJN_API const char* kljn_report_summary(const kljn_report* report);
KLJN_API size_t kljn_report_table1_size(const kljn_report* report);
KLJN_API kljn_status kljn_report_table1_cell(const kljn_report* report, size_t index,
                                             kljn_table1_cell* out);
KLJN_API kljn_status kljn_report_defense(const kljn_report* report, kljn_defense_summary* out);
KLJN_API kljn_status kljn_report_privacy(const kljn_report* report, kljn_privacy_summary* out);
KLJN_API void kljn_report_destroy(kljn_report* report);

/* Physics helpers -------------------------------------------------------- */

KLJN_API kljn_status kljn_johnson_rms_voltage(double resistance, double t_eff,
                                              double bandwidth_hz, double* out);
KLJN_API kljn_status kljn_reference_rms_current(double r_l, double r_h, double t_eff,
                                                double bandwidth_hz, double* out);
KLJN_API kljn_status kljn_predicted_leak_after_xor(double p, double* out);

#ifdef __cplusplus
}
#endif

#endif /* KLJN_KLJN_H */
