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

// Command-line front end. Talks to the simulator only through the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kljn/kljn.h"

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitSimulation = 4,
  kExitInternal = 5,
  kExitUsage = 64,
};

int exit_code_for(kljn_status s) {
  switch (s) {
    case KLJN_OK: return kExitOk;
    case KLJN_ERR_INVALID_ARGUMENT:
    case KLJN_ERR_CONFIG: return kExitConfig;
    case KLJN_ERR_IO: return kExitIo;
    case KLJN_ERR_DOMAIN:
    case KLJN_ERR_SHAPE:
    case KLJN_ERR_INFERENCE:
    case KLJN_ERR_SIMULATION: return kExitSimulation;
    case KLJN_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

struct ConfigDeleter {
  void operator()(kljn_config* c) const { kljn_config_destroy(c); }
};
struct ReportDeleter {
  void operator()(kljn_report* r) const { kljn_report_destroy(r); }
};
using ConfigPtr = std::unique_ptr<kljn_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<kljn_report, ReportDeleter>;

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 0;
  bool threads_given = false;
  std::vector<std::string> settings;
  std::uint64_t bit = 0;
};

int report_failure(kljn_status s, const std::string& context) {
  std::cerr << "kljnsim: " << context << ": " << kljn_status_string(s) << ": " << kljn_last_error()
            << "\n";
  return exit_code_for(s);
}

int run(const std::string& verb, const Options& opt) {
  kljn_config* raw = nullptr;
  kljn_status s = opt.config_path.empty() ? kljn_config_create(&raw)
                                          : kljn_config_load(opt.config_path.c_str(), &raw);
  ConfigPtr cfg(raw);
  if (s != KLJN_OK) return report_failure(s, opt.config_path.empty() ? "config" : opt.config_path);

  for (const auto& kv : opt.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "kljnsim: --set expects key=value, got '" << kv << "'\n";
      return kExitConfig;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if ((s = kljn_config_set(cfg.get(), key.c_str(), value.c_str())) != KLJN_OK) {
      return report_failure(s, "--set " + kv);
    }
  }
  if (opt.seed_given) {
    const std::string seed = std::to_string(opt.seed);
    if ((s = kljn_config_set(cfg.get(), "master_seed", seed.c_str())) != KLJN_OK) {
      return report_failure(s, "--seed");
    }
  }
  if (opt.threads_given) {
    const std::string threads = std::to_string(opt.threads);
    if ((s = kljn_config_set(cfg.get(), "workers", threads.c_str())) != KLJN_OK) {
      return report_failure(s, "--threads");
    }
  }
  if ((s = kljn_config_validate(cfg.get())) != KLJN_OK) return report_failure(s, "config");

  kljn_report* rep_raw = nullptr;
  if (verb == "table1") s = kljn_run_table1(cfg.get(), &rep_raw);
  else if (verb == "defense") s = kljn_run_defense(cfg.get(), &rep_raw);
  else if (verb == "privacy") s = kljn_run_privacy(cfg.get(), &rep_raw);
  else s = kljn_run_single_bit(cfg.get(), opt.bit, &rep_raw);
  ReportPtr report(rep_raw);
  if (s != KLJN_OK) return report_failure(s, verb);

  if ((s = kljn_report_write(report.get(), opt.out_dir.c_str())) != KLJN_OK) {
    return report_failure(s, opt.out_dir);
  }
  std::cout << kljn_report_summary(report.get());
  std::cout << "\nwrote " << opt.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KLJN key exchange simulator: current injection attack and defenses"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kljn_version()));

  Options opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "flat key = value configuration file");
    sub->add_option("--seed", opt.seed, "master seed (overrides the config file)")
        ->each([&](const std::string&) { opt.seed_given = true; });
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores")
        ->each([&](const std::string&) { opt.threads_given = true; });
    sub->add_option("--set", opt.settings, "override one configuration key (key=value)");
  };

  auto* table1 = app.add_subcommand("table1", "Eve's success probability over the variant x level grid");
  auto* defense = app.add_subcommand("defense", "detection rate of the instantaneous comparison defense");
  auto* privacy = app.add_subcommand("privacy", "XOR privacy amplification of Eve's guesses");
  auto* single = app.add_subcommand("single-bit", "dump every waveform of one bit exchange");
  for (auto* sub : {table1, defense, privacy, single}) add_common(sub);
  single->add_option("--bit", opt.bit, "bit index")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  return run(verb, opt);
}
