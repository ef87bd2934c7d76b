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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kljn/config.hpp"
#include "kljn/errors.hpp"
#include "kljn/harness.hpp"
#include "support.hpp"

using namespace kljn;

namespace {

void check_same_csvs(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    CAPTURE(entry.path().filename().string());
    CHECK(test::read_file(entry.path()) == test::read_file(b / entry.path().filename()));
    ++compared;
  }
  CHECK(compared > 0);
}

}  // namespace

TEST_CASE("parallel loop visits every index once") {
  for (std::size_t workers : {1u, 2u, 7u, 64u}) {
    std::vector<std::atomic<int>> seen(1000);
    parallel_for_bits(seen.size(), workers, [&](std::size_t i) { seen[i]++; });
    for (const auto& s : seen) CHECK(s.load() == 1);
  }
  parallel_for_bits(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("parallel loop rethrows a worker failure") {
  CHECK_THROWS_AS(parallel_for_bits(100, 4,
                                    [](std::size_t i) {
                                      if (i == 57) throw DomainError("bit 57");
                                    }),
                  DomainError);
}

TEST_CASE("earlier bits do not depend on the run length") {
  SimConfig short_run;
  short_run.n_bits = 40;
  SimConfig long_run = short_run;
  long_run.n_bits = 90;
  const auto a = run_attack_bits(short_run);
  const auto b = run_attack_bits(long_run);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].classification == b[i].classification);
    CHECK(a[i].attack->rho == b[i].attack->rho);
    CHECK(a[i].eve_bit == b[i].eve_bit);
  }
}

TEST_CASE("table 1 on a reduced grid") {
  SimConfig cfg;
  cfg.n_bits = 300;
  const Table1Grid grid{{CircuitVariant::ideal(), CircuitVariant::cable(100.0, 10)}, {0.0, 0.1}};
  const auto report = run_table1(cfg, grid);
  REQUIRE(report.table1.has_value());
  const auto& cells = report.table1->cells;
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].variant == CircuitVariant::ideal());
  CHECK(cells[0].level == 0.0);
  CHECK(cells[3].variant == CircuitVariant::cable(100.0, 10));
  CHECK(cells[3].level == 0.1);
  for (const auto& c : cells) {
    CHECK(c.p_e.n == 300);
    CHECK(c.p_e.std_error == doctest::Approx(std::sqrt(c.p_e.p_e * (1 - c.p_e.p_e) / 300.0)));
    CHECK(c.honest.p_e >= 0.98);
  }
  CHECK(report.summary().find("cable_100m") != std::string::npos);
}

TEST_CASE("reports are identical across runs and thread counts") {
  SimConfig cfg;
  cfg.n_bits = 400;
  cfg.workers = 1;
  SimConfig threaded = cfg;
  threaded.workers = 4;
  const Table1Grid grid{{CircuitVariant::ideal(), CircuitVariant::cable(1000.0, 10)}, {0.01, 0.1}};

  const auto one = test::scratch_dir("det_one");
  const auto two = test::scratch_dir("det_two");
  const auto many = test::scratch_dir("det_many");
  for (const auto& [dir, c] : {std::pair{one, cfg}, std::pair{two, cfg}, std::pair{many, threaded}}) {
    write_report(run_table1(c, grid), dir / "table1");
    write_report(run_defense_experiment(c), dir / "defense");
    write_report(run_privacy_experiment(c), dir / "privacy");
    write_report(run_single_bit(c, 5), dir / "single");
  }
  for (const char* sub : {"table1", "defense", "privacy", "single"}) {
    CAPTURE(sub);
    check_same_csvs(one / sub, two / sub);
    check_same_csvs(one / sub, many / sub);
  }
}

TEST_CASE("report files and headers") {
  SimConfig cfg;
  cfg.n_bits = 50;
  const auto dir = test::scratch_dir("files");
  write_report(run_defense_experiment(cfg), dir);
  write_report(run_privacy_experiment(cfg), dir);
  write_report(run_single_bit(cfg, 0), dir);
  write_report(run_table1(cfg, {{CircuitVariant::ideal()}, {0.1}}), dir);

  const auto first_line = [&](const char* name) {
    const std::string text = test::read_file(dir / name);
    return text.substr(0, text.find('\n'));
  };
  CHECK(first_line("table1.csv") == "variant,level,p_e,stderr,n");
  CHECK(first_line("defense.csv") == "bit,attacked,detected,latency_fraction,max_residual");
  CHECK(first_line("residual_trace_attacked.csv") == "time_s,residual_A");
  CHECK(first_line("residual_trace_clean.csv") == "time_s,residual_A");
  CHECK(first_line("privacy.csv") == "stage,p_e,stderr,key_length");
  CHECK(first_line("single_bit.csv") == "time_s,u_alice,u_bob,i_inj,i_cha,i_chb,u_cha,u_chb");
  CHECK(parse_config(dir / "config.txt") == cfg);
  CHECK(test::read_file(dir / "summary.txt").find("seed 1") != std::string::npos);

  // 200 samples plus a header in each trace.
  const std::string trace = test::read_file(dir / "residual_trace_attacked.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 201);
}

TEST_CASE("unwritable output directory is an IO error") {
  SimConfig cfg;
  cfg.n_bits = 10;
  const auto dir = test::scratch_dir("blocked");
  const auto blocker = dir / "file";
  { std::ofstream(blocker) << "x"; }
  CHECK_THROWS_AS(write_report(run_single_bit(cfg, 0), blocker / "sub"), IoError);
}
