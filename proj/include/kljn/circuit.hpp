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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kljn/waveform.hpp"

namespace kljn {

enum class VariantKind { Ideal, Cable, CableWithKiller };

/// Which of the four loop topologies is simulated.
struct CircuitVariant {
  VariantKind kind = VariantKind::Ideal;
  double length_m = 0.0;
  std::size_t n_segments = 10;

  static CircuitVariant ideal() { return {}; }
  static CircuitVariant cable(double length_m, std::size_t n_segments = 10) {
    return {VariantKind::Cable, length_m, n_segments};
  }
  static CircuitVariant cable_with_killer(double length_m, std::size_t n_segments = 10) {
    return {VariantKind::CableWithKiller, length_m, n_segments};
  }

  bool has_cable() const noexcept { return kind != VariantKind::Ideal; }
  // "ideal", "cable_100m", "cable_1000m_killer", ...
  std::string label() const;

  friend bool operator==(const CircuitVariant&, const CircuitVariant&) = default;
};

struct LoopConfig {
  double r_alice = 1000.0;
  double r_bob = 9000.0;
  CircuitVariant variant;
  // Fraction of the cable length where Eve's current source is attached.
  double injection_position = 0.5;

  void validate() const;
};

/// Per-metre line constants. Defaults are typical RG58 datasheet values.
struct CableParameters {
  double r_per_m = 0.0365;    // ohm/m
  double l_per_m = 250e-9;    // H/m
  double c_per_m = 100e-12;   // F/m
  double g_per_m = 0.0;       // S/m

  friend bool operator==(const CableParameters&, const CableParameters&) = default;
};

/// Lumped pi-section ladder of `n_segments` series R-L branches with the
/// segment shunt C and G split half-and-half onto the two adjacent nodes.
///
/// With the capacitor killer enabled the shunt capacitance is cancelled
/// exactly; series R and L are kept.
struct CableModel {
  CableParameters per_unit;
  double length_m = 1000.0;
  std::size_t n_segments = 10;
  bool killer_enabled = false;

  double segment_length() const noexcept { return length_m / static_cast<double>(n_segments); }
  double segment_resistance() const noexcept { return per_unit.r_per_m * segment_length(); }
  double segment_inductance() const noexcept { return per_unit.l_per_m * segment_length(); }
  // Physical segment capacitance (present whether or not it is cancelled).
  double segment_capacitance() const noexcept { return per_unit.c_per_m * segment_length(); }
  // Capacitance the loop actually sees: zero when the killer is enabled.
  double effective_segment_capacitance() const noexcept {
    return killer_enabled ? 0.0 : segment_capacitance();
  }
  double segment_conductance() const noexcept { return per_unit.g_per_m * segment_length(); }

  double total_resistance() const noexcept { return per_unit.r_per_m * length_m; }
  double total_capacitance() const noexcept { return per_unit.c_per_m * length_m; }

  // Throws ConfigError. The per-segment RC corner must sit at least 100x
  // above `bandwidth_hz`.
  void validate(double bandwidth_hz) const;
};

CableModel build_cable_model(double length_m, std::size_t n_segments, bool killer,
                             double bandwidth_hz = 250.0,
                             const CableParameters& per_unit = {});

enum class SignConvention {
  // Positive current circulates Alice -> cable -> Bob at both ends.
  Loop,
  // Positive current at each end points from the injection node outward
  // toward that end. Differs from Loop only by the sign of Alice's end.
  DividerFromInjection,
};

struct ChannelSignals {
  Waveform i_cha;
  Waveform i_chb;
  Waveform u_cha;
  Waveform u_chb;
  SignConvention convention = SignConvention::Loop;

  void validate() const;
  ChannelSignals in_convention(SignConvention target) const;
};

struct DividerFractions {
  double toward_alice;
  double toward_bob;
};

/// Share of a current injected between r_a and r_b that flows to each side.
DividerFractions divider_fractions(double r_a, double r_b);

/// Closed-form solution of the single-node loop (zero-length wire).
/// Output is in Loop convention.
ChannelSignals solve_ideal_loop(const Waveform& u_a, const Waveform& u_b,
                                const LoopConfig& cfg,
                                const std::optional<Waveform>& i_inj = std::nullopt);

/// Dynamic state of the ladder: voltage of every node 0..n, current of every
/// series branch 0..n-1 (positive toward Bob) and the trapezoidal history
/// current of every node capacitor.
struct CableState {
  std::vector<double> node_voltage;
  std::vector<double> inductor_current;
  std::vector<double> capacitor_current;

  static CableState zero(std::size_t n_segments);
  std::size_t n_segments() const noexcept { return inductor_current.size(); }
};

/// End quantities at one time point, Loop convention.
struct EndSample {
  double i_cha = 0.0;
  double i_chb = 0.0;
  double u_cha = 0.0;
  double u_chb = 0.0;
};

/// Trapezoidal-rule transient solver for the cable ladder.
///
/// The companion network of every step is a tridiagonal nodal system whose
/// matrix depends only on the model, the boundary and dt, so it is factored
/// once at construction.
class CableSolver {
 public:
  enum class Boundary {
    // Each end driven by a noise EMF behind its party's resistor.
    Thevenin,
    // End node voltages imposed directly; used to replay exchanged voltages.
    ClampedVoltage,
  };

  CableSolver(const CableModel& model, const LoopConfig& cfg, double dt, Boundary boundary);

  /// DC operating point for constant drives (capacitors open, inductors at
  /// their series resistance). A consistent starting state for stepping.
  CableState operating_point(double drive_a, double drive_b, double i_inj) const;

  /// Advances `state` by dt to the given drives and returns the new end
  /// quantities. `drive_*` are source EMFs (Thevenin) or node voltages
  /// (ClampedVoltage).
  EndSample step(CableState& state, double drive_a, double drive_b, double i_inj) const;

  EndSample outputs(const CableState& state, double drive_a, double drive_b,
                    double i_inj) const;

  /// Sum of all shunt branch currents (capacitive plus conductive) leaving
  /// the ladder to the shield.
  double shunt_current(const CableState& state) const;

  std::size_t injection_node() const noexcept { return injection_node_; }
  std::size_t n_segments() const noexcept { return n_; }

 private:
  struct Factored {
    std::size_t first = 0;
    std::vector<double> lower;
    std::vector<double> upper_scaled;
    std::vector<double> inv_pivot;
    void solve(std::vector<double>& rhs) const;
  };

  Factored factor(bool dc) const;
  std::vector<double> solve_nodes(const Factored& f, std::vector<double> rhs_full,
                                  const std::vector<double>& series_g,
                                  double drive_a, double drive_b) const;

  std::size_t n_;
  Boundary boundary_;
  double r_alice_;
  double r_bob_;
  std::size_t injection_node_;
  std::vector<double> cap_g_;     // 2C/dt per node
  std::vector<double> shunt_g_;   // G per node
  std::vector<double> series_g_;  // 1/(2L/dt + R) per branch
  std::vector<double> series_k_;  // 2L/dt - R per branch
  std::vector<double> dc_g_;      // 1/R per branch (floored)
  Factored transient_;
  Factored dc_;
};

/// Single trapezoidal step from an explicit state; builds a solver per call.
std::pair<CableState, EndSample> step_transient(const CableModel& model, const LoopConfig& cfg,
                                                std::pair<double, double> end_voltages,
                                                double i_inj_sample, const CableState& state,
                                                double dt);

/// Full-waveform transient solution of a cable variant, starting from the
/// operating point of the first sample. Output is in Loop convention.
ChannelSignals simulate_cable(const CableModel& model, const LoopConfig& cfg,
                              const Waveform& u_a, const Waveform& u_b,
                              const std::optional<Waveform>& i_inj = std::nullopt);

/// Dispatches on cfg.variant. `model` must be present for cable variants.
ChannelSignals solve_loop(const LoopConfig& cfg, const std::optional<CableModel>& model,
                          const Waveform& u_a, const Waveform& u_b,
                          const std::optional<Waveform>& i_inj = std::nullopt);

}  // namespace kljn
