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

#include "kljn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kljn/errors.hpp"

namespace kljn {
namespace {

// Series resistance used for the DC operating point of a lossless branch.
constexpr double kMinDcSeriesResistance = 1e-9;

std::string format_length(double metres) {
  std::ostringstream os;
  os << metres;
  return os.str();
}

std::size_t injection_node_for(const LoopConfig& cfg, std::size_t n_segments) {
  const auto nearest = static_cast<std::size_t>(
      std::llround(cfg.injection_position * static_cast<double>(n_segments)));
  if (n_segments < 2) return std::min(nearest, n_segments);
  return std::clamp<std::size_t>(nearest, 1, n_segments - 1);
}

}  // namespace

std::string CircuitVariant::label() const {
  switch (kind) {
    case VariantKind::Ideal: return "ideal";
    case VariantKind::Cable: return "cable_" + format_length(length_m) + "m";
    case VariantKind::CableWithKiller: return "cable_" + format_length(length_m) + "m_killer";
  }
  return "unknown";
}

void LoopConfig::validate() const {
  if (!(r_alice > 0.0) || !(r_bob > 0.0)) throw ConfigError("loop resistances must be positive");
  if (!(injection_position >= 0.0 && injection_position <= 1.0)) {
    throw ConfigError("injection_position must lie in [0, 1]");
  }
  if (variant.has_cable()) {
    if (!(variant.length_m > 0.0)) throw ConfigError("cable_length_m must be positive");
    if (variant.n_segments < 1) throw ConfigError("cable_segments must be at least 1");
  }
}

void CableModel::validate(double bandwidth_hz) const {
  if (!(length_m > 0.0)) throw ConfigError("cable length must be positive");
  if (n_segments < 1) throw ConfigError("cable needs at least one segment");
  const auto& p = per_unit;
  if (p.r_per_m < 0.0 || p.l_per_m < 0.0 || p.c_per_m < 0.0 || p.g_per_m < 0.0) {
    throw ConfigError("cable per-unit parameters must be non-negative");
  }
  if (p.r_per_m == 0.0 && p.l_per_m == 0.0) {
    throw ConfigError("cable needs non-zero series resistance or inductance");
  }
  const double rc = segment_resistance() * effective_segment_capacitance();
  if (rc > 0.0) {
    const double corner = 1.0 / (2.0 * std::numbers::pi * rc);
    if (corner < 100.0 * bandwidth_hz) {
      throw ConfigError("cable segment RC corner below 100 x bandwidth; use more segments");
    }
  }
}

CableModel build_cable_model(double length_m, std::size_t n_segments, bool killer,
                             double bandwidth_hz, const CableParameters& per_unit) {
  CableModel m{per_unit, length_m, n_segments, killer};
  m.validate(bandwidth_hz);
  return m;
}

void ChannelSignals::validate() const {
  require_aligned(i_cha, i_chb, "channel currents");
  require_aligned(i_cha, u_cha, "channel current/voltage");
  require_aligned(i_cha, u_chb, "channel current/voltage");
}

ChannelSignals ChannelSignals::in_convention(SignConvention target) const {
  if (target == convention) return *this;
  return ChannelSignals{-i_cha, i_chb, u_cha, u_chb, target};
}

DividerFractions divider_fractions(double r_a, double r_b) {
  if (!(r_a > 0.0) || !(r_b > 0.0)) {
    throw DomainError("divider_fractions: resistances must be positive");
  }
  const double total = r_a + r_b;
  return {r_b / total, r_a / total};
}

ChannelSignals solve_ideal_loop(const Waveform& u_a, const Waveform& u_b, const LoopConfig& cfg,
                                const std::optional<Waveform>& i_inj) {
  require_aligned(u_a, u_b, "solve_ideal_loop");
  if (i_inj) require_aligned(u_a, *i_inj, "solve_ideal_loop injection");
  if (!(cfg.r_alice > 0.0) || !(cfg.r_bob > 0.0)) {
    throw ConfigError("loop resistances must be positive");
  }
  const std::size_t n = u_a.size();
  const double total = cfg.r_alice + cfg.r_bob;
  const auto div = divider_fractions(cfg.r_alice, cfg.r_bob);

  std::vector<double> ia(n), ib(n), ua(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double loop = (u_a[t] - u_b[t]) / total;
    double a = loop;
    double b = loop;
    double wire = u_a[t] - loop * cfg.r_alice;
    if (i_inj) {
      const double j = (*i_inj)[t];
      a -= div.toward_alice * j;
      b += div.toward_bob * j;
      wire += div.toward_alice * j * cfg.r_alice;
    }
    ia[t] = a;
    ib[t] = b;
    ua[t] = wire;
  }
  const double fs = u_a.sample_rate_hz();
  Waveform wire(std::move(ua), fs);
  return ChannelSignals{Waveform(std::move(ia), fs), Waveform(std::move(ib), fs), wire, wire,
                        SignConvention::Loop};
}

CableState CableState::zero(std::size_t n_segments) {
  return CableState{std::vector<double>(n_segments + 1, 0.0), std::vector<double>(n_segments, 0.0),
                    std::vector<double>(n_segments + 1, 0.0)};
}

// ---------------------------------------------------------------------------
// CableSolver

CableSolver::CableSolver(const CableModel& model, const LoopConfig& cfg, double dt,
                         Boundary boundary)
    : n_(model.n_segments),
      boundary_(boundary),
      r_alice_(cfg.r_alice),
      r_bob_(cfg.r_bob),
      injection_node_(injection_node_for(cfg, model.n_segments)) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (n_ < 1) throw ConfigError("cable needs at least one segment");
  if (boundary_ == Boundary::Thevenin && (!(r_alice_ > 0.0) || !(r_bob_ > 0.0))) {
    throw ConfigError("loop resistances must be positive");
  }

  const double c_seg = model.effective_segment_capacitance();
  const double g_seg = model.segment_conductance();
  const double r_seg = model.segment_resistance();
  const double l_seg = model.segment_inductance();
  if (r_seg == 0.0 && l_seg == 0.0) {
    throw ConfigError("cable needs non-zero series resistance or inductance");
  }

  cap_g_.assign(n_ + 1, 0.0);
  shunt_g_.assign(n_ + 1, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    // pi-section: half of each segment's shunt elements at either end.
    cap_g_[j] += c_seg / dt;
    cap_g_[j + 1] += c_seg / dt;
    shunt_g_[j] += 0.5 * g_seg;
    shunt_g_[j + 1] += 0.5 * g_seg;
  }
  series_g_.assign(n_, 1.0 / (2.0 * l_seg / dt + r_seg));
  series_k_.assign(n_, 2.0 * l_seg / dt - r_seg);
  dc_g_.assign(n_, 1.0 / std::max(r_seg, kMinDcSeriesResistance));

  transient_ = factor(false);
  dc_ = factor(true);
}

CableSolver::Factored CableSolver::factor(bool dc) const {
  const auto& sg = dc ? dc_g_ : series_g_;
  const bool clamped = boundary_ == Boundary::ClampedVoltage;
  const std::size_t first = clamped ? 1 : 0;
  const std::size_t last = clamped ? n_ - 1 : n_;  // inclusive; empty when clamped && n_ == 1

  Factored f;
  f.first = first;
  if (clamped && n_ < 2) return f;

  const std::size_t m = last - first + 1;
  std::vector<double> diag(m), lower(m, 0.0), upper(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t k = first + r;
    double d = (dc ? 0.0 : cap_g_[k]) + shunt_g_[k];
    if (k > 0) d += sg[k - 1];
    if (k < n_) d += sg[k];
    if (!clamped && k == 0) d += 1.0 / r_alice_;
    if (!clamped && k == n_) d += 1.0 / r_bob_;
    diag[r] = d;
    if (r > 0) lower[r] = -sg[k - 1];
    if (r + 1 < m) upper[r] = -sg[k];
  }

  // Thomas factorization; the matrix is symmetric and diagonally dominant.
  f.lower = lower;
  f.upper_scaled.assign(m, 0.0);
  f.inv_pivot.assign(m, 0.0);
  double prev_upper_scaled = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double pivot = diag[r] - (r > 0 ? lower[r] * prev_upper_scaled : 0.0);
    if (!(std::abs(pivot) > 0.0)) throw Error(ErrorCategory::Simulation, "singular cable matrix");
    f.inv_pivot[r] = 1.0 / pivot;
    f.upper_scaled[r] = upper[r] * f.inv_pivot[r];
    prev_upper_scaled = f.upper_scaled[r];
  }
  return f;
}

void CableSolver::Factored::solve(std::vector<double>& rhs) const {
  const std::size_t m = inv_pivot.size();
  for (std::size_t r = 0; r < m; ++r) {
    const double prev = r > 0 ? rhs[r - 1] : 0.0;
    rhs[r] = (rhs[r] - lower[r] * prev) * inv_pivot[r];
  }
  for (std::size_t r = m; r-- > 1;) {
    rhs[r - 1] -= upper_scaled[r - 1] * rhs[r];
  }
}

std::vector<double> CableSolver::solve_nodes(const Factored& f, std::vector<double> rhs_full,
                                             const std::vector<double>& series_g, double drive_a,
                                             double drive_b) const {
  std::vector<double> v(n_ + 1, 0.0);
  if (boundary_ == Boundary::Thevenin) {
    rhs_full[0] += drive_a / r_alice_;
    rhs_full[n_] += drive_b / r_bob_;
    f.solve(rhs_full);
    return rhs_full;
  }
  v[0] = drive_a;
  v[n_] = drive_b;
  if (n_ < 2) return v;
  rhs_full[1] += series_g[0] * drive_a;
  rhs_full[n_ - 1] += series_g[n_ - 1] * drive_b;
  std::vector<double> inner(rhs_full.begin() + 1, rhs_full.begin() + static_cast<long>(n_));
  f.solve(inner);
  std::copy(inner.begin(), inner.end(), v.begin() + 1);
  return v;
}

CableState CableSolver::operating_point(double drive_a, double drive_b, double i_inj) const {
  std::vector<double> rhs(n_ + 1, 0.0);
  rhs[injection_node_] += i_inj;
  CableState s;
  s.node_voltage = solve_nodes(dc_, std::move(rhs), dc_g_, drive_a, drive_b);
  s.inductor_current.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    s.inductor_current[j] = dc_g_[j] * (s.node_voltage[j] - s.node_voltage[j + 1]);
  }
  s.capacitor_current.assign(n_ + 1, 0.0);
  return s;
}

EndSample CableSolver::step(CableState& state, double drive_a, double drive_b, double i_inj) const {
  if (state.node_voltage.size() != n_ + 1 || state.inductor_current.size() != n_ ||
      state.capacitor_current.size() != n_ + 1) {
    throw ShapeError("cable state does not match the number of segments");
  }
  const auto& v = state.node_voltage;
  const auto& il = state.inductor_current;
  const auto& ic = state.capacitor_current;

  // History current of each series branch: i' = G (v_j' - v_{j+1}') + H_j.
  std::vector<double> hist(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    hist[j] = series_g_[j] * (series_k_[j] * il[j] + v[j] - v[j + 1]);
  }
  std::vector<double> rhs(n_ + 1);
  for (std::size_t k = 0; k <= n_; ++k) {
    double r = cap_g_[k] * v[k] + ic[k];
    if (k < n_) r -= hist[k];
    if (k > 0) r += hist[k - 1];
    rhs[k] = r;
  }
  rhs[injection_node_] += i_inj;

  std::vector<double> v_new = solve_nodes(transient_, std::move(rhs), series_g_, drive_a, drive_b);
  for (std::size_t j = 0; j < n_; ++j) {
    state.inductor_current[j] = series_g_[j] * (v_new[j] - v_new[j + 1]) + hist[j];
  }
  for (std::size_t k = 0; k <= n_; ++k) {
    state.capacitor_current[k] = cap_g_[k] * (v_new[k] - v[k]) - ic[k];
  }
  state.node_voltage = std::move(v_new);
  return outputs(state, drive_a, drive_b, i_inj);
}

EndSample CableSolver::outputs(const CableState& s, double drive_a, double drive_b,
                               double i_inj) const {
  EndSample out;
  out.u_cha = s.node_voltage[0];
  out.u_chb = s.node_voltage[n_];
  if (boundary_ == Boundary::Thevenin) {
    out.i_cha = (drive_a - out.u_cha) / r_alice_;
    out.i_chb = (out.u_chb - drive_b) / r_bob_;
    return out;
  }
  // Currents the clamped ends must supply, from KCL at the end nodes.
  double into_ladder = s.capacitor_current[0] + shunt_g_[0] * s.node_voltage[0] +
                       s.inductor_current[0];
  double out_of_ladder = s.inductor_current[n_ - 1] - s.capacitor_current[n_] -
                         shunt_g_[n_] * s.node_voltage[n_];
  if (injection_node_ == 0) into_ladder -= i_inj;
  if (injection_node_ == n_) out_of_ladder += i_inj;
  out.i_cha = into_ladder;
  out.i_chb = out_of_ladder;
  return out;
}

double CableSolver::shunt_current(const CableState& s) const {
  double total = 0.0;
  for (std::size_t k = 0; k <= n_; ++k) {
    total += s.capacitor_current[k] + shunt_g_[k] * s.node_voltage[k];
  }
  return total;
}

std::pair<CableState, EndSample> step_transient(const CableModel& model, const LoopConfig& cfg,
                                                std::pair<double, double> end_voltages,
                                                double i_inj_sample, const CableState& state,
                                                double dt) {
  if (state.n_segments() != model.n_segments) {
    throw ShapeError("cable state does not match the number of segments");
  }
  const CableSolver solver(model, cfg, dt, CableSolver::Boundary::Thevenin);
  CableState next = state;
  const EndSample out = solver.step(next, end_voltages.first, end_voltages.second, i_inj_sample);
  return {std::move(next), out};
}

ChannelSignals simulate_cable(const CableModel& model, const LoopConfig& cfg, const Waveform& u_a,
                              const Waveform& u_b, const std::optional<Waveform>& i_inj) {
  require_aligned(u_a, u_b, "simulate_cable");
  if (i_inj) require_aligned(u_a, *i_inj, "simulate_cable injection");
  const std::size_t n = u_a.size();
  const CableSolver solver(model, cfg, u_a.dt(), CableSolver::Boundary::Thevenin);

  std::vector<double> ia(n), ib(n), ua(n), ub(n);
  auto record = [&](std::size_t t, const EndSample& e) {
    ia[t] = e.i_cha;
    ib[t] = e.i_chb;
    ua[t] = e.u_cha;
    ub[t] = e.u_chb;
  };
  const auto inj = [&](std::size_t t) { return i_inj ? (*i_inj)[t] : 0.0; };

  CableState state = solver.operating_point(u_a[0], u_b[0], inj(0));
  record(0, solver.outputs(state, u_a[0], u_b[0], inj(0)));
  for (std::size_t t = 1; t < n; ++t) {
    record(t, solver.step(state, u_a[t], u_b[t], inj(t)));
  }
  const double fs = u_a.sample_rate_hz();
  return ChannelSignals{Waveform(std::move(ia), fs), Waveform(std::move(ib), fs),
                        Waveform(std::move(ua), fs), Waveform(std::move(ub), fs),
                        SignConvention::Loop};
}

ChannelSignals solve_loop(const LoopConfig& cfg, const std::optional<CableModel>& model,
                          const Waveform& u_a, const Waveform& u_b,
                          const std::optional<Waveform>& i_inj) {
  if (!cfg.variant.has_cable()) return solve_ideal_loop(u_a, u_b, cfg, i_inj);
  if (!model) throw ConfigError("cable variant requires a cable model");
  return simulate_cable(*model, cfg, u_a, u_b, i_inj);
}

}  // namespace kljn
