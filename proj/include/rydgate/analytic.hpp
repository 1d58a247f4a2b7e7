/* Copyright 2026 The RydGate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
//
// Closed-form designs for the asymmetric pi-2pi-pi controlled-phase protocol:
// a resonant control pi pulse brackets a single detuned target pulse chosen
// so that the driven |0> <-> |r> transition completes full loops both with
// the control in the ground state (detuning Delta) and in the Rydberg state
// (detuning Delta - V). The loop phases phi, phi_V fix the conditional
// phase theta = phi - phi_V; Delta = V/2 symmetrizes the two return
// conditions and yields CZ with Omega = sqrt(3) V/2, t = 2pi/V.

#ifndef RYDGATE_ANALYTIC_HPP_
#define RYDGATE_ANALYTIC_HPP_

#include <optional>
#include <string>
#include <vector>

#include "rydgate/core.hpp"
#include "rydgate/fidelity.hpp"

namespace rydgate {

struct GateDesign {
  double theta = kPi;  // target controlled phase, (0, pi]
  double V = 1.0;
  double p = 1.0;  // control/target Rabi ratio; +inf = instantaneous control
  double omega = 0.0;
  double delta = 0.0;
  double t_target = 0.0;
  int n0 = 1;        // target loops with control in ground
  int nv = 1;        // target loops with control in Rydberg
  int loops = 1;     // integer repetition of the target pulse
  char branch = '0';  // '+', '-' for two-loop designs, '0' for the basic one
};

struct PhasePair {
  double phi = 0.0;    // loop phase with control in ground
  double phi_v = 0.0;  // loop phase with control in Rydberg
  double n0 = 0.0;     // loop counts t*sqrt(Omega^2+Delta^2)/2pi (real)
  double nv = 0.0;
  bool on_manifold = true;  // both loop counts integer to 1e-9
};

struct ErrorBudget {
  double eps = 0.0;
  double eps_ddp = 0.0;
  double ratio = 0.0;
  double t_gate = 0.0;
};

struct DetuningBranches {
  bool valid = false;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  std::string status;  // explanation when invalid
};

struct BranchPhases {
  double phi = 0.0;
  double phi_v = 0.0;
  double theta = 0.0;  // = phi - phi_v
  double t_target = 0.0;
};

struct LegacyBaselines {
  double omega_opt = 0.0;
  double eps_legacy = 0.0;
  double eps_ddp = 0.0;
};

struct CanonicalCorrection {
  double alpha = 0.0;
  double beta = 0.0;
  double global_phase = 0.0;
  double residual = 0.0;  // leftover Bell-phase defect, wrapped
};

inline double gate_duration(double p, double V) {
  require(V > 0.0, "gate_duration: V must be positive");
  require(p >= 1.0, "gate_duration: p must be >= 1");
  if (std::isinf(p)) return 2.0 * kPi / V;
  return (1.0 + 2.0 / (std::sqrt(3.0) * p)) * 2.0 * kPi / V;
}

inline double scattering_error(double p, double V, double tau) {
  require(p >= 1.0, "scattering_error: p must be >= 1");
  require(V > 0.0 && tau > 0.0, "scattering_error: V*tau must be positive");
  const double asym = std::isinf(p) ? 0.0 : 1.0 / (std::sqrt(3.0) * p);
  return (11.0 / 8.0 + asym) * kPi / (V * tau);
}

inline double eps_ddp(double V, double tau) {
  require(V > 0.0 && tau > 0.0, "eps_ddp: V*tau must be positive");
  return (1.0 + kPi / 2.0) / (V * tau);
}

inline ErrorBudget error_budget(double p, double V, double tau) {
  ErrorBudget b;
  b.eps = scattering_error(p, V, tau);
  b.eps_ddp = eps_ddp(V, tau);
  b.ratio = b.eps / b.eps_ddp;
  b.t_gate = gate_duration(p, V);
  return b;
}

inline GateDesign design_phase_gate(double theta, double V, int loops = 1) {
  require(theta > 0.0 && theta <= kPi,
          "design_phase_gate: theta must lie in (0, pi]");
  require(V > 0.0, "design_phase_gate: V must be positive");
  require(loops >= 1, "design_phase_gate: loops must be a positive integer");
  GateDesign d;
  d.theta = theta;
  d.V = V;
  d.omega = V * std::sqrt(kPi * kPi / (theta * theta) - 0.25);
  d.delta = V / 2.0;
  d.t_target = loops * 2.0 * theta / V;
  d.loops = loops;
  d.n0 = loops;
  d.nv = loops;
  return d;
}

inline GateDesign design_cz(double V, double p) {
  require(p >= 1.0, "design_cz: p must be >= 1");
  GateDesign d = design_phase_gate(kPi, V);
  d.p = p;
  return d;
}

// [control pi, detuned target pulse, control pi]; finite p only.
inline PulseSequence design_sequence(const GateDesign& d) {
  require(!std::isinf(d.p),
          "design_sequence: p = inf has no finite control segments; use "
          "simulate_design");
  const double omega_c = d.p * d.omega;
  PulseSegment ctrl{kPi / omega_c, omega_c, 0.0, 0.0, 0.0};
  PulseSegment target{d.t_target, 0.0, d.omega, 0.0, d.delta};
  return {ctrl, target, ctrl};
}

// Full gate propagator; p = inf applies instantaneous control maps.
inline Mat9 simulate_design(const GateDesign& d, double gamma = 0.0) {
  const PhysicsParams params{d.V, gamma};
  PulseSegment target{d.t_target, 0.0, d.omega, 0.0, d.delta};
  if (std::isinf(d.p)) {
    const Mat9 k = control_pi_map();
    return k * segment_propagator(target, params) * k;
  }
  return propagate_sequence(design_sequence(d), params);
}

inline double simulated_controlled_phase(const GateDesign& d) {
  const Mat4 m = computational_block(simulate_design(d));
  return controlled_phase_of(m.diagonal());
}

inline DetuningBranches detuning_branches(int n0, int nv, double omega,
                                          double V) {
  require(n0 >= 1 && nv >= 1, "detuning_branches: loop counts must be >= 1");
  require(n0 != nv, "detuning_branches: requires n0 != nv (equal counts "
                    "admit only the basic Delta = V/2 family)");
  require(omega > 0.0 && V > 0.0,
          "detuning_branches: Omega and V must be positive");
  const double a = static_cast<double>(n0) * n0;
  const double b = static_cast<double>(nv) * nv;
  const double diff = a - b;
  const double disc = a * b * V * V - diff * diff * omega * omega;
  DetuningBranches out;
  if (disc < 0.0) {
    out.status = "no real detuning solves both loop conditions at this "
                 "Omega (discriminant < 0)";
    return out;
  }
  out.valid = true;
  out.delta_plus = (a * V + std::sqrt(disc)) / diff;
  out.delta_minus = (a * V - std::sqrt(disc)) / diff;
  return out;
}

inline BranchPhases branch_phases(int n0, int nv, double delta, double omega,
                                  double V) {
  require(n0 >= 1 && nv >= 1, "branch_phases: loop counts must be >= 1");
  BranchPhases out;
  const double s = std::sqrt(omega * omega + delta * delta);
  out.t_target = 2.0 * kPi * n0 / s;
  out.phi = n0 * kPi + n0 * kPi * delta / s;
  out.phi_v = nv * kPi + n0 * kPi * (delta - V) / s;
  out.theta = out.phi - out.phi_v;
  return out;
}

inline GateDesign branch_design(int n0, int nv, double delta, double omega,
                                double V) {
  const BranchPhases bp = branch_phases(n0, nv, delta, omega, V);
  GateDesign d;
  d.theta = wrap_angle(bp.theta);
  d.V = V;
  d.omega = omega;
  d.delta = delta;
  d.t_target = bp.t_target;
  d.n0 = n0;
  d.nv = nv;
  return d;
}

inline PhasePair target_pulse_phases(double omega, double delta, double V,
                                     double t) {
  require(t >= 0.0, "target_pulse_phases: t must be non-negative");
  PhasePair out;
  out.n0 = t * std::sqrt(omega * omega + delta * delta) / (2.0 * kPi);
  out.nv =
      t * std::sqrt(omega * omega + (delta - V) * (delta - V)) / (2.0 * kPi);
  out.on_manifold = std::abs(out.n0 - std::round(out.n0)) <= 1e-9 &&
                    std::abs(out.nv - std::round(out.nv)) <= 1e-9;
  out.phi = std::round(out.n0) * kPi + delta * t / 2.0;
  out.phi_v = std::round(out.nv) * kPi + (delta - V) * t / 2.0;
  return out;
}

inline LegacyBaselines legacy_baselines(double V, double tau) {
  require(V > 0.0 && tau > 0.0, "legacy_baselines: V, tau must be positive");
  LegacyBaselines out;
  out.omega_opt = std::cbrt(7.0 * kPi) * std::cbrt(V * V / tau);
  out.eps_legacy =
      3.0 * std::pow(7.0 * kPi, 2.0 / 3.0) / 8.0 * std::pow(V * tau, -2.0 / 3.0);
  out.eps_ddp = eps_ddp(V, tau);
  return out;
}

// Resonant pi-2pi-pi blockade gate (both pulses at the same Rabi rate,
// target pulse undetuned; the conditional phase comes from blockade).
inline PulseSequence legacy_sequence(double V, double omega) {
  require(omega > 0.0 && V > 0.0, "legacy_sequence: positive Omega, V");
  PulseSegment ctrl{kPi / omega, omega, 0.0, 0.0, 0.0};
  PulseSegment target{2.0 * kPi / omega, 0.0, omega, 0.0, 0.0};
  return {ctrl, target, ctrl};
}

// Infidelity of the legacy gate at Omega_opt against the nearest
// controlled-phase gate (the conditional phase is not exactly pi at finite
// V*tau, and local phases are free).
inline double legacy_error_point(double v_tau) {
  const LegacyBaselines base = legacy_baselines(1.0, v_tau);
  const PhysicsParams params{1.0, 1.0 / v_tau};
  const Mat9 u = propagate_sequence(legacy_sequence(1.0, base.omega_opt),
                                    params);
  return 1.0 - fstar_free_conditional_phase(computational_block(u));
}

// The closed-form legacy error is the envelope of a blockade-phase
// oscillation in V*tau. Average over one full oscillation period (the
// optimum Rabi rate scales as (V*tau)^{-1/3}, so the 2pi-pulse blockade
// phase psi advances by 2pi over a fractional window 3*2pi/psi), rescaling
// samples by w^{2/3} to remove the envelope trend inside the window.
inline double legacy_simulated_error(double v_tau, int window_points = 17) {
  require(window_points >= 3, "legacy_simulated_error: need >= 3 points");
  const double omega_opt = legacy_baselines(1.0, v_tau).omega_opt;
  const double psi = kPi * std::sqrt(1.0 + 1.0 / (omega_opt * omega_opt));
  const double span = 3.0 * 2.0 * kPi / psi;
  double acc = 0.0;
  for (int i = 0; i < window_points; ++i) {
    const double w =
        1.0 - span / 2.0 + span * i / (window_points - 1);
    acc += legacy_error_point(v_tau * w) * std::pow(w, 2.0 / 3.0);
  }
  return acc / window_points;
}

inline CanonicalCorrection canonical_correction(const Vec4& diag,
                                                double theta = kPi) {
  CanonicalCorrection c;
  c.global_phase = std::arg(diag(0));
  c.beta = wrap_angle(std::arg(diag(1)) - c.global_phase);
  c.alpha = wrap_angle(std::arg(diag(2)) - c.global_phase);
  c.residual = wrap_angle(controlled_phase_of(diag) - theta);
  return c;
}

inline double spacing_to_interaction_error(int alpha_exponent,
                                           double dr_over_r) {
  require(alpha_exponent == 3 || alpha_exponent == 6,
          "spacing_to_interaction_error: exponent must be 3 (resonant) or 6 "
          "(van der Waals)");
  return -static_cast<double>(alpha_exponent) * dr_over_r;
}

}  // namespace rydgate

#endif  // RYDGATE_ANALYTIC_HPP_
