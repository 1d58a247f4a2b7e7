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
// Average two-qubit gate fidelity F = [Tr(M'M) + |Tr(T'M)|^2]/20 on the
// computational block, with exact maximization over the local-Z gauge
// diag(1, e^{i beta}, e^{i alpha}, e^{i(alpha+beta)}) and a global phase.
// Loss of norm (Rydberg decay, leakage to |r>) is kept in M, not
// renormalized, so 1 - F* lower-bounds at (norm loss)/5.

#ifndef RYDGATE_FIDELITY_HPP_
#define RYDGATE_FIDELITY_HPP_

#include <algorithm>
#include <array>

#include "rydgate/common.hpp"

namespace rydgate {

using ComputationalBlock = Mat4;

inline ComputationalBlock computational_block(const Mat9& u) {
  ComputationalBlock m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = u(kComp[i], kComp[j]);
  return m;
}

inline Mat4 cphase_target(double theta) {
  Mat4 t = Mat4::Identity();
  t(3, 3) = std::exp(kI * theta);
  return t;
}

inline Mat4 cz_target() { return cphase_target(kPi); }

inline double average_gate_fidelity(const ComputationalBlock& m,
                                    const Mat4& target) {
  const double tr_mm = m.squaredNorm();
  const cxd tr_tm = (target.adjoint() * m).trace();
  return (tr_mm + std::norm(tr_tm)) / 20.0;
}

struct LocalPhaseResult {
  double alpha = 0.0;         // Z angle on the control qubit
  double beta = 0.0;          // Z angle on the target qubit
  double global_phase = 0.0;  // arg by which M leads the corrected target
  double fstar = 0.0;         // fidelity after the correction
};

namespace detail {

// Maximize s(x) = |a0 + a1 e^{ix}| + |a2 + a3 e^{i(x+r)}| on (-pi, pi]:
// 256-point grid then golden-section refinement. Returns (x*, s(x*)).
inline std::pair<double, double> maximize_phase_sum(double a0, double a1,
                                                    double a2, double a3,
                                                    double r) {
  auto s = [&](double x) {
    return std::abs(a0 + a1 * std::exp(kI * x)) +
           std::abs(a2 + a3 * std::exp(kI * (x + r)));
  };
  constexpr int kGrid = 256;
  double best_x = 0.0, best_v = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double x = -kPi + (2.0 * kPi * i) / kGrid;
    const double v = s(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  double lo = best_x - 2.0 * kPi / kGrid;
  double hi = best_x + 2.0 * kPi / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = s(c), fd = s(d);
  while (hi - lo > 1e-14) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = s(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = s(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, s(x)};
}

// Row weights w_k = sum_j M(k,j) conj(T(k,j)): Tr(T' Z' M) = sum_k z_k* w_k.
inline Vec4 row_weights(const ComputationalBlock& m, const Mat4& target) {
  Vec4 w;
  for (int k = 0; k < 4; ++k) w(k) = target.row(k).dot(m.row(k));
  return w;
}

}  // namespace detail

// Exact local-Z + global-phase maximization of F for any block M: the trace
// term reduces to a one-dimensional phase alignment in beta.
inline LocalPhaseResult optimize_local_phases(const ComputationalBlock& m,
                                              const Mat4& target) {
  const Vec4 w = detail::row_weights(m, target);
  const std::array<double, 4> a = {std::abs(w(0)), std::abs(w(1)),
                                   std::abs(w(2)), std::abs(w(3))};
  const std::array<double, 4> phi = {std::arg(w(0)), std::arg(w(1)),
                                     std::arg(w(2)), std::arg(w(3))};
  const double r = phi[0] + phi[3] - phi[1] - phi[2];
  const auto [x, s] = detail::maximize_phase_sum(a[0], a[1], a[2], a[3], r);
  LocalPhaseResult out;
  out.fstar = (m.squaredNorm() + s * s) / 20.0;
  const cxd p = a[0] + a[1] * std::exp(kI * x);
  const cxd q = a[2] + a[3] * std::exp(kI * (x + r));
  const double y = std::arg(p) - std::arg(q);
  out.beta = wrap_angle(phi[1] - phi[0] - x);
  out.alpha = wrap_angle(phi[2] - phi[0] - y);
  out.global_phase = wrap_angle(phi[0] + std::arg(p));
  return out;
}

// F* against the controlled-phase family with the phase itself also free
// (local-Z gauge plus arbitrary conditional phase). Exact for this family.
inline double fstar_free_conditional_phase(const ComputationalBlock& m) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += std::abs(m(k, k));
  return (m.squaredNorm() + s * s) / 20.0;
}

// Bell-nonlocal (gauge-invariant) phase of a diagonal block.
inline double controlled_phase_of(const Vec4& diag) {
  return wrap_angle(std::arg(diag(0)) + std::arg(diag(3)) -
                    std::arg(diag(1)) - std::arg(diag(2)));
}

inline double decay_error(double integrated_population, double tau) {
  require(tau > 0.0, "decay_error: tau must be positive");
  return integrated_population / tau;
}

struct FidelityReport {
  double raw_f = 0.0;    // fidelity against the uncorrected target
  double fstar = 0.0;    // after local-Z + global-phase correction
  double alpha = 0.0;
  double beta = 0.0;
  double global_phase = 0.0;
  std::array<double, 4> leakage = {0, 0, 0, 0};  // 1 - |column|^2
  double decay_loss = 0.0;                       // 1 - Tr(M'M)/4
};

inline FidelityReport fidelity_report(const ComputationalBlock& m,
                                      const Mat4& target) {
  FidelityReport rep;
  rep.raw_f = average_gate_fidelity(m, target);
  const LocalPhaseResult lp = optimize_local_phases(m, target);
  rep.fstar = lp.fstar;
  rep.alpha = lp.alpha;
  rep.beta = lp.beta;
  rep.global_phase = lp.global_phase;
  for (int k = 0; k < 4; ++k)
    rep.leakage[k] = 1.0 - m.col(k).squaredNorm();
  rep.decay_loss = 1.0 - m.squaredNorm() / 4.0;
  return rep;
}

}  // namespace rydgate

#endif  // RYDGATE_FIDELITY_HPP_
