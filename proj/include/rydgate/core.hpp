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
// Two-atom dynamics for Rydberg-blockade phase gates over the ordered levels
// {|0>, |1>, |r>} per atom (9-dimensional product basis). The drive couples
// |0> <-> |r> only; |1> is dark. Detuning enters as +Delta on the target
// Rydberg projector and the doubly excited pair state is shifted by -V, the
// sign choice under which the canonical design (Omega = sqrt(3)V/2,
// Delta = V/2, t = 2pi/V) returns |0> with amplitude exp(-i*3pi/2) when the
// control atom is in the ground state and exp(-i*pi/2) when it is in |r>.
// Spontaneous decay of |r> is modeled as pure loss via the non-Hermitian term
// -i(Gamma/2) on each Rydberg projector.

#ifndef RYDGATE_CORE_HPP_
#define RYDGATE_CORE_HPP_

#include <vector>

#include "rydgate/common.hpp"
#include "rydgate/linalg.hpp"

namespace rydgate {

struct PhysicsParams {
  double V = 1.0;      // pair-state interaction shift (angular frequency)
  double gamma = 0.0;  // Rydberg decay rate 1/tau

  void validate() const {
    require(V > 0.0, "PhysicsParams: V must be positive");
    require(gamma >= 0.0, "PhysicsParams: gamma must be non-negative");
  }
};

struct PulseSegment {
  double duration = 0.0;       // >= 0
  double omega_control = 0.0;  // control-atom Rabi amplitude
  double omega_target = 0.0;   // target-atom Rabi amplitude
  double xi = 0.0;             // target-drive laser phase (radians)
  double delta = 0.0;          // target-drive detuning

  void validate() const {
    require(duration >= 0.0, "PulseSegment: duration must be non-negative");
    require(std::isfinite(duration) && std::isfinite(omega_control) &&
                std::isfinite(omega_target) && std::isfinite(xi) &&
                std::isfinite(delta),
            "PulseSegment: non-finite field");
  }
};

using PulseSequence = std::vector<PulseSegment>;
using TwoAtomState = Vec9;

inline double total_duration(const PulseSequence& seq) {
  double t = 0.0;
  for (const auto& s : seq) t += s.duration;
  return t;
}

inline TwoAtomState basis_state(int index) {
  TwoAtomState psi = TwoAtomState::Zero();
  psi(index) = 1.0;
  return psi;
}

inline Mat9 build_hamiltonian(const PulseSegment& seg,
                              const PhysicsParams& params) {
  seg.validate();
  params.validate();
  Mat9 h = Mat9::Zero();
  const cxd drive_t = 0.5 * seg.omega_target * std::exp(-kI * seg.xi);
  const double drive_c = 0.5 * seg.omega_control;
  for (int k = 0; k < 3; ++k) {
    // control |0><r| block (rows/cols 0..2 vs 6..8), resonant drive
    h(k, 6 + k) += drive_c;
    h(6 + k, k) += drive_c;
    // target |0><r| within each control block
    h(3 * k, 3 * k + 2) += drive_t;
    h(3 * k + 2, 3 * k) += std::conj(drive_t);
  }
  for (int idx : kTargetR) h(idx, idx) += seg.delta;
  h(8, 8) -= params.V;
  if (params.gamma > 0.0) {
    for (int idx = 0; idx < kDim; ++idx)
      h(idx, idx) -= 0.5 * kI * params.gamma * kRydbergWeight[idx];
  }
  return h;
}

inline Mat9 propagate_segment(const Mat9& h, double t) {
  require(t >= 0.0, "propagate_segment: negative duration");
  require(h.allFinite(), "propagate_segment: non-finite Hamiltonian");
  if (t == 0.0) return Mat9::Identity();
  return matrix_exponential((-kI * t * h).eval());
}

inline Mat9 segment_propagator(const PulseSegment& seg,
                               const PhysicsParams& params) {
  return propagate_segment(build_hamiltonian(seg, params), seg.duration);
}

// Time-ordered product; the last segment acts leftmost.
inline Mat9 propagate_sequence(const PulseSequence& seq,
                               const PhysicsParams& params) {
  Mat9 u = Mat9::Identity();
  for (const auto& seg : seq) u = segment_propagator(seg, params) * u;
  return u;
}

// Instantaneous control pi pulse (|0> <-> -i|r> on the control atom), the
// p -> infinity limit of a resonant half-cycle. Zero duration, zero dwell.
inline Mat9 control_pi_map() {
  Mat9 k = Mat9::Zero();
  for (int t = 0; t < 3; ++t) {
    k(t, 6 + t) = -kI;
    k(6 + t, t) = -kI;
    k(3 + t, 3 + t) = 1.0;
  }
  return k;
}

namespace detail {

// Exact integral of the weighted Rydberg population over one constant-H
// segment: decompose H = V L V^dag and integrate each e^{i(l_j - l_l)t}
// factor in closed form.
inline double segment_rydberg_integral(const Mat9& h, double t,
                                       TwoAtomState* psi) {
  Eigen::SelfAdjointEigenSolver<Mat9> es(h);
  const Mat9& vecs = es.eigenvectors();
  const Eigen::Matrix<double, 9, 1>& vals = es.eigenvalues();
  Eigen::Matrix<double, 9, 1> w;
  for (int i = 0; i < kDim; ++i) w(i) = kRydbergWeight[i];
  const Mat9 wmat = vecs.adjoint() * w.asDiagonal() * vecs;
  const Vec9 c = vecs.adjoint() * (*psi);
  cxd integral = 0.0;
  for (int j = 0; j < kDim; ++j) {
    for (int l = 0; l < kDim; ++l) {
      const double d = vals(j) - vals(l);
      // eta(d) = int_0^t exp(i d s) ds
      const cxd eta = (std::abs(d) * t < 1e-12)
                          ? cxd(t, 0.0)
                          : (std::exp(kI * d * t) - 1.0) / (kI * d);
      integral += std::conj(c(j)) * c(l) * wmat(j, l) * eta;
    }
  }
  // advance the state to the end of the segment
  Vec9 phases;
  for (int j = 0; j < kDim; ++j) phases(j) = std::exp(-kI * vals(j) * t);
  *psi = vecs * (phases.asDiagonal() * c);
  return integral.real();
}

}  // namespace detail

// Integral over the full sequence of the expected number of atoms in |r>
// (doubly excited states count twice: two decay channels). Requires a
// unitary trajectory; with decay the population question is ill-posed here.
inline double integrated_rydberg_population(const PulseSequence& seq,
                                            const PhysicsParams& params,
                                            const TwoAtomState& initial) {
  params.validate();
  require(params.gamma == 0.0,
          "integrated_rydberg_population: gamma must be zero (use "
          "decay-inclusive propagation for lossy trajectories)");
  TwoAtomState psi = initial;
  double acc = 0.0;
  for (const auto& seg : seq) {
    const Mat9 h = build_hamiltonian(seg, params);
    acc += detail::segment_rydberg_integral(h, seg.duration, &psi);
  }
  return acc;
}

// Average of integrated_rydberg_population over the four computational
// basis states.
inline double basis_averaged_rydberg_population(const PulseSequence& seq,
                                                const PhysicsParams& params) {
  double acc = 0.0;
  for (int idx : kComp)
    acc += integrated_rydberg_population(seq, params, basis_state(idx));
  return acc / 4.0;
}

}  // namespace rydgate

#endif  // RYDGATE_CORE_HPP_
