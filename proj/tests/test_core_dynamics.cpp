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

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rydgate/analytic.hpp"
#include "rydgate/core.hpp"

using namespace rydgate;

namespace {

PulseSegment random_segment(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PulseSegment seg;
  seg.duration = 0.3 + 2.0 * u(rng);
  seg.omega_control = 2.0 * u(rng);
  seg.omega_target = 2.0 * u(rng);
  seg.xi = 2.0 * kPi * (u(rng) - 0.5);
  seg.delta = 2.0 * (u(rng) - 0.5);
  return seg;
}

Vec9 random_state(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec9 psi;
  for (int i = 0; i < kDim; ++i) psi(i) = cxd(n(rng), n(rng));
  psi.normalize();
  return psi;
}

}  // namespace

TEST_CASE("hamiltonian structure") {
  const PulseSegment seg{1.0, 0.7, 1.3, 0.4, 0.25};
  const PhysicsParams params{1.0, 0.0};
  const Mat9 h = build_hamiltonian(seg, params);

  SECTION("hermitian without decay") {
    REQUIRE((h - h.adjoint()).norm() < 1e-15);
  }

  SECTION("control drive couples |0c> <-> |rc> with strength omega_c/2") {
    for (int t = 0; t < 3; ++t) {
      REQUIRE(std::abs(h(t, 6 + t) - cxd(0.35, 0.0)) < 1e-15);
    }
  }

  SECTION("target drive carries the laser phase") {
    const cxd expected = 0.5 * 1.3 * std::exp(-kI * 0.4);
    for (int c = 0; c < 3; ++c) {
      REQUIRE(std::abs(h(3 * c, 3 * c + 2) - expected) < 1e-15);
      REQUIRE(std::abs(h(3 * c + 2, 3 * c) - std::conj(expected)) < 1e-15);
    }
  }

  SECTION("diagonal: detuning on target-Rydberg states, -V on |rr>") {
    REQUIRE(std::abs(h(2, 2) - cxd(0.25, 0.0)) < 1e-15);
    REQUIRE(std::abs(h(5, 5) - cxd(0.25, 0.0)) < 1e-15);
    REQUIRE(std::abs(h(8, 8) - cxd(0.25 - 1.0, 0.0)) < 1e-15);
    REQUIRE(std::abs(h(4, 4)) < 1e-15);
  }

  SECTION("decay enters as -i gamma/2 per excited atom") {
    const Mat9 hd = build_hamiltonian(seg, PhysicsParams{1.0, 0.02});
    const Mat9 anti = (hd - hd.adjoint()) / (2.0 * kI);
    for (int i = 0; i < kDim; ++i) {
      REQUIRE(std::abs(anti(i, i) - cxd(-0.01 * kRydbergWeight[i], 0.0)) <
              1e-15);
    }
  }

  SECTION("preconditions") {
    REQUIRE_THROWS_AS(build_hamiltonian(seg, PhysicsParams{0.0, 0.0}),
                      PreconditionError);
    REQUIRE_THROWS_AS(build_hamiltonian(seg, PhysicsParams{1.0, -0.1}),
                      PreconditionError);
    PulseSegment bad = seg;
    bad.duration = -1.0;
    REQUIRE_THROWS_AS(build_hamiltonian(bad, params), PreconditionError);
    bad = seg;
    bad.xi = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(build_hamiltonian(bad, params), PreconditionError);
  }
}

TEST_CASE("segment propagation") {
  std::mt19937 rng(7);
  const PhysicsParams params{1.0, 0.0};

  SECTION("zero duration is the identity") {
    PulseSegment seg = random_segment(rng);
    seg.duration = 0.0;
    REQUIRE((segment_propagator(seg, params) - Mat9::Identity()).norm() <
            1e-14);
  }

  SECTION("unitary without decay") {
    for (int trial = 0; trial < 10; ++trial) {
      const Mat9 u = segment_propagator(random_segment(rng), params);
      REQUIRE((u.adjoint() * u - Mat9::Identity()).norm() < 1e-12);
    }
  }

  SECTION("norm never grows with decay") {
    const PhysicsParams decaying{1.0, 0.05};
    for (int trial = 0; trial < 10; ++trial) {
      const PulseSegment seg = random_segment(rng);
      const Mat9 u = segment_propagator(seg, decaying);
      const Vec9 psi = random_state(rng);
      double prev = 1.0;
      Vec9 cur = psi;
      for (int rep = 0; rep < 4; ++rep) {
        cur = (u * cur).eval();
        const double nrm = cur.norm();
        REQUIRE(nrm <= prev + 1e-12);
        prev = nrm;
      }
    }
  }

  SECTION("matches direct ODE integration") {
    for (double gamma : {0.0, 0.03}) {
      const PhysicsParams p{1.0, gamma};
      for (int trial = 0; trial < 4; ++trial) {
        const PulseSegment seg = random_segment(rng);
        const Vec9 psi = random_state(rng);
        const Vec9 via_expm = segment_propagator(seg, p) * psi;
        const Vec9 via_ode = oracles::propagate_segment_rk45(seg, p, psi);
        REQUIRE((via_expm - via_ode).norm() < 1e-8);
      }
    }
  }

  SECTION("|11> is dark") {
    for (int trial = 0; trial < 5; ++trial) {
      const Mat9 u = segment_propagator(random_segment(rng), params);
      REQUIRE((u * basis_state(4) - basis_state(4)).norm() < 1e-13);
    }
  }

  SECTION("units scale invariance") {
    const PulseSegment seg = random_segment(rng);
    const double s = 3.7;
    PulseSegment scaled = seg;
    scaled.duration /= s;
    scaled.omega_control *= s;
    scaled.omega_target *= s;
    scaled.delta *= s;
    const Mat9 u1 = segment_propagator(seg, PhysicsParams{1.0, 0.02});
    const Mat9 u2 =
        segment_propagator(scaled, PhysicsParams{s, 0.02 * s});
    REQUIRE((u1 - u2).norm() < 1e-12);
  }
}

TEST_CASE("sequence propagation") {
  const PhysicsParams params{1.0, 0.0};
  std::mt19937 rng(11);

  SECTION("applies segments in order, last leftmost") {
    const PulseSegment s1{0.8, 1.0, 0.0, 0.0, 0.0};
    const PulseSegment s2{0.5, 0.0, 1.2, 0.3, 0.4};
    const Mat9 u1 = segment_propagator(s1, params);
    const Mat9 u2 = segment_propagator(s2, params);
    const Mat9 u = propagate_sequence({s1, s2}, params);
    REQUIRE((u - u2 * u1).norm() < 1e-13);
  }

  SECTION("full gate sequence matches the ODE oracle") {
    const PulseSequence seq = design_sequence(design_cz(1.0, 1.0));
    for (int idx : kComp) {
      const Vec9 via_expm = propagate_sequence(seq, params) * basis_state(idx);
      const Vec9 via_ode =
          oracles::propagate_sequence_rk45(seq, params, basis_state(idx));
      REQUIRE((via_expm - via_ode).norm() < 1e-8);
    }
  }

  SECTION("empty sequence is the identity") {
    REQUIRE((propagate_sequence({}, params) - Mat9::Identity()).norm() == 0.0);
  }
}

TEST_CASE("control pi map") {
  const Mat9 k = control_pi_map();

  SECTION("maps |0c> to -i|rc> and back, leaves |1c> alone") {
    REQUIRE((k * basis_state(0) + kI * basis_state(6)).norm() < 1e-15);
    REQUIRE((k * basis_state(6) + kI * basis_state(0)).norm() < 1e-15);
    REQUIRE((k * basis_state(3) - basis_state(3)).norm() < 1e-15);
    REQUIRE((k * basis_state(4) - basis_state(4)).norm() < 1e-15);
  }

  SECTION("square gives -1 on the driven control subspace") {
    const Mat9 k2 = k * k;
    REQUIRE((k2 * basis_state(0) + basis_state(0)).norm() < 1e-15);
    REQUIRE((k2 * basis_state(3) - basis_state(3)).norm() < 1e-15);
  }

  SECTION("matches the hard control pulse limit") {
    // A p=200 control pi pulse approximates the instantaneous map.
    const double omega_c = 200.0;
    const PulseSegment ctrl{kPi / omega_c, omega_c, 0.0, 0.0, 0.0};
    const Mat9 u = segment_propagator(ctrl, PhysicsParams{1.0, 0.0});
    REQUIRE((u - k).cwiseAbs().maxCoeff() < 0.02);
  }
}

TEST_CASE("integrated Rydberg population") {
  const PhysicsParams params{1.0, 0.0};
  const PulseSequence seq = design_sequence(design_cz(1.0, 1.0));

  SECTION("rejects decay") {
    REQUIRE_THROWS_AS(
        integrated_rydberg_population(seq, PhysicsParams{1.0, 0.01},
                                      basis_state(0)),
        PreconditionError);
  }

  SECTION("doubly excited state accumulates weight two") {
    const PulseSegment idle{0.7, 0.0, 0.0, 0.0, 0.3};
    const double integral =
        integrated_rydberg_population({idle}, params, basis_state(8));
    REQUIRE(integral == Catch::Approx(2.0 * 0.7).epsilon(1e-12));
  }

  SECTION("matches the ODE accumulator oracle on all basis states") {
    for (int idx : kComp) {
      const double fast =
          integrated_rydberg_population(seq, params, basis_state(idx));
      const double slow =
          oracles::integrated_population_rk45(seq, params, basis_state(idx));
      REQUIRE(fast == Catch::Approx(slow).epsilon(1e-7));
    }
  }

  SECTION("basis average at p=1 hits the closed form") {
    const double expected =
        kPi * (33.0 + 8.0 * std::sqrt(3.0)) / 24.0;  // V = 1
    const double averaged = basis_averaged_rydberg_population(seq, params);
    REQUIRE(averaged == Catch::Approx(expected).epsilon(5e-3));
    REQUIRE(averaged == Catch::Approx(expected).epsilon(1e-4));
  }

  SECTION("decay loss is Gamma times the integral, to first order") {
    const double gamma = 1e-5;
    const Mat9 u = propagate_sequence(seq, PhysicsParams{1.0, gamma});
    double loss = 0.0;
    double integral = 0.0;
    for (int idx : kComp) {
      loss += 1.0 - (u * basis_state(idx)).squaredNorm();
      integral += integrated_rydberg_population(seq, params, basis_state(idx));
    }
    REQUIRE(loss / 4.0 ==
            Catch::Approx(gamma * integral / 4.0).epsilon(1e-3));
  }
}
