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
#include <unsupported/Eigen/MatrixFunctions>

#include "rydgate/analytic.hpp"
#include "rydgate/core.hpp"
#include "rydgate/fidelity.hpp"

using namespace rydgate;

namespace {

Mat4 random_block(std::mt19937& rng, bool contractive) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cxd(n(rng), n(rng));
  const Eigen::HouseholderQR<Mat4> qr(a);
  Mat4 q = qr.householderQ();
  if (contractive) {
    std::uniform_real_distribution<double> u(0.85, 1.0);
    for (int i = 0; i < 4; ++i) q.col(i) *= u(rng);
  }
  return q;
}

// Brute-force F*: dense grid over the two local phases, then coordinate-wise
// golden-section polish. Independent of the closed-form reduction.
double fstar_brute(const Mat4& m, const Mat4& target) {
  const auto overlap = [&](double alpha, double beta) {
    const Vec4 corr(cxd(1.0, 0.0), std::exp(kI * beta), std::exp(kI * alpha),
                    std::exp(kI * (alpha + beta)));
    const Mat4 t = corr.asDiagonal() * target;
    return std::abs((t.adjoint() * m).trace());
  };
  double ba = 0.0, bb = 0.0, best = -1.0;
  const int g = 400;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double a = 2.0 * kPi * i / g, b = 2.0 * kPi * j / g;
      const double v = overlap(a, b);
      if (v > best) {
        best = v;
        ba = a;
        bb = b;
      }
    }
  }
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int round = 0; round < 60; ++round) {
    for (int axis = 0; axis < 2; ++axis) {
      double lo = (axis ? bb : ba) - 2.0 * kPi / g;
      double hi = (axis ? bb : ba) + 2.0 * kPi / g;
      const auto eval = [&](double x) {
        return axis ? overlap(ba, x) : overlap(x, bb);
      };
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = eval(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = eval(x1);
        }
      }
      if (axis)
        bb = 0.5 * (lo + hi);
      else
        ba = 0.5 * (lo + hi);
      best = overlap(ba, bb);
    }
  }
  return (m.squaredNorm() + best * best) / 20.0;
}

}  // namespace

TEST_CASE("average gate fidelity") {
  SECTION("perfect gate scores one") {
    REQUIRE(average_gate_fidelity(cz_target(), cz_target()) ==
            Catch::Approx(1.0).margin(1e-14));
  }

  SECTION("identity against CZ is the classic 0.6 after correction") {
    const LocalPhaseResult r =
        optimize_local_phases(Mat4::Identity(), cz_target());
    REQUIRE(r.fstar == Catch::Approx(0.6).margin(1e-10));
  }

  SECTION("bounded by one for unitaries") {
    std::mt19937 rng(3);
    for (int t = 0; t < 20; ++t) {
      const Mat4 m = random_block(rng, false);
      REQUIRE(average_gate_fidelity(m, cz_target()) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("local phase optimization") {
  std::mt19937 rng(5);

  SECTION("matches the brute-force oracle on random blocks") {
    std::uniform_real_distribution<double> u(0.1, kPi);
    for (int t = 0; t < 12; ++t) {
      const Mat4 m = random_block(rng, t % 2 == 0);
      const Mat4 target = cphase_target(u(rng));
      const double fast = optimize_local_phases(m, target).fstar;
      const double slow = fstar_brute(m, target);
      REQUIRE(fast == Catch::Approx(slow).margin(1e-7));
    }
  }

  SECTION("pure local phases are fully corrected") {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int t = 0; t < 10; ++t) {
      const double a = u(rng), b = u(rng), g = u(rng);
      const Vec4 corr(std::exp(kI * g), std::exp(kI * (g + b)),
                      std::exp(kI * (g + a)), std::exp(kI * (g + a + b)));
      const Mat4 m = corr.asDiagonal() * cz_target();
      const LocalPhaseResult r = optimize_local_phases(m, cz_target());
      REQUIRE(r.fstar == Catch::Approx(1.0).margin(1e-10));
    }
  }

  SECTION("gauge invariance: local Z and global phases never change F*") {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int t = 0; t < 10; ++t) {
      const Mat4 m = random_block(rng, true);
      const double base = optimize_local_phases(m, cz_target()).fstar;
      const double a = u(rng), b = u(rng), g = u(rng);
      const Vec4 corr(std::exp(kI * g), std::exp(kI * (g + b)),
                      std::exp(kI * (g + a)), std::exp(kI * (g + a + b)));
      const Mat4 shifted = corr.asDiagonal() * m;
      const double moved = optimize_local_phases(shifted, cz_target()).fstar;
      REQUIRE(moved == Catch::Approx(base).margin(1e-10));
    }
  }

  SECTION("recovered angles reproduce the optimum") {
    for (int t = 0; t < 8; ++t) {
      const Mat4 m = random_block(rng, false);
      const LocalPhaseResult r = optimize_local_phases(m, cz_target());
      const Vec4 corr(
          std::exp(kI * r.global_phase),
          std::exp(kI * (r.global_phase + r.beta)),
          std::exp(kI * (r.global_phase + r.alpha)),
          std::exp(kI * (r.global_phase + r.alpha + r.beta)));
      const Mat4 target = corr.asDiagonal() * cz_target();
      REQUIRE(average_gate_fidelity(m, target) ==
              Catch::Approx(r.fstar).margin(1e-10));
    }
  }

  SECTION("free conditional phase can only help") {
    for (int t = 0; t < 8; ++t) {
      const Mat4 m = random_block(rng, true);
      REQUIRE(fstar_free_conditional_phase(m) + 1e-12 >=
              optimize_local_phases(m, cz_target()).fstar);
    }
  }
}

TEST_CASE("fidelity report") {
  SECTION("perfect CZ") {
    const FidelityReport rep = fidelity_report(cz_target(), cz_target());
    REQUIRE(rep.fstar == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(rep.raw_f == Catch::Approx(1.0).margin(1e-13));
    for (double l : rep.leakage) REQUIRE(std::abs(l) < 1e-13);
    REQUIRE(std::abs(rep.decay_loss) < 1e-13);
  }

  SECTION("decay shows up as column-norm loss") {
    const GateDesign d = design_cz(1.0, 1.0);
    const Mat4 m = computational_block(simulate_design(d, 1e-4));
    const FidelityReport rep = fidelity_report(m, cz_target());
    REQUIRE(rep.decay_loss > 1e-5);
    REQUIRE(rep.fstar < 1.0);
  }
}

TEST_CASE("controlled phase extraction") {
  const Vec4 d(std::exp(kI * 0.3), std::exp(kI * 0.5), std::exp(kI * 1.1),
               std::exp(kI * (0.5 + 1.1 - 0.3 + 2.0)));
  REQUIRE(controlled_phase_of(d) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("block reduction equivalence") {
  // With the control atom parked in |0>, |1>, or |r>, target dynamics is an
  // exact 2x2 problem; the 9-dim propagator must reproduce it entry by
  // entry. The control-in-|r> block sees the interaction-shifted detuning.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (int trial = 0; trial < 6; ++trial) {
    PulseSegment seg;
    seg.duration = u(rng);
    seg.omega_control = 0.0;
    seg.omega_target = u(rng);
    seg.xi = u(rng) - 0.85;
    seg.delta = u(rng) - 0.85;
    const double v = u(rng);
    const Mat9 u9 = segment_propagator(seg, PhysicsParams{v, 0.0});

    const auto check_block = [&](int i0, int i1, double shift) {
      Eigen::Matrix2cd h2;
      h2 << 0.0, 0.5 * seg.omega_target * std::exp(-kI * seg.xi),
          0.5 * seg.omega_target * std::exp(kI * seg.xi), seg.delta + shift;
      const Eigen::Matrix2cd u2 = (-kI * seg.duration * h2).exp();
      REQUIRE(std::abs(u9(i0, i0) - u2(0, 0)) < 1e-10);
      REQUIRE(std::abs(u9(i0, i1) - u2(0, 1)) < 1e-10);
      REQUIRE(std::abs(u9(i1, i0) - u2(1, 0)) < 1e-10);
      REQUIRE(std::abs(u9(i1, i1) - u2(1, 1)) < 1e-10);
    };
    check_block(0, 2, 0.0);   // control |0>
    check_block(3, 5, 0.0);   // control |1>
    check_block(6, 8, -v);    // control |r>: interaction-shifted
  }
}
