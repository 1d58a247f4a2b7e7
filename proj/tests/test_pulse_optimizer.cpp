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
#include <thread>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rydgate/grape.hpp"
#include "rydgate/quad.hpp"

using namespace rydgate;

namespace {

const double kOmega = std::sqrt(3.0) / 2.0;  // V = 2 Omega / sqrt(3) = 1

PhaseWaveform random_waveform(std::mt19937& rng, int n, double duration) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  PhaseWaveform w = flat_waveform(kOmega, 1.0, duration, n);
  for (int i = 0; i < n; ++i) w.xi(i) = u(rng);
  return w;
}

int test_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(8u, hc > 0 ? hc : 1u));
}

}  // namespace

TEST_CASE("waveform evaluation") {
  SECTION("single flat segment reproduces the analytic gate") {
    const PhaseWaveform w = flat_waveform(kOmega, 1.0, 2.0 * kPi);
    const FidelityReport rep = evaluate_waveform(w);
    REQUIRE(1.0 - rep.fstar < 1e-12);
  }

  SECTION("splitting segments changes nothing for a flat pulse") {
    const PhaseWaveform w1 = flat_waveform(kOmega, 1.0, 2.0 * kPi, 1);
    const PhaseWaveform w64 = flat_waveform(kOmega, 1.0, 2.0 * kPi, 64);
    REQUIRE(waveform_infidelity(w1, kOmega, 1.0) ==
            Catch::Approx(waveform_infidelity(w64, kOmega, 1.0))
                .margin(1e-12));
  }

  SECTION("constant phase offset is a gauge choice") {
    std::mt19937 rng(23);
    PhaseWaveform w = random_waveform(rng, 32, 7.0);
    const double base = waveform_infidelity(w, 0.97 * kOmega, 1.02);
    w.xi.array() += 1.2345;
    const double moved = waveform_infidelity(w, 0.97 * kOmega, 1.02);
    REQUIRE(moved == Catch::Approx(base).margin(1e-10));
  }

  SECTION("scan at zero offset equals the nominal evaluation") {
    std::mt19937 rng(29);
    const PhaseWaveform w = random_waveform(rng, 16, 6.0);
    const auto curve = fidelity_scan(w, ScanParameter::kRabi, {0.0});
    REQUIRE(curve[0].second ==
            Catch::Approx(waveform_infidelity(w, w.omega, w.V))
                .margin(1e-14));
  }

  SECTION("scan grid beyond ten percent is rejected") {
    const PhaseWaveform w = flat_waveform(kOmega, 1.0, 2.0 * kPi);
    REQUIRE_THROWS_AS(fidelity_scan(w, ScanParameter::kRabi, {0.12}),
                      PreconditionError);
  }

  SECTION("instantaneous detuning proxy") {
    PhaseWaveform w = flat_waveform(1.0, 1.0, 2.0, 4);  // dt = 0.5
    w.xi << 0.0, 0.3, 0.3, -0.1;
    REQUIRE(max_instantaneous_detuning(w) ==
            Catch::Approx(0.4 / 0.5).margin(1e-12));
  }
}

TEST_CASE("GRAPE gradient") {
  std::mt19937 rng(31);

  SECTION("matches central finite differences on random waveforms") {
    for (int n : {4, 16, 64}) {
      for (int trial = 0; trial < 17; ++trial) {
        const double duration = 4.0 + 6.0 * (trial % 3);
        const PhaseWaveform w = random_waveform(rng, n, duration);
        const Eigen::VectorXd g = grape_gradient(w);
        const Mat9 u0 = waveform_segment_propagator(w.omega, w.V, w.V,
                                                    w.duration, w.n, 0.0);
        const auto f = [&](const Eigen::VectorXd& xi) {
          return detail::objective_and_gradient(xi, u0, kPi, nullptr,
                                                nullptr);
        };
        const Eigen::VectorXd fd = oracles::fd_gradient(f, w.xi, 3e-6);
        const double scale = std::max(1e-10, fd.norm());
        REQUIRE((g - fd).norm() / scale < 1e-5);
      }
    }
  }

  SECTION("gradient components sum to zero (gauge direction)") {
    const PhaseWaveform w = random_waveform(rng, 24, 8.0);
    const Eigen::VectorXd g = grape_gradient(w);
    REQUIRE(std::abs(g.sum()) < 1e-12 * std::max(1.0, g.cwiseAbs().sum()));
  }
}

TEST_CASE("nominal optimization") {
  OptimizerConfig cfg;
  cfg.threads = test_threads();

  SECTION("flat pulse at the analytic duration needs almost no work") {
    cfg.restarts = 0;
    const OptimizeResult res =
        optimize_waveform(kOmega, 1.0, 2.0 * kPi, cfg);
    REQUIRE(res.reached_target);
    REQUIRE(res.objective <= 1e-8);
    REQUIRE(res.best_init == 0);
    // The flat start already sits at the optimum.
    REQUIRE(res.log.size() <= 5);
  }

  SECTION("ninety percent of the analytic duration is infeasible") {
    cfg.restarts = 4;
    const OptimizeResult res =
        optimize_waveform(kOmega, 1.0, 0.9 * 2.0 * kPi, cfg);
    REQUIRE_FALSE(res.reached_target);
    REQUIRE(res.objective > 1e-6);
  }

  SECTION("deterministic per seed and independent of thread count") {
    cfg.restarts = 4;
    cfg.seed = 42;
    cfg.threads = 1;
    const OptimizeResult a =
        optimize_waveform(kOmega, 1.0, 6.6, cfg);
    cfg.threads = test_threads();
    const OptimizeResult b =
        optimize_waveform(kOmega, 1.0, 6.6, cfg);
    REQUIRE(a.best_init == b.best_init);
    REQUIRE(a.waveform.xi == b.waveform.xi);  // bitwise
    REQUIRE(a.objective == b.objective);
  }

  SECTION("segment count scales with duration") {
    cfg.restarts = 0;
    cfg.max_iter = 5;
    const OptimizeResult res = optimize_waveform(kOmega, 1.0, 200.0, cfg);
    REQUIRE(res.waveform.n >= static_cast<int>(std::ceil(kOmega * 200.0)));
  }
}

TEST_CASE("time-optimal search") {
  OptimizerConfig cfg;
  cfg.threads = test_threads();
  cfg.restarts = 6;

  SECTION("recovers the quoted optimum at V = 2 Omega / sqrt(3)") {
    const TimeOptimalResult res = time_optimal_search(kOmega, 1.0, cfg);
    REQUIRE(res.duration * kOmega == Catch::Approx(5.441).epsilon(0.01));
    REQUIRE(res.objective <= 1e-8);
  }

  SECTION("feasibility is monotone along the bracket") {
    for (double t : {6.6, 8.0, 12.0}) {
      cfg.restarts = 2;
      const OptimizeResult res = optimize_waveform(kOmega, 1.0, t, cfg);
      REQUIRE(res.reached_target);
    }
  }

  SECTION("an unreachable target reports non-convergence") {
    OptimizerConfig hard;
    hard.restarts = 0;
    hard.max_iter = 10;
    hard.target = 0.0;  // unattainable
    hard.threads = test_threads();
    REQUIRE_THROWS_AS(time_optimal_search(1.0, 1.0, hard),
                      NonConvergenceError);
  }
}

TEST_CASE("robust optimization") {
  OptimizerConfig cfg = robust_defaults();
  cfg.threads = test_threads();
  cfg.restarts = 6;
  RobustSpec spec;  // Rabi, 5% spread, weights (2,1,1)

  SECTION("never scores worse than the flat pulse on the robust objective") {
    const double duration = 2.0 * 6.2862;
    const RobustResult res =
        robust_optimize(kOmega, 1.0, duration, spec, cfg);
    // Flat pulse at the same duration, same weighted objective.
    const PhaseWaveform flat = flat_waveform(kOmega, 1.0, duration, 1);
    const double jflat =
        (2.0 * waveform_infidelity(flat, kOmega, 1.0) +
         waveform_infidelity(flat, 0.95 * kOmega, 1.0) +
         waveform_infidelity(flat, 1.05 * kOmega, 1.0)) /
        4.0;
    REQUIRE(res.objective <= jflat + 1e-12);
    REQUIRE(res.dmax > 0.0);
  }

  SECTION("deterministic per seed") {
    cfg.restarts = 3;
    cfg.max_iter = 300;
    const RobustResult a = robust_optimize(kOmega, 1.0, 9.4, spec, cfg);
    cfg.threads = 1;
    const RobustResult b = robust_optimize(kOmega, 1.0, 9.4, spec, cfg);
    REQUIRE(a.best_init == b.best_init);
    REQUIRE(a.waveform.xi == b.waveform.xi);
  }

  SECTION("cosine basis: constant first column, bounded entries") {
    const Eigen::MatrixXd b = cosine_basis(16, 6);
    REQUIRE(b.rows() == 16);
    REQUIRE(b.cols() == 7);
    REQUIRE((b.col(0).array() - 1.0).abs().maxCoeff() < 1e-15);
    REQUIRE(b.cwiseAbs().maxCoeff() <= 1.0 + 1e-15);
  }
}

TEST_CASE("noise-averaged error") {
  const PhaseWaveform flat = flat_waveform(kOmega, 1.0, 2.0 * kPi);

  SECTION("vanishing noise recovers the nominal infidelity") {
    std::mt19937 rng(37);
    const PhaseWaveform w = random_waveform(rng, 8, 6.5);
    const double nominal = waveform_infidelity(w, w.omega, w.V);
    const double avg = weighted_average_error(w, NoiseModel{1e-9});
    REQUIRE(avg == Catch::Approx(nominal).margin(1e-8));
  }

  SECTION("quadrature is converged at the default node count") {
    const double a15 = weighted_average_error(flat, NoiseModel{0.02}, 0.0, 15);
    const double a31 = weighted_average_error(flat, NoiseModel{0.02}, 0.0, 31);
    REQUIRE(std::abs(a15 - a31) / a31 < 1e-3);
  }

  SECTION("flat analytic pulse at two percent noise") {
    const double avg = weighted_average_error(flat, NoiseModel{0.02});
    REQUIRE(avg == Catch::Approx(9.4e-4).epsilon(0.15));
  }

  SECTION("Gauss-Hermite nodes are normalized and symmetric") {
    for (int n : {15, 31}) {
      const auto nodes = gauss_hermite(n);
      double wsum = 0.0, mean = 0.0;
      for (const auto& q : nodes) {
        wsum += q.weight;
        mean += q.weight * q.node;
      }
      REQUIRE(wsum == Catch::Approx(1.0).margin(1e-12));
      REQUIRE(std::abs(mean) < 1e-14);
    }
  }
}
