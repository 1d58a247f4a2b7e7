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
// GRAPE over the piecewise-constant laser phase of the target pulse, in the
// instantaneous-control limit: the gate is K U_N ... U_1 K with K the
// control pi map and U_k = R(xi_k) U0 R(xi_k)^dag, R = exp(i xi n_r^target).
// The waveform frame keeps the static design detuning Delta0 = V/2, so the
// flat waveform at duration 2pi/V is exactly the analytic gate. One matrix
// exponential per operating point; the phases enter as row/column scalings
// on the target-Rydberg indices, and the gradient of 1 - F* telescopes over
// forward/backward chains (the corrected target is stationary at the local
// phase optimum, so it is held fixed in the derivative).

#ifndef RYDGATE_GRAPE_HPP_
#define RYDGATE_GRAPE_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "rydgate/analytic.hpp"
#include "rydgate/core.hpp"
#include "rydgate/fidelity.hpp"
#include "rydgate/lbfgs.hpp"
#include "rydgate/parallel.hpp"
#include "rydgate/quad.hpp"

namespace rydgate {

using Mat94 = Eigen::Matrix<cxd, 9, 4>;
using Mat49 = Eigen::Matrix<cxd, 4, 9>;

struct PhaseWaveform {
  int n = 1;
  double duration = 0.0;
  double omega = 0.0;  // target Rabi amplitude at the design point
  double V = 1.0;      // nominal interaction; design detuning is V/2
  Eigen::VectorXd xi;  // n laser phases

  void validate() const {
    require(n >= 1 && xi.size() == n,
            "PhaseWaveform: xi length must equal n >= 1");
    require(duration > 0.0 && omega > 0.0 && V > 0.0,
            "PhaseWaveform: duration, omega, V must be positive");
  }
};

inline PhaseWaveform flat_waveform(double omega, double V, double duration,
                                   int n = 1) {
  PhaseWaveform w;
  w.n = n;
  w.duration = duration;
  w.omega = omega;
  w.V = V;
  w.xi = Eigen::VectorXd::Zero(n);
  return w;
}

struct OptimizerConfig {
  int n_segments = 64;
  int restarts = 20;    // random inits on top of the flat one
  int max_iter = 500;   // scaled up to 2N internally
  double ftol = 1e-16;
  double gtol = 1e-13;
  double target = 1e-8;  // target infidelity for feasibility searches
  std::uint64_t seed = 0;
  int threads = 1;
};

inline OptimizerConfig robust_defaults() {
  OptimizerConfig cfg;
  cfg.n_segments = 128;
  cfg.restarts = 12;
  cfg.max_iter = 2000;
  cfg.gtol = 1e-14;
  return cfg;
}

struct RobustSpec {
  enum class Parameter { kRabi, kInteraction };
  Parameter parameter = Parameter::kRabi;
  double spread = 0.05;
  std::array<double, 3> weights = {2.0, 1.0, 1.0};  // nominal, -, +

  void validate() const {
    require(spread > 0.0, "RobustSpec: spread must be positive");
  }
};

struct NoiseModel {
  double sigma = 0.02;  // fractional std deviation of the Rabi amplitude
};

namespace detail {

inline const Mat94& gate_in_columns() {
  static const Mat94 cols = [] {
    const Mat9 k = control_pi_map();
    Mat94 c;
    for (int j = 0; j < 4; ++j) c.col(j) = k.col(kComp[j]);
    return c;
  }();
  return cols;
}

inline const Mat49& gate_out_rows() {
  static const Mat49 rows = [] {
    const Mat9 k = control_pi_map();
    Mat49 r;
    for (int i = 0; i < 4; ++i) r.row(i) = k.row(kComp[i]);
    return r;
  }();
  return rows;
}

template <typename Derived>
inline void scale_target_r_rows(Eigen::MatrixBase<Derived>& m, cxd factor) {
  for (int idx : kTargetR) m.row(idx) *= factor;
}

template <typename Derived>
inline void scale_target_r_cols(Eigen::MatrixBase<Derived>& m, cxd factor) {
  for (int idx : kTargetR) m.col(idx) *= factor;
}

struct ChainWorkspace {
  std::vector<Mat94> phi;
  std::vector<Mat49> psi;
};

// Computational block of K U_N ... U_1 K; fills forward chains when ws is
// given (phi[k] = U_k ... U_1 K_in).
inline Mat4 gate_block(const Eigen::VectorXd& xi, const Mat9& u0,
                       ChainWorkspace* ws) {
  const int n = static_cast<int>(xi.size());
  Mat94 v = gate_in_columns();
  if (ws) {
    ws->phi.resize(n + 1);
    ws->phi[0] = v;
  }
  for (int k = 0; k < n; ++k) {
    const cxd ph = std::exp(kI * xi(k));
    scale_target_r_rows(v, std::conj(ph));
    v = u0 * v;
    scale_target_r_rows(v, ph);
    if (ws) ws->phi[k + 1] = v;
  }
  return gate_out_rows() * v;
}

struct DiagFstar {
  double fstar = 0.0;
  Vec4 target_diag;  // corrected controlled-phase target diagonal
};

// F* of a (near-)diagonal block against the theta controlled-phase family;
// msq = full squaredNorm of the block.
inline DiagFstar fstar_diagonal(const Vec4& md, double theta, double msq) {
  const std::array<double, 4> a = {std::abs(md(0)), std::abs(md(1)),
                                   std::abs(md(2)), std::abs(md(3))};
  const std::array<double, 4> phi = {std::arg(md(0)), std::arg(md(1)),
                                     std::arg(md(2)), std::arg(md(3))};
  const double r = phi[0] + phi[3] - phi[1] - phi[2] - theta;
  const auto [x, s] = maximize_phase_sum(a[0], a[1], a[2], a[3], r);
  DiagFstar out;
  out.fstar = (msq + s * s) / 20.0;
  const cxd p = a[0] + a[1] * std::exp(kI * x);
  const cxd q = a[2] + a[3] * std::exp(kI * (x + r));
  const double y = std::arg(p) - std::arg(q);
  const double beta = phi[1] - phi[0] - x;
  const double alpha = phi[2] - phi[0] - y;
  out.target_diag << 1.0, std::exp(kI * beta), std::exp(kI * alpha),
      std::exp(kI * (alpha + beta + theta));
  return out;
}

// J = 1 - F* and (optionally) dJ/dxi via the telescoping chain rule.
inline double objective_and_gradient(const Eigen::VectorXd& xi,
                                     const Mat9& u0, double theta,
                                     Eigen::VectorXd* grad,
                                     ChainWorkspace* ws) {
  const int n = static_cast<int>(xi.size());
  ChainWorkspace local;
  ChainWorkspace* chains = grad ? (ws ? ws : &local) : nullptr;
  const Mat4 m = gate_block(xi, u0, chains);
  const double msq = m.squaredNorm();
  const DiagFstar fd = fstar_diagonal(m.diagonal(), theta, msq);
  if (!grad) return 1.0 - fd.fstar;

  cxd cc = 0.0;
  for (int k = 0; k < 4; ++k) cc += std::conj(fd.target_diag(k)) * m(k, k);
  Mat4 gmat = m;
  for (int k = 0; k < 4; ++k) gmat(k, k) += cc * fd.target_diag(k);
  gmat /= 10.0;
  const Mat4 gconj = gmat.conjugate();

  chains->psi.resize(n + 1);
  chains->psi[n] = gate_out_rows();
  for (int k = n; k >= 1; --k) {
    Mat49 w = chains->psi[k];
    const cxd ph = std::exp(kI * xi(k - 1));
    scale_target_r_cols(w, ph);
    w = w * u0;
    scale_target_r_cols(w, std::conj(ph));
    chains->psi[k - 1] = w;
  }
  grad->resize(n);
  Eigen::Matrix<cxd, 4, 3> left;
  Eigen::Matrix<cxd, 3, 4> right;
  cxd s_prev = 0.0;
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i < 3; ++i) {
      left.col(i) = chains->psi[k].col(kTargetR[i]);
      right.row(i) = chains->phi[k].row(kTargetR[i]);
    }
    const Mat4 ck = left * right;
    const cxd sk = gconj.cwiseProduct(ck).sum();
    if (k > 0) (*grad)(k - 1) = std::imag(sk - s_prev);
    s_prev = sk;
  }
  return 1.0 - fd.fstar;
}

}  // namespace detail

// Propagator of one waveform segment at an explicit operating point. The
// design detuning stays at the nominal V/2 even when the physical V varies.
inline Mat9 waveform_segment_propagator(double omega, double v_phys,
                                        double v_nominal, double duration,
                                        int n, double gamma = 0.0) {
  PulseSegment seg{duration / n, 0.0, omega, 0.0, v_nominal / 2.0};
  return segment_propagator(seg, PhysicsParams{v_phys, gamma});
}

// Full gate block of a waveform evaluated at an arbitrary operating point.
inline Mat4 waveform_gate_block(const PhaseWaveform& w, double omega,
                                double v_phys, double gamma = 0.0) {
  w.validate();
  const Mat9 u0 = waveform_segment_propagator(omega, v_phys, w.V, w.duration,
                                              w.n, gamma);
  return detail::gate_block(w.xi, u0, nullptr);
}

inline double waveform_infidelity(const PhaseWaveform& w, double omega,
                                  double v_phys, double gamma = 0.0,
                                  double theta = kPi) {
  const Mat4 m = waveform_gate_block(w, omega, v_phys, gamma);
  return 1.0 -
         detail::fstar_diagonal(m.diagonal(), theta, m.squaredNorm()).fstar;
}

inline FidelityReport evaluate_waveform(const PhaseWaveform& w,
                                        double gamma = 0.0,
                                        double theta = kPi) {
  const Mat4 m = waveform_gate_block(w, w.omega, w.V, gamma);
  return fidelity_report(m, cphase_target(theta));
}

// Exact dJ/dxi of the nominal infidelity (decay-free by convention).
inline Eigen::VectorXd grape_gradient(const PhaseWaveform& w,
                                      double theta = kPi) {
  w.validate();
  const Mat9 u0 = waveform_segment_propagator(w.omega, w.V, w.V, w.duration,
                                              w.n, 0.0);
  Eigen::VectorXd g(w.n);
  detail::objective_and_gradient(w.xi, u0, theta, &g, nullptr);
  return g;
}

inline double max_instantaneous_detuning(const PhaseWaveform& w) {
  if (w.n < 2) return 0.0;
  const double dt = w.duration / w.n;
  double dmax = 0.0;
  for (int k = 0; k + 1 < w.n; ++k)
    dmax = std::max(dmax, std::abs(wrap_angle(w.xi(k + 1) - w.xi(k))));
  return dmax / dt;
}

struct OptimizeResult {
  PhaseWaveform waveform;
  double objective = std::numeric_limits<double>::infinity();
  bool reached_target = false;
  int best_init = -1;  // 0 = flat start, i >= 1 = random restart i
  std::vector<std::array<double, 3>> log;  // (iter, objective, |grad|_inf)
};

namespace detail {

inline Eigen::VectorXd random_phases(std::uint64_t seed, int n, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = dist(rng);
  return x;
}

struct RestartOutcome {
  double j = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
  bool reached_target = false;
  std::vector<std::array<double, 3>> log;
};

// Multi-start minimization, deterministic under any thread count: restarts
// are evaluated in index waves and the scan stops at the first index that
// reaches the target, reducing over the prefix only.
template <typename MakeInit, typename RunOne>
OptimizeResult multi_start(int n_inits, int threads, bool has_target,
                           MakeInit&& make_init, RunOne&& run_one) {
  OptimizeResult best;
  int evaluated = 0;
  while (evaluated < n_inits) {
    const int wave =
        std::min(n_inits - evaluated, std::max(1, threads));
    auto outcomes = parallel_map<RestartOutcome>(
        wave, threads, [&](int i) { return run_one(make_init(evaluated + i)); });
    bool stop = false;
    for (int i = 0; i < wave; ++i) {
      const int idx = evaluated + i;
      if (outcomes[i].j < best.objective) {
        best.objective = outcomes[i].j;
        best.waveform.xi = outcomes[i].x;
        best.best_init = idx;
        best.log = std::move(outcomes[i].log);
        best.reached_target = outcomes[i].reached_target;
      }
      if (has_target && outcomes[i].reached_target) {
        stop = true;
        break;
      }
    }
    if (stop) break;
    evaluated += wave;
  }
  return best;
}

}  // namespace detail

// Nominal-infidelity GRAPE at a fixed duration: flat init plus seeded random
// restarts, quasi-Newton descent, early exit at the target infidelity.
inline OptimizeResult optimize_waveform(double omega, double V,
                                        double duration,
                                        const OptimizerConfig& cfg,
                                        double theta = kPi) {
  require(duration > 0.0, "optimize_waveform: duration must be positive");
  require(omega > 0.0 && V > 0.0, "optimize_waveform: positive omega, V");
  // Keep the per-segment drive angle at ~1 rad so long pulses stay resolved.
  const int n = std::max(cfg.n_segments,
                         static_cast<int>(std::ceil(omega * duration)));
  const Mat9 u0 =
      waveform_segment_propagator(omega, V, V, duration, n, 0.0);

  LbfgsOptions opts;
  opts.max_iter = std::max(cfg.max_iter, 2 * n);
  opts.ftol = cfg.ftol;
  opts.gtol = cfg.gtol;
  opts.target = cfg.target;

  auto run_one = [&](const Eigen::VectorXd& x0) {
    detail::RestartOutcome out;
    LbfgsOptions local = opts;
    local.log = [&out](int it, double f, double gn) {
      out.log.push_back({static_cast<double>(it), f, gn});
    };
    ObjectiveFn fn = [&u0, theta](const Eigen::VectorXd& x,
                                  Eigen::VectorXd& g) {
      return detail::objective_and_gradient(x, u0, theta, &g, nullptr);
    };
    const LbfgsResult r = lbfgs_minimize(fn, x0, local);
    out.j = r.f;
    out.x = r.x;
    out.reached_target = r.reached_target;
    return out;
  };
  auto make_init = [&](int i) {
    return i == 0 ? Eigen::VectorXd::Zero(n).eval()
                  : detail::random_phases(cfg.seed + i, n, kPi);
  };
  OptimizeResult best = detail::multi_start(cfg.restarts + 1, cfg.threads,
                                            true, make_init, run_one);
  best.waveform.n = n;
  best.waveform.duration = duration;
  best.waveform.omega = omega;
  best.waveform.V = V;
  return best;
}

struct TimeOptimalResult {
  double duration = 0.0;
  PhaseWaveform waveform;
  double objective = 0.0;
  int best_init = -1;  // winning init at the minimal duration (0 = flat)
  std::vector<std::array<double, 2>> probes;  // (duration, best objective)
  std::vector<std::array<double, 3>> log;     // winning restart's iterations
};

// Bisect the shortest duration whose best infidelity reaches the target.
// Bracket: [pi/V, 4(2pi/Omega + 2pi/V)]; feasibility of the upper end is a
// precondition of the search.
inline TimeOptimalResult time_optimal_search(double omega, double V,
                                             const OptimizerConfig& cfg,
                                             double rel_resolution = 1e-3,
                                             double theta = kPi) {
  require(rel_resolution > 0.0, "time_optimal_search: bad resolution");
  double lo = kPi / V;
  double hi = 4.0 * (2.0 * kPi / omega + 2.0 * kPi / V);
  TimeOptimalResult res;
  OptimizeResult at_hi = optimize_waveform(omega, V, hi, cfg, theta);
  res.probes.push_back({hi, at_hi.objective});
  if (!at_hi.reached_target)
    throw NonConvergenceError(
        "time_optimal_search: upper bracket duration is infeasible");
  OptimizeResult at_lo = optimize_waveform(omega, V, lo, cfg, theta);
  res.probes.push_back({lo, at_lo.objective});
  if (at_lo.reached_target) {
    res.duration = lo;
    res.waveform = at_lo.waveform;
    res.objective = at_lo.objective;
    res.best_init = at_lo.best_init;
    res.log = std::move(at_lo.log);
    return res;
  }
  OptimizeResult best = std::move(at_hi);
  while ((hi - lo) / hi > rel_resolution) {
    const double mid = 0.5 * (lo + hi);
    OptimizeResult at_mid = optimize_waveform(omega, V, mid, cfg, theta);
    res.probes.push_back({mid, at_mid.objective});
    if (at_mid.reached_target) {
      hi = mid;
      best = std::move(at_mid);
    } else {
      lo = mid;
    }
  }
  res.duration = hi;
  res.waveform = best.waveform;
  res.objective = best.objective;
  res.best_init = best.best_init;
  res.log = std::move(best.log);
  return res;
}

// Cosine subspace for bandwidth-limited robust pulses: column m is
// cos(pi m (k + 1/2)/N), m = 0..modes (the constant mode is the gauge).
inline Eigen::MatrixXd cosine_basis(int n, int modes) {
  Eigen::MatrixXd b(n, modes + 1);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m <= modes; ++m)
      b(k, m) = std::cos(kPi * m * (k + 0.5) / n);
  return b;
}

struct RobustResult {
  PhaseWaveform waveform;
  double objective = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  int best_init = -1;
  std::vector<std::array<double, 3>> log;
};

// Maximize the weighted fidelity sum over the nominal and +/-spread
// operating points, in the cosine subspace. Among restarts within 5% of the
// best objective the smoothest waveform (smallest |Delta|_inst) wins: the
// weighted sum is nearly degenerate there and narrow detuning excursions
// are what the drive hardware can realize.
inline RobustResult robust_optimize(double omega, double V, double duration,
                                    const RobustSpec& spec,
                                    const OptimizerConfig& cfg,
                                    int modes = 8, double theta = kPi) {
  spec.validate();
  require(duration > 0.0, "robust_optimize: duration must be positive");
  const int n = cfg.n_segments;
  const bool rabi = spec.parameter == RobustSpec::Parameter::kRabi;
  std::array<Mat9, 3> u0s;
  for (int i = 0; i < 3; ++i) {
    const double shift =
        (i == 0) ? 0.0 : (i == 1 ? -spec.spread : spec.spread);
    const double om = rabi ? omega * (1.0 + shift) : omega;
    const double v = rabi ? V : V * (1.0 + shift);
    u0s[i] = waveform_segment_propagator(om, v, V, duration, n, 0.0);
  }
  const double wsum = spec.weights[0] + spec.weights[1] + spec.weights[2];
  const std::array<double, 3> w = {spec.weights[0] / wsum,
                                   spec.weights[1] / wsum,
                                   spec.weights[2] / wsum};
  const Eigen::MatrixXd basis = cosine_basis(n, modes);

  LbfgsOptions opts;
  opts.max_iter = cfg.max_iter;
  opts.ftol = cfg.ftol;
  opts.gtol = cfg.gtol;

  struct Candidate {
    double j = std::numeric_limits<double>::infinity();
    Eigen::VectorXd xi;
    std::vector<std::array<double, 3>> log;
  };
  auto run_one = [&](int idx) {
    Candidate out;
    const Eigen::VectorXd c0 =
        idx == 0 ? Eigen::VectorXd::Zero(modes + 1).eval()
                 : detail::random_phases(cfg.seed + idx, modes + 1, 1.0);
    LbfgsOptions local = opts;
    local.log = [&out](int it, double f, double gn) {
      out.log.push_back({static_cast<double>(it), f, gn});
    };
    Eigen::VectorXd xi(n), gxi(n);
    ObjectiveFn fn = [&](const Eigen::VectorXd& c, Eigen::VectorXd& g) {
      xi = basis * c;
      double j = 0.0;
      g.setZero(modes + 1);
      for (int i = 0; i < 3; ++i) {
        j += w[i] *
             detail::objective_and_gradient(xi, u0s[i], theta, &gxi, nullptr);
        g += w[i] * (basis.transpose() * gxi);
      }
      return j;
    };
    const LbfgsResult r = lbfgs_minimize(fn, c0, local);
    out.j = r.f;
    out.xi = basis * r.x;
    return out;
  };

  const int n_inits = cfg.restarts + 1;
  auto outcomes = parallel_map<Candidate>(n_inits, cfg.threads, run_one);
  double jbest = std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) jbest = std::min(jbest, o.j);
  RobustResult res;
  res.waveform.n = n;
  res.waveform.duration = duration;
  res.waveform.omega = omega;
  res.waveform.V = V;
  for (int i = 0; i < n_inits; ++i) {
    if (outcomes[i].j > 1.05 * jbest) continue;
    PhaseWaveform cand = res.waveform;
    cand.xi = outcomes[i].xi;
    const double dm = max_instantaneous_detuning(cand);
    if (res.best_init < 0 || dm < res.dmax) {
      res.best_init = i;
      res.dmax = dm;
      res.objective = outcomes[i].j;
      res.waveform.xi = outcomes[i].xi;
      res.log = outcomes[i].log;
    }
  }
  return res;
}

// Gaussian-weighted average infidelity over fractional Rabi noise.
inline double weighted_average_error(const PhaseWaveform& w,
                                     const NoiseModel& noise,
                                     double gamma = 0.0, int nodes = 15,
                                     double theta = kPi) {
  require(noise.sigma > 0.0, "weighted_average_error: sigma must be positive");
  return gaussian_average(
      [&](double d) {
        return waveform_infidelity(w, w.omega * (1.0 + d), w.V, gamma, theta);
      },
      noise.sigma, nodes);
}

enum class ScanParameter { kRabi, kInteraction };

// (fractional offset, 1 - F*) curve over a grid within +/-10%.
inline std::vector<std::pair<double, double>> fidelity_scan(
    const PhaseWaveform& w, ScanParameter param,
    const std::vector<double>& grid, double gamma = 0.0, int threads = 1,
    double theta = kPi) {
  for (double f : grid)
    require(std::abs(f) <= 0.10 + 1e-12,
            "fidelity_scan: grid must stay within +/-10%");
  const int npts = static_cast<int>(grid.size());
  auto vals = parallel_map<double>(npts, threads, [&](int i) {
    const double f = grid[i];
    const double om =
        param == ScanParameter::kRabi ? w.omega * (1.0 + f) : w.omega;
    const double v =
        param == ScanParameter::kRabi ? w.V : w.V * (1.0 + f);
    return waveform_infidelity(w, om, v, gamma, theta);
  });
  std::vector<std::pair<double, double>> out(npts);
  for (int i = 0; i < npts; ++i) out[i] = {grid[i], vals[i]};
  return out;
}

}  // namespace rydgate

#endif  // RYDGATE_GRAPE_HPP_
