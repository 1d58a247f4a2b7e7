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
// Limited-memory BFGS with a strong-Wolfe line search (two-loop recursion,
// bracket/zoom with cubic interpolation). Unconstrained, deterministic.

#ifndef RYDGATE_LBFGS_HPP_
#define RYDGATE_LBFGS_HPP_

#include <deque>
#include <functional>
#include <limits>
#include <string>

#include "rydgate/common.hpp"

namespace rydgate {

using ObjectiveFn =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsOptions {
  int max_iter = 500;
  double ftol = 1e-16;  // relative decrease below which we stop
  double gtol = 1e-13;  // max-norm gradient threshold
  int memory = 10;
  // Stop as soon as f <= target (feasibility searches); -inf disables.
  double target = -std::numeric_limits<double>::infinity();
  std::function<void(int, double, double)> log;  // iter, f, |g|_inf
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool reached_target = false;
  std::string stop_reason;
};

namespace detail {

struct Wolfe {
  double alpha = 0.0, f = 0.0, dphi = 0.0;
  bool ok = false;
};

// Strong-Wolfe line search on phi(a) = f(x + a d). c1/c2 per standard
// quasi-Newton practice. phi0/dphi0 at a=0 must satisfy dphi0 < 0.
inline Wolfe line_search(const ObjectiveFn& fn, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& d, double phi0, double dphi0,
                         double alpha_init, Eigen::VectorXd* xtrial,
                         Eigen::VectorXd* gtrial) {
  constexpr double c1 = 1e-4, c2 = 0.9;
  constexpr double alpha_max = 1e10;
  auto eval = [&](double a, double* f, double* dphi) {
    *xtrial = x + a * d;
    *f = fn(*xtrial, *gtrial);
    *dphi = gtrial->dot(d);
  };

  auto zoom = [&](double alo, double flo, double dlo, double ahi, double fhi,
                  double /*dhi*/) -> Wolfe {
    for (int it = 0; it < 50; ++it) {
      // quadratic interpolation from (alo, flo, dlo) and (ahi, fhi),
      // safeguarded against the bracket edges
      double a;
      const double denom = 2.0 * (fhi - flo - dlo * (ahi - alo));
      if (std::abs(denom) > 1e-300) {
        a = alo - dlo * (ahi - alo) * (ahi - alo) / denom;
      } else {
        a = 0.5 * (alo + ahi);
      }
      const double lo = std::min(alo, ahi), hi = std::max(alo, ahi);
      const double margin = 0.1 * (hi - lo);
      if (!(a > lo + margin && a < hi - margin)) a = 0.5 * (alo + ahi);
      double f, dphi;
      eval(a, &f, &dphi);
      if (f > phi0 + c1 * a * dphi0 || f >= flo) {
        ahi = a;
        fhi = f;
      } else {
        if (std::abs(dphi) <= -c2 * dphi0) return {a, f, dphi, true};
        if (dphi * (ahi - alo) >= 0.0) {
          ahi = alo;
          fhi = flo;
        }
        alo = a;
        flo = f;
        dlo = dphi;
      }
      if (std::abs(ahi - alo) < 1e-18 * std::max(1.0, std::abs(alo)))
        return {alo, flo, dlo, true};
    }
    return {alo, flo, dlo, true};  // best bracketed point
  };

  double aprev = 0.0, fprev = phi0, dprev = dphi0;
  double a = alpha_init;
  for (int it = 0; it < 30; ++it) {
    double f, dphi;
    eval(a, &f, &dphi);
    if (f > phi0 + c1 * a * dphi0 || (it > 0 && f >= fprev))
      return zoom(aprev, fprev, dprev, a, f, dphi);
    if (std::abs(dphi) <= -c2 * dphi0) return {a, f, dphi, true};
    if (dphi >= 0.0) return zoom(a, f, dphi, aprev, fprev, dprev);
    aprev = a;
    fprev = f;
    dprev = dphi;
    a = std::min(2.0 * a, alpha_max);
    if (a >= alpha_max) break;
  }
  return {};
}

}  // namespace detail

inline LbfgsResult lbfgs_minimize(const ObjectiveFn& fn,
                                  const Eigen::VectorXd& x0,
                                  const LbfgsOptions& opts = {}) {
  const auto n = x0.size();
  LbfgsResult res;
  res.x = x0;
  Eigen::VectorXd g(n), xtrial(n), gtrial(n);
  res.f = fn(res.x, g);
  if (opts.log) opts.log(0, res.f, g.lpNorm<Eigen::Infinity>());
  if (res.f <= opts.target) {
    res.reached_target = true;
    res.stop_reason = "target";
    return res;
  }

  std::deque<Eigen::VectorXd> svecs, yvecs;
  std::deque<double> rhos;
  Eigen::VectorXd q(n), d(n);
  double gamma = 1.0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.gtol) {
      res.stop_reason = "gtol";
      break;
    }
    // two-loop recursion
    q = g;
    std::vector<double> alpha(svecs.size());
    for (int i = static_cast<int>(svecs.size()) - 1; i >= 0; --i) {
      alpha[i] = rhos[i] * svecs[i].dot(q);
      q -= alpha[i] * yvecs[i];
    }
    q *= gamma;
    for (size_t i = 0; i < svecs.size(); ++i) {
      const double b = rhos[i] * yvecs[i].dot(q);
      q += (alpha[i] - b) * svecs[i];
    }
    d = -q;
    double dphi0 = g.dot(d);
    if (dphi0 >= 0.0) {  // not a descent direction: reset to steepest
      d = -g;
      dphi0 = -g.squaredNorm();
      svecs.clear();
      yvecs.clear();
      rhos.clear();
    }
    const double alpha_init =
        svecs.empty() ? std::min(1.0, 1.0 / std::max(gnorm, 1e-30)) : 1.0;
    const auto ls = detail::line_search(fn, res.x, d, res.f, dphi0, alpha_init,
                                        &xtrial, &gtrial);
    if (!ls.ok || ls.alpha <= 0.0) {
      res.stop_reason = "line_search";
      break;
    }
    const double fnew = ls.f;
    const Eigen::VectorXd s = ls.alpha * d;
    const Eigen::VectorXd y = gtrial - g;
    res.x = xtrial;
    g = gtrial;
    const double fold = res.f;
    res.f = fnew;
    res.iterations = iter;
    if (opts.log) opts.log(iter, res.f, g.lpNorm<Eigen::Infinity>());
    if (res.f <= opts.target) {
      res.reached_target = true;
      res.stop_reason = "target";
      break;
    }
    const double sy = s.dot(y);
    if (sy > 1e-30) {
      svecs.push_back(s);
      yvecs.push_back(y);
      rhos.push_back(1.0 / sy);
      if (static_cast<int>(svecs.size()) > opts.memory) {
        svecs.pop_front();
        yvecs.pop_front();
        rhos.pop_front();
      }
      gamma = sy / y.squaredNorm();
    }
    if (fold - res.f <=
        opts.ftol * std::max({std::abs(fold), std::abs(res.f), 1.0})) {
      res.stop_reason = "ftol";
      break;
    }
  }
  if (res.stop_reason.empty()) res.stop_reason = "max_iter";
  return res;
}

}  // namespace rydgate

#endif  // RYDGATE_LBFGS_HPP_
