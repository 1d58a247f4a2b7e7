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
#ifndef RYDGATE_QUAD_HPP_
#define RYDGATE_QUAD_HPP_

#include <functional>
#include <span>
#include <utility>

#include "rydgate/common.hpp"

namespace rydgate {

struct QuadPoint {
  double node;
  double weight;
};

// Gauss-Hermite nodes and weights, normalized so the weights sum to 1
// (weight function e^{-x^2}/sqrt(pi)). E[f(g)] for g ~ N(0, s) is then
// sum_i w_i f(sqrt(2) s x_i).
inline std::span<const QuadPoint> gauss_hermite(int n) {
  static constexpr QuadPoint k15[] = {
      {-4.49999070730939188e+00, 8.58964989963329323e-10},
      {-3.66995037340445274e+00, 5.97541959792058234e-07},
      {-2.96716692790560321e+00, 5.64214640518901497e-05},
      {-2.32573248617385797e+00, 1.56735750354995576e-03},
      {-1.71999257518648885e+00, 1.73657744921376159e-02},
      {-1.13611558521092060e+00, 8.94177953998443881e-02},
      {-5.65069583255575769e-01, 2.32462293609732307e-01},
      {+0.00000000000000000e+00, 3.18259518259518204e-01},
      {+5.65069583255575769e-01, 2.32462293609732307e-01},
      {+1.13611558521092060e+00, 8.94177953998443881e-02},
      {+1.71999257518648885e+00, 1.73657744921376159e-02},
      {+2.32573248617385797e+00, 1.56735750354995576e-03},
      {+2.96716692790560321e+00, 5.64214640518901497e-05},
      {+3.66995037340445274e+00, 5.97541959792058234e-07},
      {+4.49999070730939188e+00, 8.58964989963329323e-10},
  };
  static constexpr QuadPoint k31[] = {
      {-6.99568012371854042e+00, 2.60597385489299026e-22},
      {-6.27507870494286024e+00, 2.88335236785782164e-18},
      {-5.67396144461858842e+00, 3.32846832414840151e-15},
      {-5.13359557711238068e+00, 1.04960336231136022e-12},
      {-4.63155950631285940e+00, 1.32725148358971138e-10},
      {-4.15627175581814523e+00, 8.24393161911974445e-09},
      {-3.70074340323146966e+00, 2.84561008816281951e-07},
      {-3.26032073231354058e+00, 5.92320231768634077e-06},
      {-2.83168045339020535e+00, 7.87162406960224766e-05},
      {-2.41231770548042013e+00, 6.96031271379291818e-04},
      {-2.00025854893563881e+00, 4.22171776727071468e-03},
      {-1.59388586047213976e+00, 1.79678758434416407e-02},
      {-1.19182699835004646e+00, 5.45672588944750153e-02},
      {-7.92876976915308895e-01, 1.19683109695854689e-01},
      {-3.95942736471423140e-01, 1.91132004774643122e-01},
      {+0.00000000000000000e+00, 2.23294138742406750e-01},
      {+3.95942736471423140e-01, 1.91132004774643122e-01},
      {+7.92876976915308895e-01, 1.19683109695854689e-01},
      {+1.19182699835004646e+00, 5.45672588944750153e-02},
      {+1.59388586047213976e+00, 1.79678758434416407e-02},
      {+2.00025854893563881e+00, 4.22171776727071468e-03},
      {+2.41231770548042013e+00, 6.96031271379291818e-04},
      {+2.83168045339020535e+00, 7.87162406960224766e-05},
      {+3.26032073231354058e+00, 5.92320231768634077e-06},
      {+3.70074340323146966e+00, 2.84561008816281951e-07},
      {+4.15627175581814523e+00, 8.24393161911974445e-09},
      {+4.63155950631285940e+00, 1.32725148358971138e-10},
      {+5.13359557711238068e+00, 1.04960336231136022e-12},
      {+5.67396144461858842e+00, 3.32846832414840151e-15},
      {+6.27507870494286024e+00, 2.88335236785782164e-18},
      {+6.99568012371854042e+00, 2.60597385489299026e-22},
  };
  if (n == 15) return {k15, 15};
  if (n == 31) return {k31, 31};
  throw PreconditionError("gauss_hermite: only 15- and 31-node rules ship");
}

// E[f(delta)] for delta ~ N(0, sigma).
inline double gaussian_average(const std::function<double(double)>& f,
                               double sigma, int nodes = 15) {
  require(sigma > 0.0, "gaussian_average: sigma must be positive");
  double acc = 0.0;
  for (const auto& [x, w] : gauss_hermite(nodes))
    acc += w * f(std::sqrt(2.0) * sigma * x);
  return acc;
}

}  // namespace rydgate

#endif  // RYDGATE_QUAD_HPP_
