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
#ifndef RYDGATE_LINALG_HPP_
#define RYDGATE_LINALG_HPP_

#include <unsupported/Eigen/MatrixFunctions>

#include "rydgate/common.hpp"

namespace rydgate {

// exp(A) by scaling-and-squaring with Pade approximants.
inline Mat9 matrix_exponential(const Mat9& a) {
  require(a.allFinite(), "matrix_exponential: non-finite entries");
  return a.exp();
}

inline Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a) {
  require(a.allFinite(), "matrix_exponential: non-finite entries");
  return a.exp();
}

}  // namespace rydgate

#endif  // RYDGATE_LINALG_HPP_
