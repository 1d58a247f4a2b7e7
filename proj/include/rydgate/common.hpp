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
#ifndef RYDGATE_COMMON_HPP_
#define RYDGATE_COMMON_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rydgate {

using cxd = std::complex<double>;
using Mat9 = Eigen::Matrix<cxd, 9, 9>;
using Mat4 = Eigen::Matrix<cxd, 4, 4>;
using Vec9 = Eigen::Matrix<cxd, 9, 1>;
using Vec4 = Eigen::Matrix<cxd, 4, 1>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cxd kI{0.0, 1.0};

// Single-atom levels are ordered {|0>, |1>, |r>}; the two-atom index is
// 3*(control level) + (target level).
inline constexpr int kDim = 9;
inline constexpr std::array<int, 4> kComp = {0, 1, 3, 4};  // |00>,|01>,|10>,|11>
inline constexpr std::array<int, 3> kTargetR = {2, 5, 8};  // target in |r>
inline constexpr std::array<int, 3> kControlR = {6, 7, 8};  // control in |r>

// Decay-channel multiplicity of each basis state: number of atoms in |r>.
inline constexpr std::array<double, 9> kRydbergWeight = {0, 0, 1, 0, 0, 1,
                                                         1, 1, 2};

// Violated input contract; maps to CLI exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

// Optimizer failed to reach its target; maps to CLI exit code 3.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x <= 0.0) x += 2.0 * kPi;
  return x - kPi;
}

}  // namespace rydgate

#endif  // RYDGATE_COMMON_HPP_
