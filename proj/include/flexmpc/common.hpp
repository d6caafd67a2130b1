// Copyright 2026 The flexmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLEXMPC_COMMON_HPP_
#define FLEXMPC_COMMON_HPP_

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace flexmpc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;
template <typename T>
using Vec6T = Eigen::Matrix<T, 6, 1>;
template <typename T>
using Mat6T = Eigen::Matrix<T, 6, 6>;
template <typename T>
using VecXT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatXT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// Violated precondition (dimension mismatch, non-physical parameter, ...).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Runtime numerical failure (singular inertia, Newton divergence, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  /// Last residual seen before the failure, when meaningful.
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ArgumentError(what);
}

}  // namespace flexmpc

#endif  // FLEXMPC_COMMON_HPP_
