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

#ifndef FLEXMPC_MATH_JACOBIAN_SWEEP_HPP_
#define FLEXMPC_MATH_JACOBIAN_SWEEP_HPP_

#include "flexmpc/common.hpp"
#include "flexmpc/math/dual.hpp"

namespace flexmpc {

/// Default derivative-block width. Jacobians of any width are assembled by
/// sweeping the input in chunks of this many seed directions.
inline constexpr int kAdChunk = 8;

/// Dense Jacobian of a scalar-generic map f: R^n -> R^m by chunked
/// forward-mode sweeps. `f` must be callable as
/// f(const VecXT<T>&) -> VecXT<T> for T in {double, Dual<kAdChunk>}.
/// Returns the value of f(x0) and fills `jac` (m x n).
template <typename F>
VecX JacobianSweep(const F& f, const VecX& x0, MatX* jac) {
  using D = Dual<kAdChunk>;
  const int n = static_cast<int>(x0.size());

  VecX value;
  for (int chunk = 0; chunk < n; chunk += kAdChunk) {
    const int width = std::min(kAdChunk, n - chunk);
    VecXT<D> in(n);
    for (int i = 0; i < n; ++i) in[i] = D(x0[i]);
    for (int j = 0; j < width; ++j) in[chunk + j].dot[j] = 1.0;

    const VecXT<D> out = f(in);
    const int m = static_cast<int>(out.size());
    if (chunk == 0) {
      value.resize(m);
      jac->resize(m, n);
      for (int r = 0; r < m; ++r) value[r] = out[r].val;
    }
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < width; ++j) (*jac)(r, chunk + j) = out[r].dot[j];
    }
  }
  if (n == 0) {
    value = f(VecX(x0));
    jac->resize(value.size(), 0);
  }
  return value;
}

}  // namespace flexmpc

#endif  // FLEXMPC_MATH_JACOBIAN_SWEEP_HPP_
