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

#ifndef FLEXMPC_DIFF_JACOBIANS_HPP_
#define FLEXMPC_DIFF_JACOBIANS_HPP_

#include "flexmpc/common.hpp"
#include "flexmpc/math/jacobian_sweep.hpp"
#include "flexmpc/model/flex_model.hpp"

namespace flexmpc::diff {

/// Exact Jacobians of the state-space dynamics, df/dx (nx x nx) and
/// df/du (nx x 3), by forward-mode sweeps through the articulated-body
/// algorithm.
inline void JacVectorField(const model::FlexModel& m, const VecX& x, const VecX& u,
                           MatX* dfdx, MatX* dfdu, VecX* f_value = nullptr) {
  const int nx = m.nx();
  require(static_cast<int>(x.size()) == nx, "jac_vector_field: dim(x) mismatch");
  require(u.size() == 3, "jac_vector_field: dim(u) mismatch");
  VecX packed(nx + 3);
  packed << x, u;
  const auto fn = [&m, nx](const auto& in) {
    using T = typename std::decay_t<decltype(in)>::Scalar;
    return model::VectorField<T>(m, VecXT<T>(in.head(nx)), VecXT<T>(in.tail(3)));
  };
  MatX full;
  const VecX value = JacobianSweep(fn, packed, &full);
  *dfdx = full.leftCols(nx);
  *dfdu = full.rightCols(3);
  if (f_value != nullptr) *f_value = value;
}

/// df/dx only, shaped for the implicit integrator's Newton matrix.
inline MatX JacVectorFieldState(const model::FlexModel& m, const VecX& x, const VecX& u) {
  const int nx = m.nx();
  const auto fn = [&m, &u](const auto& in) {
    using T = typename std::decay_t<decltype(in)>::Scalar;
    return model::VectorField<T>(m, in, u.cast<T>().eval());
  };
  MatX jac;
  JacobianSweep(fn, x, &jac);
  return jac;
}

/// Positional end-effector Jacobian dp_ee/dq (3 x nq), state layout.
inline MatX JacForwardKinematics(const model::FlexModel& m, const VecX& q,
                                 Vec3* ee = nullptr) {
  require(static_cast<int>(q.size()) == m.nq(), "jac_forward_kinematics: dim(q) mismatch");
  const auto fn = [&m](const auto& in) {
    using T = typename std::decay_t<decltype(in)>::Scalar;
    const Vec3T<T> p = model::EndEffector<T>(m, in);
    VecXT<T> out(3);
    out << p.x(), p.y(), p.z();
    return out;
  };
  MatX jac;
  const VecX value = JacobianSweep(fn, q, &jac);
  if (ee != nullptr) *ee = value;
  return jac;
}

/// Output-map Jacobian dy/dx (9 x nx) for the EKF measurement update.
inline MatX JacOutputMap(const model::FlexModel& m, const VecX& x, VecX* y = nullptr) {
  const auto fn = [&m](const auto& in) {
    using T = typename std::decay_t<decltype(in)>::Scalar;
    return model::OutputMap<T>(m, in);
  };
  MatX jac;
  const VecX value = JacobianSweep(fn, x, &jac);
  if (y != nullptr) *y = value;
  return jac;
}

}  // namespace flexmpc::diff

#endif  // FLEXMPC_DIFF_JACOBIANS_HPP_
