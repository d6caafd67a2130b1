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

#ifndef FLEXMPC_DIFF_STEP_JACOBIAN_HPP_
#define FLEXMPC_DIFF_STEP_JACOBIAN_HPP_

#include <Eigen/Dense>

#include "flexmpc/common.hpp"
#include "flexmpc/ode/integrators.hpp"

namespace flexmpc::diff {

/// Sensitivities of the converged implicit-RK step map x+ = Phi(x, u) by the
/// implicit function theorem on the stage equations, evaluated at the
/// converged stage states:
///
///   (I - dt (a x) blkdiag(A_i)) dK = [A_i] dx + [B_i] du,
///   dPhi = I + dt sum_i b_i dK_i   (and the same without I for du).
///
/// `stage_dfdx[i]`, `stage_dfdu[i]` are df/dx and df/du at stage state v_i.
inline void StepJacobianFromStages(const ode::ButcherTableau& tab, double dt,
                                   const std::vector<MatX>& stage_dfdx,
                                   const std::vector<MatX>& stage_dfdu, MatX* dnext_dx,
                                   MatX* dnext_du) {
  const int s = tab.stages;
  const int n = static_cast<int>(stage_dfdx[0].rows());
  const int nu = static_cast<int>(stage_dfdu[0].cols());

  MatX lhs = MatX::Identity(n * s, n * s);
  MatX rhs(n * s, n + nu);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      lhs.block(i * n, j * n, n, n) -= dt * tab.a(i, j) * stage_dfdx[i];
    }
    rhs.block(i * n, 0, n, n) = stage_dfdx[i];
    rhs.block(i * n, n, n, nu) = stage_dfdu[i];
  }
  const MatX dk = lhs.partialPivLu().solve(rhs);

  *dnext_dx = MatX::Identity(n, n);
  *dnext_du = MatX::Zero(n, nu);
  for (int i = 0; i < s; ++i) {
    *dnext_dx += dt * tab.b[i] * dk.block(i * n, 0, n, n);
    *dnext_du += dt * tab.b[i] * dk.block(i * n, n, n, nu);
  }
}

}  // namespace flexmpc::diff

#endif  // FLEXMPC_DIFF_STEP_JACOBIAN_HPP_
