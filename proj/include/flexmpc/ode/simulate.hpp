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

#ifndef FLEXMPC_ODE_SIMULATE_HPP_
#define FLEXMPC_ODE_SIMULATE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "flexmpc/diff/jacobians.hpp"
#include "flexmpc/model/flex_model.hpp"
#include "flexmpc/ode/integrators.hpp"

namespace flexmpc::ode {

struct Trajectory {
  std::vector<double> times;
  std::vector<VecX> states;
  std::vector<VecX> controls;  // ZOH value over [t_k, t_k + dt)

  int size() const { return static_cast<int>(times.size()); }
};

/// High-accuracy reference simulation: fixed-step 3-stage Radau IIA at
/// dt_report / substeps with Newton tolerance 1e-12, sampled on the
/// reporting grid. The control signal is sampled at each fine-step start.
inline Trajectory SimulateGroundTruth(const model::FlexModel& m, const VecX& x0,
                                      const std::function<VecX(double)>& control,
                                      double t_end, double dt_report = 0.01,
                                      int substeps = 20) {
  require(t_end > 0.0 && dt_report > 0.0 && substeps >= 1,
          "simulate_ground_truth: bad grid");
  NewtonSettings newton;
  newton.tol = 1e-12;
  newton.max_iters = 30;
  newton.reuse_jacobian = true;
  IrkStepper stepper(ButcherTableau::RadauIIA3(), newton);

  const OdeFn f = [&m](const VecX& x, const VecX& u) {
    return model::VectorField<double>(m, x, u);
  };
  const OdeJacFn dfdx = [&m](const VecX& x, const VecX& u) {
    return diff::JacVectorFieldState(m, x, u);
  };

  const double dt_fine = dt_report / substeps;
  const int n_report = static_cast<int>(std::round(t_end / dt_report));

  Trajectory traj;
  traj.times.reserve(n_report + 1);
  traj.states.reserve(n_report + 1);
  traj.controls.reserve(n_report + 1);

  VecX x = x0;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.controls.push_back(control(0.0));
  for (int k = 0; k < n_report; ++k) {
    for (int sub = 0; sub < substeps; ++sub) {
      const double t = k * dt_report + sub * dt_fine;
      try {
        x = stepper.Step(f, dfdx, x, control(t), dt_fine);
      } catch (const NumericError& err) {
        throw NumericError("simulate_ground_truth failed at t = " + std::to_string(t) +
                               " s: " + err.what(),
                           err.residual());
      }
    }
    const double t_next = (k + 1) * dt_report;
    traj.times.push_back(t_next);
    traj.states.push_back(x);
    traj.controls.push_back(control(t_next));
  }
  return traj;
}

/// Square-wave excitation protocol used for the discretization study:
/// 5 Nm on joint 3 for 0.03 s, then 10 Nm on joint 2 for 0.04 s starting
/// 0.42 s after the first pulse ends, both on top of a hold torque.
inline std::function<VecX(double)> SquareWaveProtocol(const Vec3& hold) {
  return [hold](double t) {
    Vec3 u = hold;
    if (t >= 0.0 && t < 0.03) u[2] += 5.0;
    if (t >= 0.45 && t < 0.49) u[1] += 10.0;
    return VecX(u);
  };
}

}  // namespace flexmpc::ode

#endif  // FLEXMPC_ODE_SIMULATE_HPP_
