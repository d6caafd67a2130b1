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

#ifndef FLEXMPC_ODE_INTEGRATORS_HPP_
#define FLEXMPC_ODE_INTEGRATORS_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "flexmpc/common.hpp"
#include "flexmpc/ode/tableau.hpp"

namespace flexmpc::ode {

using OdeFn = std::function<VecX(const VecX&, const VecX&)>;
/// State Jacobian df/dx of the vector field.
using OdeJacFn = std::function<MatX(const VecX&, const VecX&)>;

/// Classical explicit RK4 step. Throws NumericError if the result is not
/// finite (the expected outcome on stiff systems at coarse steps).
template <typename F>
VecX Erk4Step(const F& f, const VecX& x, const VecX& u, double dt) {
  require(dt > 0.0, "erk4_step: dt must be > 0");
  const VecX k1 = f(x, u);
  const VecX k2 = f(x + 0.5 * dt * k1, u);
  const VecX k3 = f(x + 0.5 * dt * k2, u);
  const VecX k4 = f(x + dt * k3, u);
  VecX next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw NumericError("erk4_step: non-finite state (integrator diverged)");
  }
  return next;
}

struct NewtonSettings {
  /// Stage-equation residual tolerance, scaled by max(1, |K|_inf).
  double tol = 1e-10;
  int max_iters = 25;
  /// Keep the stage-matrix factorization across steps until Newton slows
  /// down; trades Jacobian refreshes for extra iterations.
  bool reuse_jacobian = false;

  void Validate() const {
    require(tol > 0.0, "NewtonSettings: tol must be > 0");
    require(max_iters >= 1, "NewtonSettings: max_iters must be >= 1");
  }
};

struct IrkStepInfo {
  int newton_iters = 0;
  double residual = 0.0;
  /// Stage states v_i = x + dt sum_j a_ij k_j at the converged solution.
  MatX stage_states;
  /// Stage derivatives k_i.
  MatX stage_derivs;
};

/// Implicit Runge-Kutta stepper: solves the stage equations
///   k_i = f(x + dt sum_j a_ij k_j, u)
/// by (modified) Newton iteration with the state Jacobian evaluated at the
/// step base point. An instance owns its workspace: reuse one per thread.
class IrkStepper {
 public:
  IrkStepper(ButcherTableau tableau, NewtonSettings settings)
      : tableau_(std::move(tableau)), settings_(settings) {
    settings_.Validate();
  }

  const ButcherTableau& tableau() const { return tableau_; }

  /// Invalidate warm-start data (call when jumping to an unrelated state).
  void Reset() {
    stage_guess_.resize(0, 0);
    have_lu_ = false;
  }

  VecX Step(const OdeFn& f, const OdeJacFn& dfdx, const VecX& x, const VecX& u, double dt,
            IrkStepInfo* info = nullptr) {
    require(dt > 0.0, "irk_step: dt must be > 0");
    const int n = static_cast<int>(x.size());
    const int s = tableau_.stages;

    MatX k(n, s);
    if (stage_guess_.rows() == n && stage_guess_.cols() == s) {
      k = stage_guess_;
    } else {
      const VecX f0 = f(x, u);
      for (int i = 0; i < s; ++i) k.col(i) = f0;
    }

    bool fresh = !settings_.reuse_jacobian || !have_lu_ || lu_dim_ != n * s;
    if (fresh) FactorStageMatrix(dfdx, x, u, dt, n, s);

    // A stale factorization earns one refresh (and a second round of
    // iterations) before the step fails.
    const int iter_budget = fresh ? settings_.max_iters : 2 * settings_.max_iters;
    double residual = std::numeric_limits<double>::infinity();
    double prev_residual = residual;
    bool converged = false;
    int iters = 0;
    VecX g(n * s);
    MatX v(n, s);
    while (iters < iter_budget) {
      ++iters;
      for (int i = 0; i < s; ++i) {
        v.col(i) = x;
        for (int j = 0; j < s; ++j) v.col(i) += dt * tableau_.a(i, j) * k.col(j);
      }
      for (int i = 0; i < s; ++i) g.segment(i * n, n) = k.col(i) - f(v.col(i), u);
      residual = g.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(residual)) break;
      const double scale = std::max(1.0, k.lpNorm<Eigen::Infinity>());
      if (residual <= settings_.tol * scale) {
        converged = true;
        break;
      }
      const bool stagnant = residual >= 0.99 * prev_residual;
      if (stagnant && !fresh) {
        FactorStageMatrix(dfdx, x, u, dt, n, s);
        fresh = true;
      } else if (stagnant && iters >= 3 && residual <= 1e2 * settings_.tol * scale) {
        // Round-off floor of the residual evaluation; tighter is unattainable.
        converged = true;
        break;
      }
      if (!fresh && iters >= settings_.max_iters) {
        FactorStageMatrix(dfdx, x, u, dt, n, s);
        fresh = true;
      }
      prev_residual = residual;
      const VecX dk = lu_.solve(g);
      for (int i = 0; i < s; ++i) k.col(i) -= dk.segment(i * n, n);
    }
    if (!converged) {
      Reset();
      throw NumericError("irk_step: Newton did not converge", residual);
    }

    stage_guess_ = k;
    VecX next = x;
    for (int i = 0; i < s; ++i) next += dt * tableau_.b[i] * k.col(i);
    if (info != nullptr) {
      info->newton_iters = iters;
      info->residual = residual;
      info->stage_states = v;
      info->stage_derivs = k;
    }
    return next;
  }

 private:
  void FactorStageMatrix(const OdeJacFn& dfdx, const VecX& x, const VecX& u, double dt,
                         int n, int s) {
    const MatX jac = dfdx(x, u);
    MatX m = MatX::Identity(n * s, n * s);
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        m.block(i * n, j * n, n, n) -= dt * tableau_.a(i, j) * jac;
      }
    }
    lu_.compute(m);
    lu_dim_ = n * s;
    have_lu_ = true;
  }

  ButcherTableau tableau_;
  NewtonSettings settings_;
  MatX stage_guess_;
  Eigen::PartialPivLU<MatX> lu_;
  int lu_dim_ = 0;
  bool have_lu_ = false;
};

/// One-shot implicit step (fresh workspace, no warm start).
inline VecX IrkStep(const ButcherTableau& tableau, const NewtonSettings& newton, const OdeFn& f,
                    const OdeJacFn& dfdx, const VecX& x, const VecX& u, double dt,
                    IrkStepInfo* info = nullptr) {
  IrkStepper stepper(tableau, newton);
  return stepper.Step(f, dfdx, x, u, dt, info);
}

}  // namespace flexmpc::ode

#endif  // FLEXMPC_ODE_INTEGRATORS_HPP_
