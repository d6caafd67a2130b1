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

#ifndef FLEXMPC_MODEL_DISCRETE_HPP_
#define FLEXMPC_MODEL_DISCRETE_HPP_

#include <memory>
#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/diff/jacobians.hpp"
#include "flexmpc/diff/step_jacobian.hpp"
#include "flexmpc/model/flex_model.hpp"
#include "flexmpc/ode/integrators.hpp"

namespace flexmpc::model {

/// Discrete-time system x+ = Phi(x, u) with an algebraic output z(x), the
/// interface the OCP transcription and the EKF are written against.
class DiscreteSystem {
 public:
  virtual ~DiscreteSystem() = default;

  virtual int nx() const = 0;
  virtual int nu() const = 0;
  virtual int nz() const = 0;
  virtual double dt() const = 0;

  /// May throw NumericError when the underlying solve fails.
  virtual VecX Step(const VecX& x, const VecX& u) = 0;
  virtual void StepWithJacobians(const VecX& x, const VecX& u, VecX* next, MatX* dnext_dx,
                                 MatX* dnext_du) = 0;

  virtual VecX Output(const VecX& x) const = 0;
  virtual MatX OutputJacobian(const VecX& x) const = 0;
};

/// Implicit-RK discretization of the flexible-arm dynamics. One instance
/// owns one Newton workspace; do not share across threads.
class IrkFlexSystem final : public DiscreteSystem {
 public:
  IrkFlexSystem(FlexModel model, ode::ButcherTableau tableau, ode::NewtonSettings newton,
                double dt, bool warm_start = false)
      : model_(std::move(model)),
        dt_(dt),
        warm_start_(warm_start),
        stepper_(std::move(tableau), newton) {
    require(dt > 0.0, "IrkFlexSystem: dt must be > 0");
  }

  const FlexModel& flex_model() const { return model_; }

  int nx() const override { return model_.nx(); }
  int nu() const override { return 3; }
  int nz() const override { return 3; }
  double dt() const override { return dt_; }

  VecX Step(const VecX& x, const VecX& u) override {
    if (!warm_start_) stepper_.Reset();
    return stepper_.Step(Fn(), JacFn(), x, u, dt_);
  }

  void StepWithJacobians(const VecX& x, const VecX& u, VecX* next, MatX* dnext_dx,
                         MatX* dnext_du) override {
    if (!warm_start_) stepper_.Reset();
    ode::IrkStepInfo info;
    *next = stepper_.Step(Fn(), JacFn(), x, u, dt_, &info);
    const int s = stepper_.tableau().stages;
    std::vector<MatX> dfdx(s), dfdu(s);
    for (int i = 0; i < s; ++i) {
      diff::JacVectorField(model_, info.stage_states.col(i), u, &dfdx[i], &dfdu[i]);
    }
    diff::StepJacobianFromStages(stepper_.tableau(), dt_, dfdx, dfdu, dnext_dx, dnext_du);
    if (!dnext_dx->allFinite() || !dnext_du->allFinite()) {
      throw NumericError("IrkFlexSystem: non-finite step sensitivities");
    }
  }

  VecX Output(const VecX& x) const override {
    const Vec3 p = EndEffector<double>(model_, VecX(x.head(model_.nq())));
    return VecX(p);
  }

  MatX OutputJacobian(const VecX& x) const override {
    MatX jac = MatX::Zero(3, model_.nx());
    jac.leftCols(model_.nq()) =
        diff::JacForwardKinematics(model_, VecX(x.head(model_.nq())));
    return jac;
  }

 private:
  ode::OdeFn Fn() const {
    return [this](const VecX& x, const VecX& u) { return VectorField<double>(model_, x, u); };
  }
  ode::OdeJacFn JacFn() const {
    return [this](const VecX& x, const VecX& u) {
      return diff::JacVectorFieldState(model_, x, u);
    };
  }

  FlexModel model_;
  double dt_;
  bool warm_start_;
  ode::IrkStepper stepper_;
};

}  // namespace flexmpc::model

#endif  // FLEXMPC_MODEL_DISCRETE_HPP_
