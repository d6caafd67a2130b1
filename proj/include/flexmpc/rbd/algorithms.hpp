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

#ifndef FLEXMPC_RBD_ALGORITHMS_HPP_
#define FLEXMPC_RBD_ALGORITHMS_HPP_

#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/rbd/chain.hpp"
#include "flexmpc/rbd/spatial.hpp"

namespace flexmpc::rbd {

// The three classic serial-chain algorithms, templated on the scalar so that
// dual numbers flow through them unchanged. Model data stays double; only
// state-dependent quantities carry derivatives.
//
// Spatial vectors are (angular; linear) in body coordinates at the body
// frame origin, which coincides with the joint origin. Gravity enters as a
// fictitious base acceleration.

template <typename T>
struct FkResult {
  std::vector<Transform<T>> world_from_body;
  Vec3T<T> ee = Vec3T<T>::Zero();
};

/// Forward kinematics: all body frames and the end-effector position.
template <typename T>
FkResult<T> ForwardKinematics(const ChainModel& model, const VecXT<T>& q) {
  const int n = model.num_joints();
  require(static_cast<int>(q.size()) == n, "forward_kinematics: dim(q) mismatch");
  FkResult<T> out;
  out.world_from_body.resize(n);
  Transform<T> world = Transform<T>();
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[i];
    Transform<T> local = j.fixed.cast<T>();
    local.rot = local.rot * AxisRotation<T>(j.axis, q[i]);
    world = world * local;
    out.world_from_body[i] = world;
  }
  out.ee = world.Apply(model.ee_offset.cast<T>());
  return out;
}

/// Inverse dynamics (recursive Newton-Euler): generalized torques realizing
/// (q, qd, qdd), minus the supplied external generalized torques.
template <typename T>
VecXT<T> InverseDynamics(const ChainModel& model, const VecXT<T>& q, const VecXT<T>& qd,
                         const VecXT<T>& qdd, const VecXT<T>* tau_external = nullptr) {
  const int n = model.num_joints();
  require(q.size() == n && qd.size() == n && qdd.size() == n,
          "inverse_dynamics: dimension mismatch");
  if (tau_external != nullptr) {
    require(tau_external->size() == n, "inverse_dynamics: dim(tau_external) mismatch");
  }

  std::vector<Mat3T<T>> rot(n);   // child-to-parent rotations
  std::vector<Vec3T<T>> pos(n);   // joint origins in parent coords
  std::vector<Vec6T<T>> vel(n), force(n);

  Vec6T<T> a_base = Vec6T<T>::Zero();
  a_base.template tail<3>() = (-model.gravity).cast<T>();

  Vec6T<T> v_parent = Vec6T<T>::Zero();
  Vec6T<T> a_parent = a_base;
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[i];
    rot[i] = j.fixed.rot.cast<T>() * AxisRotation<T>(j.axis, q[i]);
    pos[i] = j.fixed.trans.cast<T>();
    Vec6T<T> s = Vec6T<T>::Zero();
    s.template head<3>() = j.axis.cast<T>();

    const Vec6T<T> v = MotionToChild<T>(rot[i], pos[i], v_parent) + s * qd[i];
    const Vec6T<T> a = MotionToChild<T>(rot[i], pos[i], a_parent) + s * qdd[i] +
                       CrossMotion<T>(v, s * qd[i]);
    vel[i] = v;
    force[i] = ApplyInertia<T>(model.bodies[i], a) +
               CrossForce<T>(v, ApplyInertia<T>(model.bodies[i], v));
    v_parent = v;
    a_parent = a;
  }

  VecXT<T> tau(n);
  for (int i = n - 1; i >= 0; --i) {
    const Joint& j = model.joints[i];
    tau[i] = j.axis.cast<T>().dot(force[i].template head<3>());
    if (i > 0) force[i - 1] += ForceToParent<T>(rot[i], pos[i], force[i]);
  }
  if (tau_external != nullptr) tau -= *tau_external;
  return tau;
}

/// Forward dynamics (articulated-body algorithm): joint accelerations under
/// the given generalized torque vector. Gravity is applied internally;
/// springs/dampers/actuation selection belong to the caller.
template <typename T>
VecXT<T> ForwardDynamics(const ChainModel& model, const VecXT<T>& q, const VecXT<T>& qd,
                         const VecXT<T>& tau) {
  const int n = model.num_joints();
  require(q.size() == n && qd.size() == n && tau.size() == n,
          "forward_dynamics: dimension mismatch");

  std::vector<Mat3T<T>> rot(n);
  std::vector<Vec3T<T>> pos(n);
  std::vector<Vec6T<T>> s(n), vel(n), bias_acc(n), pa(n), u_over_d_terms(n);
  std::vector<Mat6T<T>> ia(n);
  std::vector<Vec6T<T>> u_vec(n);
  VecXT<T> d(n), u(n);

  Vec6T<T> v_parent = Vec6T<T>::Zero();
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[i];
    rot[i] = j.fixed.rot.cast<T>() * AxisRotation<T>(j.axis, q[i]);
    pos[i] = j.fixed.trans.cast<T>();
    s[i] = Vec6T<T>::Zero();
    s[i].template head<3>() = j.axis.cast<T>();

    vel[i] = MotionToChild<T>(rot[i], pos[i], v_parent) + s[i] * qd[i];
    bias_acc[i] = CrossMotion<T>(vel[i], s[i] * qd[i]);
    ia[i] = InertiaMatrix<T>(model.bodies[i]);
    pa[i] = CrossForce<T>(vel[i], ApplyInertia<T>(model.bodies[i], vel[i]));
    v_parent = vel[i];
  }

  for (int i = n - 1; i >= 0; --i) {
    u_vec[i] = ia[i] * s[i];
    d[i] = s[i].dot(u_vec[i]);
    if (!(value(d[i]) > 0.0)) {
      throw NumericError("forward_dynamics: singular articulated inertia at joint " +
                             std::to_string(i),
                         value(d[i]));
    }
    u[i] = tau[i] - s[i].dot(pa[i]);
    if (i > 0) {
      const Mat6T<T> ia_proj = ia[i] - u_vec[i] * (u_vec[i] / d[i]).transpose();
      const Vec6T<T> pa_proj = pa[i] + ia_proj * bias_acc[i] + u_vec[i] * (u[i] / d[i]);
      ia[i - 1] += InertiaToParent<T>(rot[i], pos[i], ia_proj);
      pa[i - 1] += ForceToParent<T>(rot[i], pos[i], pa_proj);
    }
  }

  VecXT<T> qdd(n);
  Vec6T<T> a_parent = Vec6T<T>::Zero();
  a_parent.template tail<3>() = (-model.gravity).cast<T>();
  for (int i = 0; i < n; ++i) {
    const Vec6T<T> a_prime = MotionToChild<T>(rot[i], pos[i], a_parent) + bias_acc[i];
    qdd[i] = (u[i] - u_vec[i].dot(a_prime)) / d[i];
    a_parent = a_prime + s[i] * qdd[i];
  }
  return qdd;
}

}  // namespace flexmpc::rbd

#endif  // FLEXMPC_RBD_ALGORITHMS_HPP_
