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

#ifndef FLEXMPC_MODEL_FLEX_MODEL_HPP_
#define FLEXMPC_MODEL_FLEX_MODEL_HPP_

#include <cmath>
#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/math/jacobian_sweep.hpp"
#include "flexmpc/rbd/algorithms.hpp"
#include "flexmpc/rbd/chain.hpp"

namespace flexmpc::model {

/// Uniform-cuboid material and cross-section of one flexible link.
struct MaterialGeometry {
  double length = 0.5;          // L [m]
  double width = 0.05;          // a [m]
  double height = 0.002;        // h [m]
  double density = 7.87e3;      // rho [kg/m^3]
  double young_modulus = 1.9e11;  // E [Pa]
  double shear_modulus = 7.4e10;  // G [Pa] (parsed, unused: no torsion DOF)
  double damping_ratio = 5e-3;    // zeta

  void Validate() const {
    require(length > 0 && width > 0 && height > 0 && density > 0 && young_modulus > 0 &&
                shear_modulus > 0,
            "MaterialGeometry: all parameters must be strictly positive");
    require(damping_ratio > 0 && damping_ratio < 1,
            "MaterialGeometry: damping ratio must be in (0, 1)");
  }
};

/// The rigid base link is not part of the flexible-link data; its geometry is
/// a configurable column with the same cross-section and material.
struct Link1Config {
  double length = 0.3;  // [m]
};

/// MRFEM-discretized manipulator: serial rigid-body chain plus the diagonal
/// stiffness/damping acting on passive joints and the actuation selection.
///
/// State layout is (q_a; q_p): the three actuated joints first, then the
/// passive joints of link 2 followed by link 3. The underlying chain stores
/// bodies in physical order, so `chain_of_state` maps state coordinates to
/// chain coordinates.
struct FlexModel {
  rbd::ChainModel chain;
  int n_seg = 0;
  VecX k_diag;  // [N m / rad], zero at active joints
  VecX d_diag;  // [N m s / rad], zero at active joints
  MatX b_selection;  // n_q x 3
  std::vector<int> chain_of_state;

  Vec3 torque_ub = Vec3(20.0, 10.0, 10.0);   // lb = -ub
  Vec3 velocity_ub = Vec3(2.5, 3.5, 3.5);    // active joints, lb = -ub

  int nq() const { return chain.num_joints(); }
  int nx() const { return 2 * nq(); }
  int np() const { return 2 * n_seg; }
  static constexpr int na() { return 3; }

  template <typename T>
  VecXT<T> StateToChain(const VecXT<T>& v) const {
    VecXT<T> out(v.size());
    for (int i = 0; i < static_cast<int>(v.size()); ++i) out[chain_of_state[i]] = v[i];
    return out;
  }
  template <typename T>
  VecXT<T> ChainToState(const VecXT<T>& v) const {
    VecXT<T> out(v.size());
    for (int i = 0; i < static_cast<int>(v.size()); ++i) out[i] = v[chain_of_state[i]];
    return out;
  }
};

namespace detail {

/// Inertia of a solid cuboid with extents (ex, ey, ez) about the body origin,
/// COM displaced by `com` from the origin.
inline Mat3 CuboidInertiaAboutOrigin(double mass, const Vec3& extents, const Vec3& com) {
  const double ex2 = extents.x() * extents.x();
  const double ey2 = extents.y() * extents.y();
  const double ez2 = extents.z() * extents.z();
  Mat3 about_com = Mat3::Zero();
  about_com(0, 0) = mass * (ey2 + ez2) / 12.0;
  about_com(1, 1) = mass * (ex2 + ez2) / 12.0;
  about_com(2, 2) = mass * (ex2 + ey2) / 12.0;
  return about_com + mass * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
}

/// Rigid finite element lengths of one link: n_seg + 1 elements, outer two of
/// length dl/2 with the spring-damper cuts at segment centers.
inline std::vector<double> ElementLengths(double link_length, int n_seg) {
  if (n_seg == 0) return {link_length};
  const double dl = link_length / n_seg;
  std::vector<double> lengths(n_seg + 1, dl);
  lengths.front() = 0.5 * dl;
  lengths.back() = 0.5 * dl;
  return lengths;
}

}  // namespace detail

/// Builds the 3-DOF MRFEM manipulator. Joint 1 rotates about the world
/// vertical Z; joints 2 and 3 and all passive joints bend about local Y.
/// Links 2 and 3 run along local X at home, link 1 is a vertical column of
/// height link1.length (see docs/conventions.md for the frame conventions).
inline FlexModel BuildModel(const MaterialGeometry& mat, int n_seg,
                            const Link1Config& link1 = {}) {
  mat.Validate();
  require(n_seg >= 0, "build_model: n_seg must be >= 0");
  require(link1.length > 0, "build_model: link 1 length must be > 0");

  FlexModel model;
  model.n_seg = n_seg;
  const double area = mat.width * mat.height;

  // Base column along +Z, rotating about the world vertical axis.
  {
    rbd::SpatialInertia body;
    body.mass = mat.density * area * link1.length;
    body.com = Vec3(0, 0, 0.5 * link1.length);
    body.rot_inertia = detail::CuboidInertiaAboutOrigin(
        body.mass, Vec3(mat.width, mat.height, link1.length), body.com);
    rbd::Joint joint;
    joint.parent = -1;
    joint.axis = Vec3::UnitZ();
    joint.kind = rbd::JointKind::kActive;
    model.chain.bodies.push_back(body);
    model.chain.joints.push_back(joint);
  }

  const std::vector<double> lengths = detail::ElementLengths(mat.length, n_seg);
  const double dl = n_seg > 0 ? mat.length / n_seg : mat.length;
  const double area_moment = mat.width * std::pow(mat.height, 3) / 12.0;
  const double k_joint = mat.young_modulus * area_moment / dl;

  std::vector<int> passive_chain_indices;
  std::vector<double> passive_damping;

  // Two identical flexible links; the first element of each hangs off an
  // active joint, subsequent elements off passive spring-damper joints.
  for (int link = 0; link < 2; ++link) {
    for (int e = 0; e < static_cast<int>(lengths.size()); ++e) {
      const double len = lengths[e];
      rbd::SpatialInertia body;
      body.mass = mat.density * area * len;
      body.com = Vec3(0.5 * len, 0, 0);
      body.rot_inertia = detail::CuboidInertiaAboutOrigin(
          body.mass, Vec3(len, mat.width, mat.height), body.com);

      rbd::Joint joint;
      joint.parent = static_cast<int>(model.chain.bodies.size()) - 1;
      joint.axis = Vec3::UnitY();
      if (e == 0) {
        joint.kind = rbd::JointKind::kActive;
        joint.fixed.trans = link == 0 ? Vec3(0, 0, link1.length)
                                      : Vec3(lengths.back(), 0, 0);
      } else {
        joint.kind = rbd::JointKind::kPassive;
        joint.fixed.trans = Vec3(lengths[e - 1], 0, 0);
        passive_chain_indices.push_back(static_cast<int>(model.chain.joints.size()));
        // Viscous coefficient from the damping ratio and the distal element
        // inertia about the joint axis.
        const double j_eff = body.rot_inertia(1, 1);
        passive_damping.push_back(2.0 * mat.damping_ratio * std::sqrt(k_joint * j_eff));
      }
      model.chain.bodies.push_back(body);
      model.chain.joints.push_back(joint);
    }
  }
  model.chain.ee_offset = Vec3(lengths.back(), 0, 0);
  model.chain.Validate();

  const int nq = model.chain.num_joints();
  model.chain_of_state.resize(nq);
  model.chain_of_state[0] = 0;
  model.chain_of_state[1] = 1;
  model.chain_of_state[2] = n_seg + 2;
  for (int i = 0; i < n_seg; ++i) {
    model.chain_of_state[3 + i] = 2 + i;             // link 2 passives
    model.chain_of_state[3 + n_seg + i] = n_seg + 3 + i;  // link 3 passives
  }

  model.k_diag = VecX::Zero(nq);
  model.d_diag = VecX::Zero(nq);
  for (int i = 0; i < model.np(); ++i) {
    model.k_diag[3 + i] = k_joint;
    model.d_diag[3 + i] = passive_damping[i];
  }
  model.b_selection = MatX::Zero(nq, 3);
  model.b_selection.topLeftCorner<3, 3>() = Mat3::Identity();
  return model;
}

/// State-space vector field xdot = (qd; FD(q, qd, B u - K q - D qd)).
/// Bounds are not enforced here.
template <typename T>
VecXT<T> VectorField(const FlexModel& model, const VecXT<T>& x, const VecXT<T>& u) {
  const int nq = model.nq();
  require(static_cast<int>(x.size()) == 2 * nq, "vector_field: dim(x) mismatch");
  require(static_cast<int>(u.size()) == 3, "vector_field: dim(u) mismatch");
  const VecXT<T> q = x.head(nq);
  const VecXT<T> qd = x.tail(nq);
  VecXT<T> tau = model.b_selection.cast<T>() * u -
                 model.k_diag.cast<T>().cwiseProduct(q) -
                 model.d_diag.cast<T>().cwiseProduct(qd);
  const VecXT<T> qdd = model.ChainToState<T>(rbd::ForwardDynamics<T>(
      model.chain, model.StateToChain<T>(q), model.StateToChain<T>(qd),
      model.StateToChain<T>(tau)));
  VecXT<T> xdot(2 * nq);
  xdot.head(nq) = qd;
  xdot.tail(nq) = qdd;
  return xdot;
}

/// Gravity torque vector g(q) in state layout.
template <typename T>
VecXT<T> GravityTorque(const FlexModel& model, const VecXT<T>& q) {
  const VecXT<T> zero = VecXT<T>::Zero(model.nq());
  return model.ChainToState<T>(
      rbd::InverseDynamics<T>(model.chain, model.StateToChain<T>(q), zero, zero));
}

/// Torque on the active joints holding configuration q at rest:
/// active rows of K q + g(q).
inline Vec3 HoldTorque(const FlexModel& model, const VecX& q) {
  const VecX static_tau = model.k_diag.cwiseProduct(q) + GravityTorque<double>(model, q);
  return static_tau.head<3>();
}

/// Passive-joint rest configuration for clamped active joints: Newton solve
/// of the passive rows of K q + g(q) = 0 to residual <= 1e-10.
inline VecX PassiveEquilibrium(const FlexModel& model, const Vec3& q_active,
                               int max_iters = 50, double tol = 1e-10) {
  require(q_active.allFinite(), "passive_equilibrium: q_a must be finite");
  const int np = model.np();
  VecX q_passive = VecX::Zero(np);
  if (np == 0) return q_passive;

  const auto residual = [&](const auto& qp) {
    using T = typename std::decay_t<decltype(qp)>::Scalar;
    VecXT<T> q(model.nq());
    q.head(3) = q_active.cast<T>();
    q.tail(np) = qp;
    return VecXT<T>(model.k_diag.cast<T>().cwiseProduct(q).tail(np) +
                    GravityTorque<T>(model, q).tail(np));
  };

  double res_norm = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    MatX jac;
    const VecX r = JacobianSweep(residual, q_passive, &jac);
    res_norm = r.lpNorm<Eigen::Infinity>();
    if (res_norm <= tol) return q_passive;
    q_passive -= jac.partialPivLu().solve(r);
  }
  MatX jac;
  res_norm = JacobianSweep(residual, q_passive, &jac).lpNorm<Eigen::Infinity>();
  if (res_norm <= tol) return q_passive;
  throw NumericError("passive_equilibrium: Newton did not converge", res_norm);
}

/// Measured output y = (q_a; qd_a; p_ee), a 9-vector.
template <typename T>
VecXT<T> OutputMap(const FlexModel& model, const VecXT<T>& x) {
  const int nq = model.nq();
  require(static_cast<int>(x.size()) == 2 * nq, "output_map: dim(x) mismatch");
  const auto fk =
      rbd::ForwardKinematics<T>(model.chain, model.StateToChain<T>(VecXT<T>(x.head(nq))));
  VecXT<T> y(9);
  y.template head<3>() = x.template head<3>();
  y.template segment<3>(3) = x.segment(nq, 3);
  y.template tail<3>() = fk.ee;
  return y;
}

/// End-effector position for a state-layout configuration.
template <typename T>
Vec3T<T> EndEffector(const FlexModel& model, const VecXT<T>& q) {
  return rbd::ForwardKinematics<T>(model.chain, model.StateToChain<T>(q)).ee;
}

/// Total mechanical energy (kinetic + spring + gravitational), used by the
/// passivity checks. The gravity potential is measured from q = 0.
inline double TotalEnergy(const FlexModel& model, const VecX& q, const VecX& qd) {
  const int nq = model.nq();
  // Kinetic energy via M qd = RNEA(q, 0, qd) with gravity off.
  rbd::ChainModel no_gravity = model.chain;
  no_gravity.gravity.setZero();
  const VecX zero = VecX::Zero(nq);
  const VecX chain_qd = model.StateToChain<double>(qd);
  const VecX m_qd =
      rbd::InverseDynamics<double>(no_gravity, model.StateToChain<double>(q), zero, chain_qd);
  const double kinetic = 0.5 * chain_qd.dot(m_qd);
  const double spring = 0.5 * q.dot(model.k_diag.cwiseProduct(q));

  double gravitational = 0.0;
  const auto fk = rbd::ForwardKinematics<double>(model.chain, model.StateToChain<double>(q));
  for (int i = 0; i < nq; ++i) {
    const Vec3 com_world = fk.world_from_body[i].Apply(model.chain.bodies[i].com);
    gravitational -= model.chain.bodies[i].mass * model.chain.gravity.dot(com_world);
  }
  return kinetic + spring + gravitational;
}

}  // namespace flexmpc::model

#endif  // FLEXMPC_MODEL_FLEX_MODEL_HPP_
