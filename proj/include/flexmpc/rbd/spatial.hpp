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

#ifndef FLEXMPC_RBD_SPATIAL_HPP_
#define FLEXMPC_RBD_SPATIAL_HPP_

#include <Eigen/Dense>

#include "flexmpc/common.hpp"
#include "flexmpc/math/dual.hpp"

namespace flexmpc::rbd {

/// Rigid-body inertia expressed in the body frame: mass, center of mass and
/// the rotational inertia taken about the body frame origin (not the COM).
struct SpatialInertia {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 rot_inertia = Mat3::Zero();

  /// Throws ArgumentError unless mass > 0, the inertia is symmetric PSD and
  /// its COM-referred principal moments satisfy the triangle inequality.
  void Validate() const {
    require(mass > 0.0, "SpatialInertia: mass must be > 0");
    require((rot_inertia - rot_inertia.transpose()).norm() <=
                1e-9 * (1.0 + rot_inertia.norm()),
            "SpatialInertia: rot_inertia must be symmetric");
    // Shift to the COM before checking physical realizability.
    const Mat3 cx = Skew(com);
    const Mat3 about_com = rot_inertia + mass * cx * cx;
    Eigen::SelfAdjointEigenSolver<Mat3> es(about_com);
    const Vec3 principal = es.eigenvalues();
    const double tol = 1e-9 * (1.0 + principal.cwiseAbs().maxCoeff());
    require(principal.minCoeff() >= -tol,
            "SpatialInertia: rot_inertia must be positive semidefinite");
    require(principal[0] + principal[1] >= principal[2] - tol,
            "SpatialInertia: principal moments violate the triangle inequality");
  }

  static Mat3 Skew(const Vec3& v) {
    Mat3 s;
    s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return s;
  }
};

template <typename T>
Mat3T<T> Skew(const Vec3T<T>& v) {
  Mat3T<T> s;
  s << T(0), -v.z(), v.y(), v.z(), T(0), -v.x(), -v.y(), v.x(), T(0);
  return s;
}

/// Rigid transform mapping child-frame points into the parent frame:
/// p_parent = rot * p_child + trans.
template <typename T>
struct Transform {
  Mat3T<T> rot = Mat3T<T>::Identity();
  Vec3T<T> trans = Vec3T<T>::Zero();

  Transform() = default;
  Transform(const Mat3T<T>& r, const Vec3T<T>& t) : rot(r), trans(t) {}

  Transform operator*(const Transform& rhs) const {
    return Transform(rot * rhs.rot, rot * rhs.trans + trans);
  }
  Vec3T<T> Apply(const Vec3T<T>& p) const { return rot * p + trans; }

  template <typename U>
  Transform<U> cast() const {
    return Transform<U>(rot.template cast<U>(), trans.template cast<U>());
  }
};

using TransformD = Transform<double>;

/// Rotation about a fixed unit axis (Rodrigues).
template <typename T>
Mat3T<T> AxisRotation(const Vec3& axis, const T& angle) {
  const T c = cos(angle);
  const T s = sin(angle);
  const Mat3T<T> k = Skew<T>(axis.cast<T>());
  return Mat3T<T>::Identity() * c + k * s + axis.cast<T>() * axis.cast<T>().transpose() * (T(1) - c);
}

// Spatial (Plücker) vectors ordered (angular; linear), expressed at a body
// frame origin in body coordinates.

/// Motion-vector cross product: crm(a) b.
template <typename T>
Vec6T<T> CrossMotion(const Vec6T<T>& a, const Vec6T<T>& b) {
  Vec6T<T> out;
  out.template head<3>() = a.template head<3>().cross(b.template head<3>());
  out.template tail<3>() = a.template head<3>().cross(b.template tail<3>()) +
                           a.template tail<3>().cross(b.template head<3>());
  return out;
}

/// Force-vector cross product: crf(a) f = -crm(a)^T f.
template <typename T>
Vec6T<T> CrossForce(const Vec6T<T>& a, const Vec6T<T>& f) {
  Vec6T<T> out;
  out.template head<3>() = a.template head<3>().cross(f.template head<3>()) +
                           a.template tail<3>().cross(f.template tail<3>());
  out.template tail<3>() = a.template head<3>().cross(f.template tail<3>());
  return out;
}

/// Apply a spatial inertia to a motion vector: h = I v.
template <typename T>
Vec6T<T> ApplyInertia(const SpatialInertia& inertia, const Vec6T<T>& v) {
  const Vec3T<T> w = v.template head<3>();
  const Vec3T<T> lin = v.template tail<3>();
  const Vec3T<T> mc = (inertia.mass * inertia.com).cast<T>();
  Vec6T<T> h;
  h.template head<3>() = inertia.rot_inertia.cast<T>() * w + mc.cross(lin);
  h.template tail<3>() = inertia.mass * lin - mc.cross(w);
  return h;
}

/// Dense 6x6 of the spatial inertia, used to seed articulated-body inertias.
template <typename T>
Mat6T<T> InertiaMatrix(const SpatialInertia& inertia) {
  Mat6T<T> m = Mat6T<T>::Zero();
  const Mat3 cx = SpatialInertia::Skew(inertia.com);
  m.template topLeftCorner<3, 3>() = inertia.rot_inertia.cast<T>();
  m.template topRightCorner<3, 3>() = (inertia.mass * cx).cast<T>();
  m.template bottomLeftCorner<3, 3>() = (inertia.mass * cx.transpose()).cast<T>();
  m.template bottomRightCorner<3, 3>() = (inertia.mass * Mat3::Identity()).cast<T>();
  return m;
}

/// Transform a motion vector expressed at the parent origin into the child
/// frame located at `pos` (parent coords) with orientation `rot`
/// (child-to-parent).
template <typename T>
Vec6T<T> MotionToChild(const Mat3T<T>& rot, const Vec3T<T>& pos, const Vec6T<T>& v) {
  Vec6T<T> out;
  const Vec3T<T> w = v.template head<3>();
  out.template head<3>() = rot.transpose() * w;
  out.template tail<3>() = rot.transpose() * (v.template tail<3>() + w.cross(pos));
  return out;
}

/// Transform a force vector expressed at the child origin back to the parent.
template <typename T>
Vec6T<T> ForceToParent(const Mat3T<T>& rot, const Vec3T<T>& pos, const Vec6T<T>& f) {
  Vec6T<T> out;
  const Vec3T<T> lin = rot * f.template tail<3>();
  out.template head<3>() = rot * f.template head<3>() + pos.cross(lin);
  out.template tail<3>() = lin;
  return out;
}

/// Transform an articulated-body inertia from the child frame to the parent:
/// I_p = X^T I_c X for the motion transform X defined by (rot, pos).
template <typename T>
Mat6T<T> InertiaToParent(const Mat3T<T>& rot, const Vec3T<T>& pos, const Mat6T<T>& ic) {
  // X maps parent-origin motion to child coords:
  //   X = [ R^T      0  ]
  //       [-R^T px   R^T ]   with px = Skew(pos).
  Mat6T<T> x = Mat6T<T>::Zero();
  const Mat3T<T> rt = rot.transpose();
  x.template topLeftCorner<3, 3>() = rt;
  x.template bottomLeftCorner<3, 3>() = -rt * Skew<T>(pos);
  x.template bottomRightCorner<3, 3>() = rt;
  return x.transpose() * ic * x;
}

}  // namespace flexmpc::rbd

#endif  // FLEXMPC_RBD_SPATIAL_HPP_
