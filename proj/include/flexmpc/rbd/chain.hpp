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

#ifndef FLEXMPC_RBD_CHAIN_HPP_
#define FLEXMPC_RBD_CHAIN_HPP_

#include <cmath>
#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/rbd/spatial.hpp"

namespace flexmpc::rbd {

enum class JointKind { kActive, kPassive };

/// One-DOF revolute joint connecting body `parent` to its child. The joint
/// frame is placed by `fixed` relative to the parent body frame; the child
/// body frame coincides with the joint frame rotated by the joint angle
/// about `axis`.
struct Joint {
  int parent = -1;  // -1 means world
  TransformD fixed;
  Vec3 axis = Vec3::UnitZ();
  JointKind kind = JointKind::kActive;
};

/// Serial chain of rigid bodies: body i is attached through joint i, and
/// joint i's parent is body i-1 (world for i = 0).
struct ChainModel {
  std::vector<SpatialInertia> bodies;
  std::vector<Joint> joints;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  /// End-effector point in the last body frame.
  Vec3 ee_offset = Vec3::Zero();

  int num_joints() const { return static_cast<int>(joints.size()); }

  void Validate() const {
    require(bodies.size() == joints.size(), "ChainModel: one joint per body");
    require(!bodies.empty(), "ChainModel: empty chain");
    for (int i = 0; i < num_joints(); ++i) {
      require(joints[i].parent == i - 1, "ChainModel: serial chain requires parent = index - 1");
      require(std::abs(joints[i].axis.norm() - 1.0) <= 1e-12, "ChainModel: joint axes must be unit norm");
      bodies[i].Validate();
    }
  }
};

/// Generalized position/velocity pair x = (q; qd).
struct StateVec {
  VecX q;
  VecX qd;

  StateVec() = default;
  StateVec(VecX q_in, VecX qd_in) : q(std::move(q_in)), qd(std::move(qd_in)) {
    require(q.size() == qd.size(), "StateVec: dim(q) != dim(qd)");
  }

  static StateVec Zero(int nq) { return StateVec(VecX::Zero(nq), VecX::Zero(nq)); }

  int nq() const { return static_cast<int>(q.size()); }
  int nx() const { return 2 * nq(); }

  VecX Flatten() const {
    VecX x(nx());
    x << q, qd;
    return x;
  }
  static StateVec FromFlat(const VecX& x) {
    require(x.size() % 2 == 0, "StateVec: flat state must have even length");
    const int n = static_cast<int>(x.size()) / 2;
    return StateVec(x.head(n), x.tail(n));
  }
};

}  // namespace flexmpc::rbd

#endif  // FLEXMPC_RBD_CHAIN_HPP_
