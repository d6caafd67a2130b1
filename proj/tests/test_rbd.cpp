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

#include <gtest/gtest.h>

#include <random>

#include "flexmpc/model/flex_model.hpp"
#include "flexmpc/rbd/algorithms.hpp"

namespace flexmpc {
namespace {

using model::BuildModel;
using model::FlexModel;
using model::MaterialGeometry;

double RelError(const VecX& a, const VecX& b) {
  return (a - b).lpNorm<Eigen::Infinity>() /
         (1.0 + std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()));
}

VecX RandomVec(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Mass matrix and bias assembled column-by-column from inverse dynamics,
/// the Lagrangian-side oracle for the articulated-body algorithm.
void AssembleLagrangian(const rbd::ChainModel& chain, const VecX& q, const VecX& qd,
                        MatX* mass, VecX* bias) {
  const int n = chain.num_joints();
  const VecX zero = VecX::Zero(n);
  *bias = rbd::InverseDynamics<double>(chain, q, qd, zero);  // C qd + g
  mass->resize(n, n);
  for (int j = 0; j < n; ++j) {
    VecX ej = VecX::Zero(n);
    ej[j] = 1.0;
    mass->col(j) = rbd::InverseDynamics<double>(chain, q, zero, ej) -
                   rbd::InverseDynamics<double>(chain, q, zero, zero);
  }
}

TEST(ForwardKinematics, HomeConfigurationMatchesSummedGeometry) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  const VecX q = VecX::Zero(m.nq());
  const auto fk = rbd::ForwardKinematics<double>(m.chain, q);
  // Column of height 0.3 m, then both links along +x.
  EXPECT_NEAR(fk.ee.x(), 1.0, 1e-14);
  EXPECT_NEAR(fk.ee.y(), 0.0, 1e-14);
  EXPECT_NEAR(fk.ee.z(), 0.3, 1e-14);
}

TEST(ForwardKinematics, BaseRotationKeepsHeight) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  for (double angle : {-1.3, -0.4, 0.7, 2.9}) {
    VecX q = VecX::Zero(m.nq());
    q[0] = angle;
    const auto fk = rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(q));
    EXPECT_NEAR(fk.ee.z(), 0.3, 1e-14);
    EXPECT_NEAR(fk.ee.head<2>().norm(), 1.0, 1e-12);
  }
}

TEST(ForwardKinematics, PassiveDeflectionFirstOrder) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  const double delta = 1e-6;
  // First passive joint of link 2 sits 0.125 m into the link; the remaining
  // lever arm to the EE is 0.875 m.
  VecX q = VecX::Zero(m.nq());
  q[3] = delta;
  const auto fk0 = rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(VecX::Zero(m.nq())));
  const auto fk1 = rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(q));
  const double moved = (fk1.ee - fk0.ee).norm();
  EXPECT_NEAR(moved, 0.875 * delta, 1e-3 * 0.875 * delta);

  // Finite-difference slope agrees at a generic configuration.
  std::mt19937_64 rng(7);
  VecX qr = RandomVec(rng, m.nq(), 0.4);
  VecX qp = qr, qm = qr;
  qp[4] += delta;
  qm[4] -= delta;
  const auto fp = rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(qp));
  const auto fm = rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(qm));
  const Vec3 fd = (fp.ee - fm.ee) / (2 * delta);
  VecX q1 = qr;
  q1[4] += 10 * delta;
  const auto f1 = rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(q1));
  const Vec3 lin = (f1.ee - rbd::ForwardKinematics<double>(m.chain, m.StateToChain<double>(qr)).ee) /
                   (10 * delta);
  EXPECT_LT((fd - lin).norm(), 1e-4 * (1.0 + fd.norm()));
}

TEST(ForwardKinematics, FrameChainComposesFixedTransforms) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 1);
  const VecX q = VecX::Zero(m.nq());
  const auto fk = rbd::ForwardKinematics<double>(m.chain, q);
  rbd::TransformD acc;
  for (int i = 0; i < m.nq(); ++i) {
    acc = acc * m.chain.joints[i].fixed;
    EXPECT_LT((fk.world_from_body[i].rot - acc.rot).norm(), 1e-14);
    EXPECT_LT((fk.world_from_body[i].trans - acc.trans).norm(), 1e-14);
  }
}

TEST(InverseDynamics, ZeroGravityRestNeedsNoTorque) {
  FlexModel m = BuildModel(MaterialGeometry{}, 2);
  m.chain.gravity.setZero();
  const VecX zero = VecX::Zero(m.nq());
  const VecX tau = rbd::InverseDynamics<double>(m.chain, zero, zero, zero);
  EXPECT_LT(tau.lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(InverseDynamics, GravityTorqueMatchesPotentialGradient) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  std::mt19937_64 rng(11);
  const VecX q_state = RandomVec(rng, m.nq(), 0.6);
  const VecX q = m.StateToChain<double>(q_state);
  const VecX zero = VecX::Zero(m.nq());
  const VecX g = rbd::InverseDynamics<double>(m.chain, q, zero, zero);

  const auto potential = [&](const VecX& qq) {
    const auto fk = rbd::ForwardKinematics<double>(m.chain, qq);
    double p = 0.0;
    for (int i = 0; i < m.nq(); ++i) {
      const Vec3 com = fk.world_from_body[i].Apply(m.chain.bodies[i].com);
      p -= m.chain.bodies[i].mass * m.chain.gravity.dot(com);
    }
    return p;
  };
  const double h = 1e-6;
  for (int i = 0; i < m.nq(); ++i) {
    VecX qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const double fd = (potential(qp) - potential(qm)) / (2 * h);
    EXPECT_NEAR(g[i], fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(ForwardDynamics, ZeroEverythingStaysAtRest) {
  FlexModel m = BuildModel(MaterialGeometry{}, 2);
  m.chain.gravity.setZero();
  const VecX zero = VecX::Zero(m.nq());
  const VecX qdd = rbd::ForwardDynamics<double>(m.chain, zero, zero, zero);
  EXPECT_LT(qdd.lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(ForwardDynamics, RoundTripThroughInverseDynamics) {
  std::mt19937_64 rng(23);
  for (int n_seg : {1, 2, 3}) {
    const FlexModel m = BuildModel(MaterialGeometry{}, n_seg);
    for (int trial = 0; trial < 100; ++trial) {
      const VecX q = RandomVec(rng, m.nq(), 0.8);
      const VecX qd = RandomVec(rng, m.nq(), 1.5);
      const VecX qdd = RandomVec(rng, m.nq(), 3.0);
      const VecX tau = rbd::InverseDynamics<double>(m.chain, q, qd, qdd);
      const VecX qdd_back = rbd::ForwardDynamics<double>(m.chain, q, qd, tau);
      EXPECT_LT(RelError(qdd, qdd_back), 1e-8) << "n_seg=" << n_seg << " trial=" << trial;
    }
  }
}

TEST(ForwardDynamics, MatchesLagrangianAssembly) {
  std::mt19937_64 rng(31);
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX q = RandomVec(rng, m.nq(), 0.8);
    const VecX qd = RandomVec(rng, m.nq(), 1.5);
    const VecX tau = RandomVec(rng, m.nq(), 5.0);
    MatX mass;
    VecX bias;
    AssembleLagrangian(m.chain, q, qd, &mass, &bias);
    const VecX qdd_oracle = mass.ldlt().solve(tau - bias);
    const VecX qdd = rbd::ForwardDynamics<double>(m.chain, q, qd, tau);
    EXPECT_LT(RelError(qdd, qdd_oracle), 1e-8);
  }
}

TEST(ForwardDynamics, MassMatrixSymmetricPositiveDefinite) {
  std::mt19937_64 rng(37);
  const FlexModel m = BuildModel(MaterialGeometry{}, 3);
  const VecX q = RandomVec(rng, m.nq(), 0.8);
  MatX mass;
  VecX bias;
  AssembleLagrangian(m.chain, q, VecX::Zero(m.nq()), &mass, &bias);
  EXPECT_LT((mass - mass.transpose()).norm(), 1e-10 * mass.norm());
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (mass + mass.transpose()));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(ForwardDynamics, EquilibriumHoldTorqueGivesZeroAcceleration) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  std::mt19937_64 rng(41);
  const VecX q = m.StateToChain<double>(RandomVec(rng, m.nq(), 0.5));
  const VecX zero = VecX::Zero(m.nq());
  const VecX tau_hold = rbd::InverseDynamics<double>(m.chain, q, zero, zero);
  const VecX qdd = rbd::ForwardDynamics<double>(m.chain, q, zero, tau_hold);
  EXPECT_LT(qdd.lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(ForwardDynamics, DimensionMismatchThrows) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 1);
  const VecX bad = VecX::Zero(m.nq() + 1);
  const VecX ok = VecX::Zero(m.nq());
  EXPECT_THROW(rbd::ForwardDynamics<double>(m.chain, bad, ok, ok), ArgumentError);
  EXPECT_THROW(rbd::InverseDynamics<double>(m.chain, ok, bad, ok), ArgumentError);
  EXPECT_THROW(rbd::ForwardKinematics<double>(m.chain, bad), ArgumentError);
}

}  // namespace
}  // namespace flexmpc
