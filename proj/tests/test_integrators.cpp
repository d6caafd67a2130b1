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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "flexmpc/model/flex_model.hpp"
#include "flexmpc/ode/integrators.hpp"
#include "flexmpc/ode/simulate.hpp"

namespace flexmpc {
namespace {

using model::BuildModel;
using model::FlexModel;
using model::MaterialGeometry;
using ode::ButcherTableau;
using ode::Erk4Step;
using ode::IrkStep;
using ode::NewtonSettings;

TEST(Tableau, CollocationConsistency) {
  for (const auto& tab : {ButcherTableau::RadauIIA3(), ButcherTableau::GaussLegendre4()}) {
    EXPECT_NEAR(tab.b.sum(), 1.0, 1e-14) << tab.name;
    for (int i = 0; i < tab.stages; ++i) {
      EXPECT_NEAR(tab.c[i], tab.a.row(i).sum(), 1e-13) << tab.name;
    }
  }
  // Radau IIA is stiffly accurate: b equals the last row of a.
  const auto radau = ButcherTableau::RadauIIA3();
  EXPECT_LT((radau.b.transpose() - radau.a.row(radau.stages - 1)).norm(), 1e-13);
}

TEST(Tableau, ImplicitTableausAreAStableOnProbeGrid) {
  for (const auto& tab : {ButcherTableau::RadauIIA3(), ButcherTableau::GaussLegendre4()}) {
    for (double re = -50.0; re <= 0.0; re += 2.5) {
      for (double im = -50.0; im <= 50.0; im += 2.5) {
        const auto r = tab.Stability({re, im});
        EXPECT_LE(std::abs(r), 1.0 + 1e-10)
            << tab.name << " at z = " << re << " + " << im << "i";
      }
    }
  }
}

TEST(Erk4, ZeroFieldIsIdentity) {
  const auto f = [](const VecX& x, const VecX&) { return VecX(VecX::Zero(x.size())); };
  const VecX x = VecX::Random(5);
  EXPECT_EQ(Erk4Step(f, x, VecX::Zero(1), 0.1), x);
}

TEST(Erk4, ScalarStabilityPolynomial) {
  for (double lambda : {-3.0, -0.5, 0.7}) {
    const auto f = [lambda](const VecX& x, const VecX&) { return VecX(lambda * x); };
    VecX x(1);
    x << 2.0;
    const double dt = 0.3;
    const double z = lambda * dt;
    const double poly = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
    const VecX next = Erk4Step(f, x, VecX::Zero(1), dt);
    EXPECT_NEAR(next[0], poly * x[0], 1e-14 * std::abs(poly * x[0]));
  }
}

TEST(Erk4, DivergesOnStiffPlantModel) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 10);
  const auto f = [&m](const VecX& x, const VecX& u) {
    return model::VectorField<double>(m, x, u);
  };
  VecX x = VecX::Zero(m.nx());
  x.head<3>() = Vec3(0.0, 0.1, -0.1);
  const VecX u = VecX::Zero(3);
  double t = 0.0;
  bool diverged = false;
  try {
    while (t < 1.0) {
      x = Erk4Step(f, x, u, 0.01);
      t += 0.01;
    }
  } catch (const NumericError&) {
    diverged = true;
  }
  EXPECT_TRUE(diverged) << "RK4 stayed finite for 1 s on the n_seg = 10 model";
  EXPECT_LT(t, 1.0);
}

TEST(Irk, ZeroFieldIsIdentityForAnyTableau) {
  const auto f = [](const VecX& x, const VecX&) { return VecX(VecX::Zero(x.size())); };
  const auto jac = [](const VecX& x, const VecX&) {
    return MatX(MatX::Zero(x.size(), x.size()));
  };
  const VecX x = VecX::Random(4);
  for (const auto& tab : {ButcherTableau::RadauIIA3(), ButcherTableau::GaussLegendre4()}) {
    const VecX next = IrkStep(tab, NewtonSettings{}, f, jac, x, VecX::Zero(1), 0.25);
    EXPECT_LT((next - x).lpNorm<Eigen::Infinity>(), 1e-14);
  }
}

TEST(Irk, ScalarMatchesStabilityFunction) {
  for (const auto& tab : {ButcherTableau::RadauIIA3(), ButcherTableau::GaussLegendre4()}) {
    for (double lambda : {-40.0, -2.0, 0.9}) {
      const auto f = [lambda](const VecX& x, const VecX&) { return VecX(lambda * x); };
      const auto jac = [lambda](const VecX&, const VecX&) {
        MatX j(1, 1);
        j << lambda;
        return j;
      };
      VecX x(1);
      x << 1.5;
      const double dt = 0.1;
      NewtonSettings newton;
      newton.tol = 1e-14;
      const VecX next = IrkStep(tab, newton, f, jac, x, VecX::Zero(1), dt);
      const double r = tab.Stability({lambda * dt, 0.0}).real();
      EXPECT_NEAR(next[0], r * x[0], 1e-11 * std::abs(x[0])) << tab.name;
    }
  }
}

TEST(Irk, NewtonFailureCarriesResidual) {
  // A hostile Jacobian callback starves Newton on an exploding field.
  const auto f = [](const VecX& x, const VecX&) { return VecX(x.array().square() + 1e8); };
  const auto jac = [](const VecX& x, const VecX&) {
    return MatX(MatX::Zero(x.size(), x.size()));
  };
  VecX x(1);
  x << 1.0;
  NewtonSettings newton;
  newton.tol = 1e-12;
  newton.max_iters = 3;
  try {
    IrkStep(ButcherTableau::RadauIIA3(), newton, f, jac, x, VecX::Zero(1), 1.0);
    FAIL() << "expected NumericError";
  } catch (const NumericError& err) {
    EXPECT_GT(err.residual(), 0.0);
  }
}

// Equilibrium state/hold pair for a model.
void EquilibriumState(const FlexModel& m, const Vec3& q_a, VecX* x, Vec3* hold) {
  *x = VecX::Zero(m.nx());
  x->head<3>() = q_a;
  x->segment(3, m.np()) = model::PassiveEquilibrium(m, q_a);
  *hold = model::HoldTorque(m, x->head(m.nq()));
}

TEST(Irk, SelfConvergenceOrderAtLeastFourPointFive) {
  // Step sizes sit in the asymptotic regime (omega dt << 1); coarser steps
  // would show the classic stiff order reduction instead of order 5.
  const FlexModel m = BuildModel(MaterialGeometry{}, 1);
  VecX x0;
  Vec3 hold;
  EquilibriumState(m, Vec3(0.2, -0.1, 0.3), &x0, &hold);
  VecX u(3);
  u << hold[0], hold[1] + 2.0, hold[2];  // constant pitch torque excites bending

  const auto f = [&m](const VecX& x, const VecX& uu) {
    return model::VectorField<double>(m, x, uu);
  };
  const auto jac = [&m](const VecX& x, const VecX& uu) {
    return diff::JacVectorFieldState(m, x, uu);
  };
  NewtonSettings newton;
  newton.tol = 1e-13;

  const double t_end = 0.032;
  const auto integrate = [&](double dt) {
    ode::IrkStepper stepper(ButcherTableau::RadauIIA3(), newton);
    VecX x = x0;
    const int steps = static_cast<int>(std::round(t_end / dt));
    for (int k = 0; k < steps; ++k) x = stepper.Step(f, jac, x, u, dt);
    return x;
  };

  const VecX ref = integrate(0.002 / 64.0);
  const double e1 = (integrate(0.002) - ref).norm();
  const double e2 = (integrate(0.001) - ref).norm();
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 4.5);
  EXPECT_LE(order, 7.0);
}

TEST(GroundTruth, EquilibriumHoldStaysPut) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 3);
  VecX x0;
  Vec3 hold;
  EquilibriumState(m, Vec3(-0.4, 0.2, 0.1), &x0, &hold);
  const auto traj =
      ode::SimulateGroundTruth(m, x0, [&](double) { return VecX(hold); }, 0.5);
  for (const VecX& x : traj.states) {
    EXPECT_LT((x - x0).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(GroundTruth, SquareWaveExcitesOscillations) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 5);
  VecX x0;
  Vec3 hold;
  EquilibriumState(m, Vec3(0.0, 0.0, 0.0), &x0, &hold);
  const auto traj = ode::SimulateGroundTruth(m, x0, ode::SquareWaveProtocol(hold), 1.5);

  // EE height must oscillate: count direction changes.
  std::vector<double> ee_z;
  for (const VecX& x : traj.states) {
    ee_z.push_back(model::EndEffector<double>(m, VecX(x.head(m.nq()))).z());
  }
  int direction_changes = 0;
  for (size_t i = 2; i < ee_z.size(); ++i) {
    const double d0 = ee_z[i - 1] - ee_z[i - 2];
    const double d1 = ee_z[i] - ee_z[i - 1];
    if (d0 * d1 < 0) ++direction_changes;
  }
  EXPECT_GE(direction_changes, 6);
  const double span = *std::max_element(ee_z.begin(), ee_z.end()) -
                      *std::min_element(ee_z.begin(), ee_z.end());
  EXPECT_GT(span, 1e-3);
}

TEST(GroundTruth, FineStepRefinementBelow1e7) {
  // On a model whose fastest mode is well resolved by dt/20, halving the
  // fine step moves the final state by less than 1e-7 relative.
  const FlexModel m = BuildModel(MaterialGeometry{}, 1);
  VecX x0;
  Vec3 hold;
  EquilibriumState(m, Vec3(0.1, 0.05, -0.2), &x0, &hold);
  const auto protocol = ode::SquareWaveProtocol(hold);
  const auto t1 = ode::SimulateGroundTruth(m, x0, protocol, 0.6, 0.01, 20);
  const auto t2 = ode::SimulateGroundTruth(m, x0, protocol, 0.6, 0.01, 40);
  const VecX& a = t1.states.back();
  const VecX& b = t2.states.back();
  EXPECT_LT((a - b).lpNorm<Eigen::Infinity>() / (1.0 + a.lpNorm<Eigen::Infinity>()), 1e-7);
}

TEST(GroundTruth, DeterministicByteForByte) {
  const FlexModel m = BuildModel(MaterialGeometry{}, 2);
  VecX x0;
  Vec3 hold;
  EquilibriumState(m, Vec3(0.3, -0.3, 0.2), &x0, &hold);
  const auto protocol = ode::SquareWaveProtocol(hold);
  const auto t1 = ode::SimulateGroundTruth(m, x0, protocol, 0.3);
  const auto t2 = ode::SimulateGroundTruth(m, x0, protocol, 0.3);
  ASSERT_EQ(t1.size(), t2.size());
  for (int i = 0; i < t1.size(); ++i) {
    EXPECT_TRUE(t1.states[i] == t2.states[i]) << "step " << i;
  }
}

TEST(Passivity, UnforcedEnergyDecayMatchesDamping) {
  FlexModel m = BuildModel(MaterialGeometry{}, 2);
  // Start bent and ring down without gravity; fine reporting grid for the
  // dissipation quadrature.
  m.chain.gravity.setZero();
  VecX x0 = VecX::Zero(m.nx());
  x0[3] = 0.05;
  x0[5] = -0.03;
  const auto traj = ode::SimulateGroundTruth(
      m, x0, [](double) { return VecX(VecX::Zero(3)); }, 0.4, 0.001, 10);

  std::vector<double> energy(traj.size()), dissipation_rate(traj.size());
  for (int i = 0; i < traj.size(); ++i) {
    const VecX q = traj.states[i].head(m.nq());
    const VecX qd = traj.states[i].tail(m.nq());
    energy[i] = model::TotalEnergy(m, q, qd);
    dissipation_rate[i] = qd.dot(m.d_diag.cwiseProduct(qd));
  }
  for (int i = 1; i < traj.size(); ++i) {
    EXPECT_LE(energy[i], energy[i - 1] + 1e-12);
  }
  // Simpson quadrature of qd^T D qd against the energy decrement.
  double integral = 0.0;
  const double h = 0.001;
  int last = 0;
  for (int i = 0; i + 2 < traj.size(); i += 2) {
    integral += h / 3.0 *
                (dissipation_rate[i] + 4.0 * dissipation_rate[i + 1] + dissipation_rate[i + 2]);
    last = i + 2;
  }
  const double decrement = energy.front() - energy[last];
  EXPECT_NEAR(integral, decrement, 1e-4 * decrement);
}

}  // namespace
}  // namespace flexmpc
