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

#ifndef FLEXMPC_ODE_TABLEAU_HPP_
#define FLEXMPC_ODE_TABLEAU_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "flexmpc/common.hpp"

namespace flexmpc::ode {

/// Butcher tableau of an s-stage Runge-Kutta method. Collocation tableaus
/// are generated from their nodes, so c_i = sum_j a_ij holds by
/// construction.
struct ButcherTableau {
  std::string name;
  int stages = 0;
  int order = 0;
  MatX a;
  VecX b;
  VecX c;

  /// Collocation tableau from distinct nodes c in (0, 1]: row i of `a`
  /// integrates the Lagrange basis to c_i, and `b` integrates it to 1.
  static ButcherTableau FromCollocationNodes(const VecX& nodes, int order,
                                             const std::string& name) {
    const int s = static_cast<int>(nodes.size());
    // Moment conditions sum_j w_j c_j^(k-1) = integral target, solved through
    // the Vandermonde system.
    MatX vandermonde(s, s);
    for (int k = 0; k < s; ++k) {
      for (int j = 0; j < s; ++j) vandermonde(k, j) = std::pow(nodes[j], k);
    }
    const Eigen::PartialPivLU<MatX> lu(vandermonde);

    ButcherTableau tab;
    tab.name = name;
    tab.stages = s;
    tab.order = order;
    tab.c = nodes;
    tab.a.resize(s, s);
    tab.b.resize(s);
    VecX rhs(s);
    for (int i = 0; i < s; ++i) {
      for (int k = 0; k < s; ++k) rhs[k] = std::pow(nodes[i], k + 1) / (k + 1);
      tab.a.row(i) = lu.solve(rhs).transpose();
    }
    for (int k = 0; k < s; ++k) rhs[k] = 1.0 / (k + 1);
    tab.b = lu.solve(rhs);
    return tab;
  }

  /// 3-stage Radau IIA, order 5; stiffly accurate (b equals the last row
  /// of a), used for the estimator and the ground-truth simulator.
  static ButcherTableau RadauIIA3() {
    const double s6 = std::sqrt(6.0);
    VecX c(3);
    c << (4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0;
    return FromCollocationNodes(c, 5, "radau-iia-3");
  }

  /// 4-stage Gauss-Legendre, order 8, the OCP discretization default.
  static ButcherTableau GaussLegendre4() {
    const double r = 2.0 / 7.0 * std::sqrt(6.0 / 5.0);
    const double w1 = 0.5 * std::sqrt(3.0 / 7.0 + r);
    const double w2 = 0.5 * std::sqrt(3.0 / 7.0 - r);
    VecX c(4);
    c << 0.5 - w1, 0.5 - w2, 0.5 + w2, 0.5 + w1;
    return FromCollocationNodes(c, 8, "gauss-legendre-4");
  }

  static ButcherTableau ByName(const std::string& name) {
    if (name == "radau-iia-3") return RadauIIA3();
    if (name == "gauss-legendre-4") return GaussLegendre4();
    throw ArgumentError("unknown tableau: " + name);
  }

  /// Stability function R(z) = 1 + z b^T (I - z A)^{-1} 1.
  std::complex<double> Stability(std::complex<double> z) const {
    using CMat = Eigen::MatrixXcd;
    using CVec = Eigen::VectorXcd;
    const CMat m = CMat::Identity(stages, stages) - z * a.cast<std::complex<double>>();
    const CVec ones = CVec::Ones(stages);
    return 1.0 + z * (b.cast<std::complex<double>>().dot(m.partialPivLu().solve(ones)));
  }
};

}  // namespace flexmpc::ode

#endif  // FLEXMPC_ODE_TABLEAU_HPP_
