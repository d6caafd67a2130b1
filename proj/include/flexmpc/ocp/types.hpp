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

#ifndef FLEXMPC_OCP_TYPES_HPP_
#define FLEXMPC_OCP_TYPES_HPP_

#include <limits>
#include <string>
#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/ode/integrators.hpp"

namespace flexmpc::ocp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cost weights of the tracking objective. Squared norms are weighted as
/// |v|_W^2 = v^T W v; slack columns carry both the squared and the L1 term.
struct OcpWeights {
  // State weights, stage and terminal, by block.
  double w_qa = 0.01, w_qp = 1e-3, w_qda = 0.1, w_qdp = 10.0;
  double w_qa_term = 0.1, w_qp_term = 1e-3, w_qda_term = 1.0, w_qdp_term = 10.0;
  Vec3 r_first = Vec3(0.1, 1.0, 1.0);  // control weight at stage 0
  Vec3 r = Vec3(0.1, 1.0, 1.0);        // control weight at stages >= 1
  Vec3 p = Vec3::Constant(3e3);        // EE tracking, stage
  Vec3 p_term = Vec3::Constant(3e4);   // EE tracking, terminal
  Eigen::Vector2d s_l2 = Eigen::Vector2d(1e3, 3e5);  // slack squared weights
  Eigen::Vector2d s_l1 = Eigen::Vector2d(1e1, 1e6);  // slack L1 weights

  void Validate() const {
    require(w_qa >= 0 && w_qp >= 0 && w_qda >= 0 && w_qdp >= 0 && w_qa_term >= 0 &&
                w_qp_term >= 0 && w_qda_term >= 0 && w_qdp_term >= 0,
            "OcpWeights: state weights must be >= 0");
    require(r.minCoeff() >= 0 && r_first.minCoeff() >= 0 && p.minCoeff() >= 0 &&
                p_term.minCoeff() >= 0,
            "OcpWeights: control/EE weights must be >= 0");
    require(s_l2.minCoeff() > 0 && s_l1.minCoeff() > 0,
            "OcpWeights: slack weights must be > 0");
  }
};

/// Box bounds after constraint tightening. Entries may be +/-inf.
struct OcpBounds {
  Vec3 u_lb = Vec3(-20, -10, -10);
  Vec3 u_ub = Vec3(20, 10, 10);
  Vec3 qd_a_lb = Vec3(-1.5, -2.5, -2.5);
  Vec3 qd_a_ub = Vec3(1.5, 2.5, 2.5);
  Vec3 z_lb = Vec3(-kInf, -kInf, -kInf);
  Vec3 z_ub = Vec3(kInf, -0.02, kInf);
  // Margins the tightening used, kept for reporting.
  double delta_qd = 1.0, delta_q = 0.0, delta_z = 0.02;

  void Validate() const {
    require((u_lb.array() <= u_ub.array()).all(), "OcpBounds: u bounds crossed");
    require((qd_a_lb.array() <= qd_a_ub.array()).all(),
            "OcpBounds: velocity bounds crossed after tightening");
    require((z_lb.array() <= z_ub.array()).all(),
            "OcpBounds: EE bounds crossed after tightening");
  }
};

struct OcpReferences {
  std::vector<VecX> x_ref;  // size N+1
  std::vector<VecX> u_ref;  // size N
  std::vector<Vec3> z_ref;  // size N+1
};

struct SqpSettings {
  int max_iters = 50;
  double kkt_tol = 1e-6;
  double step_tol = 1e-8;
  int max_line_search = 20;
  double armijo = 1e-4;
};

struct IpmSettings {
  double kkt_tol = 1e-6;
  int max_iters = 80;
  double reg = 1e-9;
  double boundary = 0.995;
};

struct OcpSolution {
  std::vector<VecX> x;      // N+1 states
  std::vector<VecX> u;      // N controls
  std::vector<Vec3> z;      // N+1 algebraic EE positions (reported)
  std::vector<Eigen::Vector2d> sigma;  // N+1 slacks (vel, obstacle)
  std::vector<double> kkt_history;     // per SQP iteration
  int iterations = 0;
  double kkt = kInf;
  double wall_time_ms = 0.0;
  bool converged = false;
  std::string status;

  double max_defect = kInf;  // |F(x_{k+1}, x_k, u_k)|_inf at the solution
};

}  // namespace flexmpc::ocp

#endif  // FLEXMPC_OCP_TYPES_HPP_
