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

#ifndef FLEXMPC_OCP_QP_HPP_
#define FLEXMPC_OCP_QP_HPP_

#include <Eigen/Dense>

#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/ocp/riccati.hpp"
#include "flexmpc/ocp/types.hpp"

namespace flexmpc::ocp {

/// One stage of the inequality-constrained QP
///   min  sum_k 1/2 x'qx + v'sx + 1/2 v'rv + gx'x + gv'v
///   s.t. dynamics / initial state / terminal rows (see RiccatiStage),
///        cx x + cv v <= d,
/// solved over stage variables x (state delta) and v (inputs/slacks).
struct QpStage {
  MatX q, s, r;
  VecX gx, gv;
  MatX a, b;
  VecX c;
  MatX cx, cv;
  VecX d;

  int nx() const { return static_cast<int>(q.rows()); }
  int nv() const { return static_cast<int>(r.rows()); }
  int nineq() const { return static_cast<int>(d.size()); }
};

struct QpProblem {
  std::vector<QpStage> stages;  // N+1 entries; last one has no dynamics
  VecX x0;
  MatX e_term;  // may have zero rows
  VecX h_term;
};

struct QpSolution {
  std::vector<VecX> x, v;
  std::vector<VecX> ineq_dual;  // lambda >= 0 per stage row
  std::vector<VecX> eq_dual;    // costates per stage
  VecX term_dual;
  int iterations = 0;
  double kkt = kInf;
  bool converged = false;
};

/// Primal-dual interior-point method on the stage-structured QP. Each
/// iteration reduces the inequality block to barrier terms on the stage
/// Hessians and solves the equality-constrained core by the Riccati
/// factorization (predictor + corrector share one factorization).
class StageQpSolver {
 public:
  explicit StageQpSolver(IpmSettings settings = {}) : settings_(settings) {}

  QpSolution Solve(const QpProblem& qp) {
    const int count = static_cast<int>(qp.stages.size());
    const int n_last = count - 1;

    // Primal/dual iterates.
    std::vector<VecX> x(count), v(count), lam(count), slack(count);
    int total_rows = 0;
    for (int k = 0; k < count; ++k) {
      const QpStage& st = qp.stages[k];
      x[k] = VecX::Zero(st.nx());
      v[k] = VecX::Zero(st.nv());
      lam[k] = VecX::Ones(st.nineq());
      slack[k] = VecX::Ones(st.nineq());
      total_rows += st.nineq();
    }
    x[0] = qp.x0;
    for (int k = 0; k < count; ++k) {
      const QpStage& st = qp.stages[k];
      for (int i = 0; i < st.nineq(); ++i) {
        const double gap = st.d[i] - st.cx.row(i).dot(x[k]) - st.cv.row(i).dot(v[k]);
        slack[k][i] = std::max(1.0, gap);
      }
    }

    // Gradient scale for the relative stationarity test.
    double grad_scale = 1.0;
    for (const QpStage& st : qp.stages) {
      grad_scale = std::max({grad_scale, st.gx.lpNorm<Eigen::Infinity>(),
                             st.gv.size() ? st.gv.lpNorm<Eigen::Infinity>() : 0.0});
    }

    std::vector<RiccatiStage> rs(count);
    RiccatiKkt kkt_solver;
    QpSolution sol;
    sol.x = x;
    sol.v = v;
    sol.ineq_dual = lam;
    sol.eq_dual.assign(count, VecX());

    for (int iter = 0; iter < settings_.max_iters; ++iter) {
      // Residuals and duality measure.
      double mu = 0.0;
      for (int k = 0; k < count; ++k) mu += slack[k].dot(lam[k]);
      if (total_rows > 0) mu /= total_rows;

      const double stat_res = StationarityResidual(qp, x, v, lam, sol);
      double prim_eq = (x[0] - qp.x0).lpNorm<Eigen::Infinity>();
      for (int k = 0; k < n_last; ++k) {
        const QpStage& st = qp.stages[k];
        prim_eq = std::max(prim_eq, (st.a * x[k] + st.b * v[k] + st.c - x[k + 1])
                                        .lpNorm<Eigen::Infinity>());
      }
      if (qp.e_term.rows() > 0) {
        prim_eq = std::max(prim_eq,
                           (qp.e_term * x[n_last] - qp.h_term).lpNorm<Eigen::Infinity>());
      }
      double prim_ineq = 0.0;
      for (int k = 0; k < count; ++k) {
        const QpStage& st = qp.stages[k];
        if (st.nineq() == 0) continue;
        prim_ineq = std::max(
            prim_ineq,
            (st.cx * x[k] + st.cv * v[k] + slack[k] - st.d).lpNorm<Eigen::Infinity>());
      }
      sol.kkt = std::max({stat_res / grad_scale, prim_eq, prim_ineq, mu / grad_scale});
      sol.iterations = iter;
      if (sol.kkt <= settings_.kkt_tol) {
        sol.converged = true;
        break;
      }

      // Barrier-reduced stage data (quadratic part).
      for (int k = 0; k < count; ++k) {
        const QpStage& st = qp.stages[k];
        rs[k].q = st.q;
        rs[k].s = st.s;
        rs[k].r = st.r;
        rs[k].a = st.a;
        rs[k].b = st.b;
        if (st.nineq() > 0) {
          const VecX dscale = (lam[k].array() / slack[k].array()).matrix();
          rs[k].q += st.cx.transpose() * dscale.asDiagonal() * st.cx;
          rs[k].s += st.cv.transpose() * dscale.asDiagonal() * st.cx;
          rs[k].r += st.cv.transpose() * dscale.asDiagonal() * st.cv;
        }
      }
      kkt_solver.Factor(rs, qp.e_term, settings_.reg);

      // Two passes: affine predictor, then Mehrotra-corrected step.
      VecX dx0 = qp.x0 - x[0];
      std::vector<VecX> rp(count);  // inequality primal residuals
      for (int k = 0; k < count; ++k) {
        const QpStage& st = qp.stages[k];
        rp[k] = st.nineq() ? VecX(st.cx * x[k] + st.cv * v[k] + slack[k] - st.d)
                           : VecX();
      }

      std::vector<VecX> dx_a, dv_a, ds_a, dl_a;
      SolveNewton(qp, x, v, lam, slack, rp, dx0, /*comp_rhs=*/nullptr, &kkt_solver, rs,
                  &dx_a, &dv_a, &ds_a, &dl_a, &sol);
      const double alpha_aff = MaxStep(slack, ds_a, lam, dl_a, 1.0);
      double mu_aff = 0.0;
      for (int k = 0; k < count; ++k) {
        if (slack[k].size() == 0) continue;
        mu_aff += (slack[k] + alpha_aff * ds_a[k]).dot(lam[k] + alpha_aff * dl_a[k]);
      }
      if (total_rows > 0) mu_aff /= total_rows;
      const double sigma =
          mu > 0 ? std::pow(std::min(1.0, std::max(0.0, mu_aff / mu)), 3) : 0.0;

      // Corrector right-hand side: lambda s -> sigma mu - ds dl.
      std::vector<VecX> comp(count);
      for (int k = 0; k < count; ++k) {
        if (slack[k].size() == 0) {
          comp[k] = VecX();
          continue;
        }
        comp[k] = (lam[k].array() * slack[k].array() - sigma * mu +
                   ds_a[k].array() * dl_a[k].array())
                      .matrix();
      }
      std::vector<VecX> dx, dv, ds, dl;
      SolveNewton(qp, x, v, lam, slack, rp, dx0, &comp, &kkt_solver, rs, &dx, &dv, &ds,
                  &dl, &sol);

      const double alpha = MaxStep(slack, ds, lam, dl, settings_.boundary);
      for (int k = 0; k < count; ++k) {
        x[k] += alpha * dx[k];
        if (v[k].size()) v[k] += alpha * dv[k];
        if (slack[k].size()) {
          slack[k] += alpha * ds[k];
          lam[k] += alpha * dl[k];
        }
      }
      sol.x = x;
      sol.v = v;
      sol.ineq_dual = lam;
    }
    return sol;
  }

 private:
  /// Stationarity residual with the current equality duals in `sol`.
  static double StationarityResidual(const QpProblem& qp, const std::vector<VecX>& x,
                                     const std::vector<VecX>& v,
                                     const std::vector<VecX>& lam, const QpSolution& sol) {
    const int count = static_cast<int>(qp.stages.size());
    const int n_last = count - 1;
    if (sol.eq_dual[0].size() == 0) return kInf;  // no duals yet
    double res = 0.0;
    for (int k = 0; k < count; ++k) {
      const QpStage& st = qp.stages[k];
      VecX rx = st.q * x[k] + st.gx;
      if (st.nv() > 0) rx += st.s.transpose() * v[k];
      if (st.nineq() > 0) rx += st.cx.transpose() * lam[k];
      // Costate convention: y_k = dV_k/dx_k, so stationarity of x_k reads
      // (stage terms) + a' y_{k+1} - y_k = 0 for k < N (y_0 doubles as the
      // initial-condition multiplier), and at N: (terms) + e' mu - y_N = 0.
      rx -= sol.eq_dual[k];
      if (k < n_last) rx += qp.stages[k].a.transpose() * sol.eq_dual[k + 1];
      if (k == n_last && qp.e_term.rows() > 0) {
        // e' mu is folded into y_N by the solver; nothing extra here.
      }
      res = std::max(res, rx.lpNorm<Eigen::Infinity>());

      if (st.nv() > 0) {
        VecX rv = st.s * x[k] + st.r * v[k] + st.gv;
        if (st.nineq() > 0) rv += st.cv.transpose() * lam[k];
        if (k < n_last) rv += st.b.transpose() * sol.eq_dual[k + 1];
        res = std::max(res, rv.lpNorm<Eigen::Infinity>());
      }
    }
    return res;
  }

  void SolveNewton(const QpProblem& qp, const std::vector<VecX>& x,
                   const std::vector<VecX>& v, const std::vector<VecX>& lam,
                   const std::vector<VecX>& slack, const std::vector<VecX>& rp,
                   const VecX& dx0, const std::vector<VecX>* comp_rhs,
                   RiccatiKkt* kkt_solver, std::vector<RiccatiStage>& rs,
                   std::vector<VecX>* dx, std::vector<VecX>* dv, std::vector<VecX>* ds,
                   std::vector<VecX>* dl, QpSolution* sol) const {
    const int count = static_cast<int>(qp.stages.size());
    const int n_last = count - 1;

    // Affine data: gradients fold the current iterate and the eliminated
    // inequality block; dynamics rhs carries the equality residuals.
    for (int k = 0; k < count; ++k) {
      const QpStage& st = qp.stages[k];
      VecX gx = st.q * x[k] + st.gx;
      VecX gv = st.nv() ? VecX(st.r * v[k] + st.s * x[k] + st.gv) : VecX();
      if (st.nv() > 0) gx += st.s.transpose() * v[k];
      if (st.nineq() > 0) {
        // dl = (comp-part + lam*(rp + C dw)) / s; constant part enters the
        // gradient as C' dl_const with dl_const = (lam*rp - comp)/s.
        VecX comp = comp_rhs ? (*comp_rhs)[k]
                             : VecX((lam[k].array() * slack[k].array()).matrix());
        const VecX dl_const =
            ((lam[k].array() * rp[k].array() - comp.array()) / slack[k].array()).matrix();
        const VecX lam_new = lam[k] + dl_const;
        gx.noalias() = st.q * x[k] + st.gx + st.cx.transpose() * lam_new;
        if (st.nv() > 0) {
          gx += st.s.transpose() * v[k];
          gv.noalias() = st.r * v[k] + st.s * x[k] + st.gv + st.cv.transpose() * lam_new;
        }
      }
      rs[k].gx = gx;
      rs[k].gv = gv;
      rs[k].c = k < n_last
                    ? VecX(qp.stages[k].a * x[k] + qp.stages[k].b * v[k] + qp.stages[k].c -
                           x[k + 1])
                    : VecX();
    }
    VecX h = qp.e_term.rows() > 0
                 ? VecX(qp.h_term - qp.e_term * x[n_last])
                 : VecX();
    const RiccatiSolution rsol = kkt_solver->Solve(dx0, h);

    dx->assign(count, VecX());
    dv->assign(count, VecX());
    ds->assign(count, VecX());
    dl->assign(count, VecX());
    for (int k = 0; k < count; ++k) {
      const QpStage& st = qp.stages[k];
      (*dx)[k] = rsol.x[k];
      (*dv)[k] = rsol.v[k];
      if (st.nineq() > 0) {
        const VecX cdw = st.cx * rsol.x[k] + (st.nv() ? VecX(st.cv * rsol.v[k])
                                                      : VecX::Zero(st.nineq()));
        (*ds)[k] = -rp[k] - cdw;
        VecX comp = comp_rhs ? (*comp_rhs)[k]
                             : VecX((lam[k].array() * slack[k].array()).matrix());
        (*dl)[k] = ((-comp.array() - lam[k].array() * (*ds)[k].array()) /
                    slack[k].array())
                       .matrix();
      }
    }
    // Total equality duals come out of the Riccati pass directly.
    sol->eq_dual = rsol.y;
    sol->term_dual = rsol.term_dual;
  }

  static double MaxStep(const std::vector<VecX>& s, const std::vector<VecX>& ds,
                        const std::vector<VecX>& lam, const std::vector<VecX>& dl,
                        double boundary) {
    double alpha = 1.0;
    for (size_t k = 0; k < s.size(); ++k) {
      for (int i = 0; i < s[k].size(); ++i) {
        if (ds[k][i] < 0) alpha = std::min(alpha, -boundary * s[k][i] / ds[k][i]);
        if (dl[k][i] < 0) alpha = std::min(alpha, -boundary * lam[k][i] / dl[k][i]);
      }
    }
    return alpha;
  }

  IpmSettings settings_;
};

}  // namespace flexmpc::ocp

#endif  // FLEXMPC_OCP_QP_HPP_
