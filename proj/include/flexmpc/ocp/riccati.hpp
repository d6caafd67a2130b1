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

#ifndef FLEXMPC_OCP_RICCATI_HPP_
#define FLEXMPC_OCP_RICCATI_HPP_

#include <Eigen/Dense>

#include <vector>

#include "flexmpc/common.hpp"
#include "flexmpc/ocp/types.hpp"

namespace flexmpc::ocp {

/// One stage of the equality-constrained stagewise QP
///   min  sum_k 1/2 x_k' q_k x_k + v_k' s_k x_k + 1/2 v_k' r_k v_k
///            + gx_k' x_k + gv_k' v_k
///   s.t. x_{k+1} = a_k x_k + b_k v_k + c_k,   x_0 fixed,
///        e_term x_N = h_term (optional).
/// The terminal stage has no dynamics; its v block may be empty.
struct RiccatiStage {
  MatX q;  // nx x nx, symmetric PSD (+ barrier terms)
  MatX s;  // nv x nx cross term
  MatX r;  // nv x nv, PD after regularization
  MatX a;  // nx x nx (unused at terminal stage)
  MatX b;  // nx x nv
  VecX gx, gv;
  VecX c;

  int nx() const { return static_cast<int>(q.rows()); }
  int nv() const { return static_cast<int>(r.rows()); }
};

struct RiccatiSolution {
  std::vector<VecX> x;  // N+1
  std::vector<VecX> v;  // N+1 (possibly empty blocks)
  /// Equality duals: y[k] is the costate dV_k/dx at x_k; y[0] doubles as the
  /// multiplier of the initial-state constraint.
  std::vector<VecX> y;
  VecX term_dual;  // multiplier of e_term x_N = h_term
};

/// Riccati-style block factorization of the stage-banded KKT system. The
/// quadratic data is factored once; affine solves (gradients, dynamics
/// residuals, initial state, terminal right-hand side) reuse it. A terminal
/// equality is handled by a dual Schur complement built from one extra
/// gradient pass per terminal-constraint row.
class RiccatiKkt {
 public:
  /// Factor the backward recursion. `e_term` may have zero rows.
  /// Throws NumericError if a stage Hessian fails to factor or the terminal
  /// rows are unreachable.
  void Factor(const std::vector<RiccatiStage>& stages, const MatX& e_term, double reg) {
    const int count = static_cast<int>(stages.size());
    require(count >= 1, "RiccatiKkt: empty problem");
    n_ = count - 1;
    stages_ = &stages;
    e_term_ = e_term;

    p_.assign(count, MatX());
    gain_.assign(count, MatX());
    mcross_.assign(count, MatX());
    rfac_.assign(count, Eigen::LDLT<MatX>());

    // Terminal stage: eliminate its v block (if any).
    {
      const RiccatiStage& st = stages[n_];
      if (st.nv() > 0) {
        MatX rbar = st.r;
        rbar.diagonal().array() += reg;
        rfac_[n_].compute(rbar);
        if (rfac_[n_].info() != Eigen::Success) {
          throw NumericError("RiccatiKkt: terminal Hessian factorization failed");
        }
        gain_[n_] = -rfac_[n_].solve(st.s);
        p_[n_] = st.q + st.s.transpose() * gain_[n_];
        mcross_[n_] = st.s;
      } else {
        p_[n_] = st.q;
      }
      p_[n_] = 0.5 * (p_[n_] + p_[n_].transpose()).eval();
    }

    for (int k = n_ - 1; k >= 0; --k) {
      const RiccatiStage& st = stages[k];
      const MatX pa = p_[k + 1] * st.a;
      const MatX pb = p_[k + 1] * st.b;
      MatX rbar = st.r + st.b.transpose() * pb;
      rbar.diagonal().array() += reg;
      rfac_[k].compute(rbar);
      if (rfac_[k].info() != Eigen::Success) {
        throw NumericError("RiccatiKkt: stage Hessian factorization failed at stage " +
                           std::to_string(k));
      }
      mcross_[k] = st.s + st.b.transpose() * pa;
      gain_[k] = -rfac_[k].solve(mcross_[k]);
      p_[k] = st.q + st.a.transpose() * pa + mcross_[k].transpose() * gain_[k];
      p_[k] = 0.5 * (p_[k] + p_[k].transpose()).eval();
    }

    // Terminal-equality Schur data: one gradient pass per constraint row.
    const int ne = static_cast<int>(e_term.rows());
    seed_solutions_.clear();
    if (ne > 0) {
      const int nx = stages[n_].nx();
      MatX schur(ne, ne);
      seed_solutions_.resize(ne);
      for (int i = 0; i < ne; ++i) {
        VecX seed_grad = e_term.row(i).transpose();
        seed_solutions_[i] = AffinePass(VecX::Zero(nx), &seed_grad);
        schur.col(i) = e_term * seed_solutions_[i].x[n_];
      }
      schur_lu_.compute(schur);
      if (std::abs(schur_lu_.determinant()) < 1e-300) {
        throw NumericError("RiccatiKkt: terminal equality rows unreachable");
      }
    }
  }

  /// Solve for the current affine data (stages carry gx, gv, c) plus the
  /// fixed initial state and terminal right-hand side.
  RiccatiSolution Solve(const VecX& x0, const VecX& h_term) const {
    RiccatiSolution base = AffinePass(x0, nullptr);
    const int ne = static_cast<int>(e_term_.rows());
    if (ne == 0) return base;

    const VecX rhs = h_term - e_term_ * base.x[n_];
    const VecX mu = schur_lu_.solve(rhs);
    for (int i = 0; i < ne; ++i) {
      for (int k = 0; k <= n_; ++k) {
        base.x[k] += mu[i] * seed_solutions_[i].x[k];
        if (base.v[k].size() > 0) base.v[k] += mu[i] * seed_solutions_[i].v[k];
        base.y[k] += mu[i] * seed_solutions_[i].y[k];
      }
    }
    base.term_dual = mu;
    return base;
  }

 private:
  /// Backward gradient recursion + forward rollout for one affine right-hand
  /// side. A seed pass (extra_terminal_grad set) replaces all affine data by
  /// a unit gradient on x_N, producing one Schur-complement column.
  RiccatiSolution AffinePass(const VecX& x0, const VecX* extra_terminal_grad) const {
    const auto& stages = *stages_;
    const int count = n_ + 1;
    const bool seed_pass = extra_terminal_grad != nullptr;

    std::vector<VecX> pvec(count), ff(count);
    // Terminal stage.
    {
      const RiccatiStage& st = stages[n_];
      VecX gx = seed_pass ? VecX(*extra_terminal_grad) : st.gx;
      if (st.nv() > 0) {
        const VecX gv = seed_pass ? VecX::Zero(st.nv()) : st.gv;
        ff[n_] = -rfac_[n_].solve(gv);
        pvec[n_] = gx + mcross_[n_].transpose() * ff[n_];
      } else {
        pvec[n_] = gx;
      }
    }
    for (int k = n_ - 1; k >= 0; --k) {
      const RiccatiStage& st = stages[k];
      const VecX gx = seed_pass ? VecX::Zero(st.nx()) : st.gx;
      const VecX gv = seed_pass ? VecX::Zero(st.nv()) : st.gv;
      const VecX c = seed_pass ? VecX::Zero(st.nx()) : st.c;
      const VecX pc = p_[k + 1] * c + pvec[k + 1];
      const VecX m = gv + st.b.transpose() * pc;
      ff[k] = -rfac_[k].solve(m);
      pvec[k] = gx + st.a.transpose() * pc + mcross_[k].transpose() * ff[k];
    }

    RiccatiSolution sol;
    sol.x.resize(count);
    sol.v.resize(count);
    sol.y.resize(count);
    sol.x[0] = x0;
    for (int k = 0; k < n_; ++k) {
      const RiccatiStage& st = stages[k];
      sol.v[k] = gain_[k] * sol.x[k] + ff[k];
      const VecX c = seed_pass ? VecX::Zero(st.nx()) : st.c;
      sol.x[k + 1] = st.a * sol.x[k] + st.b * sol.v[k] + c;
      sol.y[k] = p_[k] * sol.x[k] + pvec[k];
    }
    if (stages[n_].nv() > 0) {
      sol.v[n_] = gain_[n_] * sol.x[n_] + ff[n_];
    } else {
      sol.v[n_] = VecX();
    }
    sol.y[n_] = p_[n_] * sol.x[n_] + pvec[n_];
    return sol;
  }

  const std::vector<RiccatiStage>* stages_ = nullptr;
  int n_ = 0;
  MatX e_term_;
  std::vector<MatX> p_, gain_, mcross_;
  std::vector<Eigen::LDLT<MatX>> rfac_;
  std::vector<RiccatiSolution> seed_solutions_;
  Eigen::PartialPivLU<MatX> schur_lu_;
};

}  // namespace flexmpc::ocp

#endif  // FLEXMPC_OCP_RICCATI_HPP_
