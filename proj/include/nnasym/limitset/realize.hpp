// Copyright 2026 The nnasym Authors
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

#pragma once

// Parametric paths theta(u) whose regression function leaves f_0 along a
// prescribed limit direction:  ||f_theta(u) - f_0 - u d||_2 = o(u).
//
// For a class of m redundant units around true unit i the second-order part
// M_i = sum_j v_j v_j' is re-spread over the class with equal shares q_j = 1/m
// and deviations v~_j satisfying sum_j v~_j = 0 and sum_j v~_j v~_j' = M_i
// (possible exactly when rank M_i <= m - 1). Those deviations are scaled by
// sqrt(u), so first-order terms cancel and the quadratic terms are of order u.

#include <Eigen/Eigenvalues>

#include <cmath>

#include "nnasym/errors.hpp"
#include "nnasym/limitset/direction.hpp"
#include "nnasym/model.hpp"

namespace nnasym {

/// Orthonormal m x (m-1) Helmert columns, all orthogonal to the ones vector.
inline Matrix helmert_columns(std::size_t m) {
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m > 0 ? m - 1 : 0));
  for (std::size_t c = 1; c < m; ++c) {
    const double s = 1.0 / std::sqrt(static_cast<double>(c * (c + 1)));
    for (std::size_t r = 0; r < c; ++r) H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = s;
    H(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c - 1)) = -static_cast<double>(c) * s;
  }
  return H;
}

/// (d+1) x m deviations with zero column sum and V V' = M.
inline Matrix spread_second_order(const Matrix& M, std::size_t m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const Vector& lam = es.eigenvalues();
  const double top = std::max(0.0, lam.maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index e = 0; e < lam.size(); ++e) {
    if (lam[e] < -1e-10 * std::max(1.0, top)) throw InvalidInput("second-order matrix is not positive semidefinite");
    if (lam[e] > 1e-13 * std::max(1.0, top)) keep.push_back(e);
  }
  if (keep.size() + 1 > m && !keep.empty())
    throw InvalidInput("second-order part of rank " + std::to_string(keep.size()) + " cannot be realized by " +
                       std::to_string(m) + " units");
  Matrix W(M.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    W.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(lam[keep[c]]);
  const Matrix H = helmert_columns(m);
  return W * H.leftCols(static_cast<Eigen::Index>(keep.size())).transpose();
}

/// theta(u) for the direction normalized to unit L2 norm; `dir_norm` is the
/// L2(Q) norm of the un-normalized direction.
inline MlpParams realize_direction(const LimitDirection& dir, double u, const MlpParams& truth,
                                   const ParamSpace& space, double dir_norm) {
  dir.validate();
  check_minimal_truth(truth);
  if (!(u > 0.0)) throw InvalidInput("realize_direction needs u > 0");
  if (!(dir_norm > 0.0)) throw Degenerate("direction has zero norm");
  if (dir.partition.k0 != truth.k()) throw DimensionMismatch("direction k0", truth.k(), dir.partition.k0);
  if (space.k != dir.partition.k() || space.d != truth.d())
    throw InvalidInput("parameter space does not match the direction's partition");
  for (std::size_t i = 0; i < dir.partition.k0; ++i) {
    if (!dir.delta[i]) continue;
    std::vector<Vector> n;
    std::vector<double> e;
    for (auto j : dir.partition.members(i)) {
      n.push_back(dir.nu[j]);
      e.push_back(dir.eta[j]);
    }
    if (!delta_feasibility(n, e))
      throw InvalidInput("true unit " + std::to_string(i + 1) + " is flagged second-order but its (nu, eta) admit no cancelling weights");
  }

  const double t = u / dir_norm;  // coefficient scale of the un-normalized direction
  const std::size_t d = truth.d();
  const auto di = static_cast<Eigen::Index>(d);
  MlpParams p = MlpParams::zeros(dir.partition.k(), d);
  p.beta = truth.beta + t * dir.gamma;

  for (std::size_t i = 0; i < dir.partition.k0; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto members = dir.partition.members(i);
    const std::size_t m = members.size();
    const double a0 = truth.units[i].a;
    const double share = 1.0 / static_cast<double>(m);
    Matrix V = Matrix::Zero(di + 1, static_cast<Eigen::Index>(m));
    if (dir.delta[i]) {
      const Matrix M = second_order_matrix(dir, i);
      if (M.norm() > 0.0) {
        if (m < 2) throw InvalidInput("second-order direction needs at least two units in the class");
        V = spread_second_order(M, m);
      }
    }
    const double total = a0 + t * dir.eps[ii];
    if (total < 0.0) throw InvalidInput("u too large: class weight would become negative");
    Vector shift(di + 1);
    shift.head(di) = dir.zeta.row(ii).transpose() * (t / a0);
    shift[di] = dir.alpha[ii] * t / a0;
    const double root = std::sqrt(t * 2.0 / a0) / std::sqrt(share);
    for (std::size_t c = 0; c < m; ++c) {
      auto& unit = p.units[members[c]];
      const Vector dev = shift + root * V.col(static_cast<Eigen::Index>(c));
      unit.a = total * share;
      unit.w = truth.units[i].w + dev.head(di);
      unit.b = truth.units[i].b + dev[di];
    }
  }
  for (auto j : dir.partition.units_with(UnitRole::Free)) {
    p.units[j].a = t * dir.mu[j];
    p.units[j].w = dir.free_w[j];
    p.units[j].b = dir.free_b[j];
  }
  // Zero-weight units stay at (a, w, b) = 0 and contribute nothing.
  if (space.boundary_distance(p) < 0.0) throw InvalidInput("u too large: path leaves the parameter ball");
  return p;
}

}  // namespace nnasym
