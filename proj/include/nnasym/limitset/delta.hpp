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

// Cancellation condition for redundant units of one true unit: does a weight
// vector q on the simplex exist with sum_j sqrt(q_j) (nu_j, eta_j) = 0?
// Substituting r_j = sqrt(q_j) turns it into the cone question
// "exists r >= 0, r != 0, sum_j r_j v_j = 0", decided by a phase-one simplex
// over {r >= 0, sum r = 1, V r = 0}.

#include <cmath>
#include <optional>
#include <vector>

#include "nnasym/errors.hpp"
#include "nnasym/model.hpp"

namespace nnasym {

namespace detail {

/// Phase-one simplex for {r >= 0 : A r = rhs} with rhs >= 0, Bland's rule.
/// Returns a feasible r or nullopt.
inline std::optional<Vector> phase_one(const Matrix& A, const Vector& rhs, double tol) {
  const Eigen::Index rows = A.rows(), n = A.cols();
  // Tableau columns: n structural, rows artificial, then the right-hand side.
  Matrix T = Matrix::Zero(rows + 1, n + rows + 1);
  T.topLeftCorner(rows, n) = A;
  T.block(0, n, rows, rows).setIdentity();
  T.col(n + rows).head(rows) = rhs;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) basis[static_cast<std::size_t>(r)] = n + r;
  // Objective row holds reduced costs of "minimize sum of artificials".
  for (Eigen::Index r = 0; r < rows; ++r) T.row(rows) -= T.row(r);
  for (Eigen::Index r = 0; r < rows; ++r) T(rows, n + r) = 0.0;

  for (int iter = 0; iter < 1000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < n + rows; ++c)
      if (T(rows, c) < -tol) {
        enter = c;
        break;
      }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (T(r, enter) > tol) {
        const double ratio = T(r, n + rows) / T(r, enter);
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase one
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index r = 0; r <= rows; ++r)
      if (r != leave && T(r, enter) != 0.0) T.row(r) -= T(r, enter) * T.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  if (-T(rows, n + rows) > tol * 10.0) return std::nullopt;
  Vector r = Vector::Zero(n);
  for (Eigen::Index row = 0; row < rows; ++row) {
    const auto c = basis[static_cast<std::size_t>(row)];
    if (c < n) r[c] = std::max(0.0, T(row, n + rows));
    else if (T(row, n + rows) > tol * 10.0) return std::nullopt;
  }
  return r;
}

}  // namespace detail

struct DeltaWitness {
  bool feasible = false;
  Vector q;  // simplex weights; sum sqrt(q_j) v_j = 0 when feasible
};

inline DeltaWitness delta_witness(const std::vector<Vector>& nu, const std::vector<double>& eta) {
  if (nu.size() != eta.size()) throw DimensionMismatch("delta_feasibility lists", nu.size(), eta.size());
  if (nu.empty()) throw InvalidInput("delta_feasibility needs at least one unit");
  const std::size_t m = nu.size();
  const auto d = nu[0].size();
  Matrix V(d + 1, static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (nu[j].size() != d) throw DimensionMismatch("delta_feasibility nu", static_cast<std::size_t>(d), static_cast<std::size_t>(nu[j].size()));
    V.col(static_cast<Eigen::Index>(j)).head(d) = nu[j];
    V(d, static_cast<Eigen::Index>(j)) = eta[j];
  }
  DeltaWitness out;
  // A vanishing v_j is its own witness (q = e_j).
  for (std::size_t j = 0; j < m; ++j) {
    if (V.col(static_cast<Eigen::Index>(j)).norm() <= 1e-14) {
      out.feasible = true;
      out.q = Vector::Zero(static_cast<Eigen::Index>(m));
      out.q[static_cast<Eigen::Index>(j)] = 1.0;
      return out;
    }
  }
  // Positive rescaling of each column leaves the cone question unchanged.
  Vector scale(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j) {
    scale[j] = V.col(j).norm();
    V.col(j) /= scale[j];
  }
  Matrix A(d + 2, static_cast<Eigen::Index>(m));
  A.topRows(d + 1) = V;
  A.row(d + 1).setOnes();
  Vector rhs = Vector::Zero(d + 2);
  rhs[d + 1] = 1.0;
  const auto r = detail::phase_one(A, rhs, 1e-10);
  if (!r) return out;
  // Undo the column scaling, then normalize sum r_j^2 = 1.
  Vector rr = r->cwiseQuotient(scale);
  const double nrm = rr.norm();
  if (!(nrm > 0.0)) return out;
  rr /= nrm;
  out.feasible = true;
  out.q = rr.cwiseProduct(rr);
  return out;
}

inline bool delta_feasibility(const std::vector<Vector>& nu, const std::vector<double>& eta) {
  return delta_witness(nu, eta).feasible;
}

}  // namespace nnasym
