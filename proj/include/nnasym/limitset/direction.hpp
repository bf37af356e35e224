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

// A limit direction is the un-normalized function
//
//   gamma + sum_i eps_i phi(z_i) + sum_i phi'(z_i) (zeta_i' x + alpha_i)
//         + sum_i delta(i) phi''(z_i) sum_{j in class i} (nu_j' x + eta_j)^2
//         + sum_{free j} mu_j phi(w_j' x + b_j),          z_i = w_i^0' x + b_i^0,
//
// mapped onto the unit L2(Q) sphere by f -> f / ||f||_2.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "nnasym/errors.hpp"
#include "nnasym/limitset/basis.hpp"
#include "nnasym/limitset/delta.hpp"
#include "nnasym/model.hpp"

namespace nnasym {

struct LimitDirection {
  Partition partition;
  double gamma = 0.0;
  Vector eps;                // k0
  Matrix zeta;               // k0 x d
  Vector alpha;              // k0
  std::vector<Vector> nu;    // per hidden unit, used by TrueUnit units
  std::vector<double> eta;   // per hidden unit, used by TrueUnit units
  std::vector<double> mu;    // per hidden unit, used by Free units, >= 0
  std::vector<Vector> free_w;
  std::vector<double> free_b;
  std::vector<bool> delta;   // per true unit

  /// All-zero direction shaped for `partition` in dimension d.
  static LimitDirection zeros(const Partition& partition, std::size_t d) {
    partition.validate();
    LimitDirection dir;
    dir.partition = partition;
    const auto k0 = static_cast<Eigen::Index>(partition.k0);
    const auto di = static_cast<Eigen::Index>(d);
    dir.eps = Vector::Zero(k0);
    dir.zeta = Matrix::Zero(k0, di);
    dir.alpha = Vector::Zero(k0);
    const std::size_t k = partition.k();
    dir.nu.assign(k, Vector::Zero(di));
    dir.eta.assign(k, 0.0);
    dir.mu.assign(k, 0.0);
    dir.free_w.assign(k, Vector::Zero(di));
    dir.free_b.assign(k, 0.0);
    dir.delta.assign(partition.k0, false);
    return dir;
  }

  std::size_t d() const noexcept { return static_cast<std::size_t>(zeta.cols()); }

  void validate() const {
    partition.validate();
    const std::size_t k = partition.k();
    if (static_cast<std::size_t>(eps.size()) != partition.k0 || static_cast<std::size_t>(alpha.size()) != partition.k0 ||
        static_cast<std::size_t>(zeta.rows()) != partition.k0 || delta.size() != partition.k0)
      throw InvalidInput("limit direction: per-true-unit coefficients do not match k0");
    if (nu.size() != k || eta.size() != k || mu.size() != k || free_w.size() != k || free_b.size() != k)
      throw InvalidInput("limit direction: per-unit coefficients do not match k");
    for (std::size_t j = 0; j < k; ++j) {
      if (partition.labels[j].role == UnitRole::Free && !(mu[j] >= 0.0))
        throw InvalidInput("limit direction: free-unit weights mu must be >= 0");
      if (static_cast<std::size_t>(nu[j].size()) != d())
        throw DimensionMismatch("limit direction nu", d(), static_cast<std::size_t>(nu[j].size()));
    }
  }

  /// Recomputes delta(i) from the (nu, eta) of each class.
  void refresh_delta() {
    delta.assign(partition.k0, false);
    for (std::size_t i = 0; i < partition.k0; ++i) {
      std::vector<Vector> n;
      std::vector<double> e;
      for (auto j : partition.members(i)) {
        n.push_back(nu[j]);
        e.push_back(eta[j]);
      }
      delta[i] = delta_feasibility(n, e);
    }
  }
};

/// (d+1) x (d+1) matrix sum_j v_j v_j' with v_j = (nu_j, eta_j) over the class
/// of true unit i; zero when delta(i) = 0.
inline Matrix second_order_matrix(const LimitDirection& dir, std::size_t i) {
  const auto d = static_cast<Eigen::Index>(dir.d());
  Matrix M = Matrix::Zero(d + 1, d + 1);
  if (!dir.delta[i]) return M;
  for (auto j : dir.partition.members(i)) {
    Vector v(d + 1);
    v.head(d) = dir.nu[j];
    v[d] = dir.eta[j];
    M += v * v.transpose();
  }
  return M;
}

/// Direct evaluation of the un-normalized direction at x.
inline double direction_eval(const LimitDirection& dir, const MlpParams& truth, const Eigen::Ref<const Vector>& x,
                             const TransferFunction& tf = tanh_transfer()) {
  double f = dir.gamma;
  for (std::size_t i = 0; i < truth.k(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double z = truth.units[i].w.dot(x) + truth.units[i].b;
    f += dir.eps[ii] * tf.phi(z);
    f += tf.phi1(z) * (dir.zeta.row(ii).dot(x) + dir.alpha[ii]);
    if (dir.delta[i]) {
      double quad = 0.0;
      for (auto j : dir.partition.members(i)) {
        const double lin = dir.nu[j].dot(x) + dir.eta[j];
        quad += lin * lin;
      }
      f += tf.phi2(z) * quad;
    }
  }
  for (auto j : dir.partition.units_with(UnitRole::Free)) f += dir.mu[j] * tf.phi(dir.free_w[j].dot(x) + dir.free_b[j]);
  return f;
}

/// Coefficients v with direction = sum_a v_a g_a over the basis tags.
inline Vector direction_coefficients(const LimitDirection& dir, const GramBasis& basis) {
  using K = BasisTag::Kind;
  dir.validate();
  const std::size_t d = dir.d();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.size()));
  std::vector<Matrix> M(dir.partition.k0);
  for (std::size_t i = 0; i < dir.partition.k0; ++i) M[i] = second_order_matrix(dir, i);
  std::vector<bool> second_covered(dir.partition.k0, false);
  const auto free_units = dir.partition.units_with(UnitRole::Free);
  std::vector<bool> free_covered(dir.partition.k(), false);

  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& t = basis.tags[a];
    const auto ai = static_cast<Eigen::Index>(a);
    const auto i = static_cast<Eigen::Index>(t.unit);
    const auto dd = static_cast<Eigen::Index>(d);
    switch (t.kind) {
      case K::Const: v[ai] = dir.gamma; break;
      case K::Phi: v[ai] = dir.eps[i]; break;
      case K::XPhi1: v[ai] = dir.zeta(i, static_cast<Eigen::Index>(t.j)); break;
      case K::Phi1: v[ai] = dir.alpha[i]; break;
      case K::XXPhi2:
        v[ai] = (t.j == t.l ? 1.0 : 2.0) * M[t.unit](static_cast<Eigen::Index>(t.j), static_cast<Eigen::Index>(t.l));
        second_covered[t.unit] = true;
        break;
      case K::XPhi2:
        v[ai] = 2.0 * M[t.unit](static_cast<Eigen::Index>(t.j), dd);
        second_covered[t.unit] = true;
        break;
      case K::Phi2:
        v[ai] = M[t.unit](dd, dd);
        second_covered[t.unit] = true;
        break;
      case K::FreePhi:
        for (auto j : free_units) {
          if ((dir.free_w[j] - t.w).norm() <= 1e-12 && std::abs(dir.free_b[j] - t.b) <= 1e-12) {
            v[ai] += dir.mu[j];
            free_covered[j] = true;
          }
        }
        break;
    }
  }
  for (std::size_t i = 0; i < dir.partition.k0; ++i)
    if (!second_covered[i] && M[i].norm() > 0.0)
      throw InvalidInput("basis has no second-order tags for true unit " + std::to_string(i + 1));
  for (auto j : free_units)
    if (!free_covered[j] && dir.mu[j] != 0.0)
      throw InvalidInput("basis has no grid point for free unit " + std::to_string(j + 1));
  if (v.norm() == 0.0) throw Degenerate("limit direction is identically zero");
  return v;
}

/// sqrt(v' G v): L2 norm of the un-normalized direction on the quadrature sample.
inline double direction_norm(const Vector& coeffs, const GramBasis& basis) {
  return std::sqrt(std::max(0.0, coeffs.dot(basis.gram * coeffs)));
}

}  // namespace nnasym
