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

// Basis functions spanning the limit directions, and their Gram matrix under
// Q estimated on a fixed quadrature sample.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "nnasym/errors.hpp"
#include "nnasym/io.hpp"
#include "nnasym/model.hpp"

namespace nnasym {

struct BasisTag {
  enum class Kind { Const, Phi, XPhi1, Phi1, XXPhi2, XPhi2, Phi2, FreePhi };
  Kind kind = Kind::Const;
  std::size_t unit = 0;  // true unit index (0-based) for Phi..Phi2
  std::size_t j = 0;     // input coordinate
  std::size_t l = 0;     // second input coordinate (XXPhi2, j <= l)
  Vector w{};            // FreePhi only
  double b = 0.0;        // FreePhi only

  bool is_free() const noexcept { return kind == Kind::FreePhi; }
  bool is_second_order() const noexcept {
    return kind == Kind::XXPhi2 || kind == Kind::XPhi2 || kind == Kind::Phi2;
  }

  std::string label() const {
    const auto u = std::to_string(unit + 1);
    switch (kind) {
      case Kind::Const: return "1";
      case Kind::Phi: return "phi[" + u + "]";
      case Kind::XPhi1: return "x" + std::to_string(j + 1) + "*phi1[" + u + "]";
      case Kind::Phi1: return "phi1[" + u + "]";
      case Kind::XXPhi2: return "x" + std::to_string(j + 1) + "*x" + std::to_string(l + 1) + "*phi2[" + u + "]";
      case Kind::XPhi2: return "x" + std::to_string(j + 1) + "*phi2[" + u + "]";
      case Kind::Phi2: return "phi2[" + u + "]";
      case Kind::FreePhi: {
        std::string s = "phi(w=(";
        for (Eigen::Index c = 0; c < w.size(); ++c) s += (c ? "," : "") + io::format_double(w[c]);
        return s + "),b=" + io::format_double(b) + ")";
      }
    }
    return "?";
  }
};

/// Evaluates tag `t` at input x; `truth` supplies (w_i^0, b_i^0).
inline double basis_eval(const BasisTag& t, const MlpParams& truth, const Eigen::Ref<const Vector>& x,
                         const TransferFunction& tf = tanh_transfer()) {
  using K = BasisTag::Kind;
  if (t.kind == K::Const) return 1.0;
  if (t.kind == K::FreePhi) return tf.phi(t.w.dot(x) + t.b);
  const double z = truth.units[t.unit].w.dot(x) + truth.units[t.unit].b;
  switch (t.kind) {
    case K::Phi: return tf.phi(z);
    case K::XPhi1: return x[static_cast<Eigen::Index>(t.j)] * tf.phi1(z);
    case K::Phi1: return tf.phi1(z);
    case K::XXPhi2: return x[static_cast<Eigen::Index>(t.j)] * x[static_cast<Eigen::Index>(t.l)] * tf.phi2(z);
    case K::XPhi2: return x[static_cast<Eigen::Index>(t.j)] * tf.phi2(z);
    case K::Phi2: return tf.phi2(z);
    default: return 0.0;
  }
}

struct GramBasis {
  std::vector<BasisTag> tags;
  Matrix gram;                  // empirical E_Q[g_a g_b]
  double min_eig = 0.0;         // whole Gram, before flooring
  double max_eig = 0.0;
  double smooth_min_eig = 0.0;  // block of all non-free tags
  std::size_t quad_size = 0;

  std::size_t size() const noexcept { return tags.size(); }

  std::vector<std::size_t> indices_where(auto pred) const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < tags.size(); ++a)
      if (pred(tags[a])) out.push_back(a);
    return out;
  }

  Matrix sub_gram(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            gram(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    return out;
  }
};

/// Thrown when the smooth block of the Gram is not numerically positive
/// definite, i.e. the linear-independence assumption fails for this truth/Q.
class IndependenceViolation : public Degenerate {
 public:
  IndependenceViolation(double min_eig, double floor)
      : Degenerate("smooth-block Gram min eigenvalue " + io::format_double(min_eig) + " <= floor " +
                   io::format_double(floor)),
        min_eig_(min_eig) {}
  double min_eig() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

/// Smooth tags for every true unit; second-order tags for the true units
/// listed in `second_order_units`; one FreePhi tag per grid point.
inline std::vector<BasisTag> make_tags(const MlpParams& truth, const std::vector<std::size_t>& second_order_units,
                                       const std::vector<std::pair<Vector, double>>& grid) {
  using K = BasisTag::Kind;
  const std::size_t k0 = truth.k(), d = truth.d();
  std::vector<BasisTag> tags;
  tags.push_back({K::Const});
  for (std::size_t i = 0; i < k0; ++i) {
    tags.push_back({K::Phi, i});
    for (std::size_t j = 0; j < d; ++j) tags.push_back({K::XPhi1, i, j});
    tags.push_back({K::Phi1, i});
  }
  for (std::size_t i : second_order_units) {
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = j; l < d; ++l) tags.push_back({K::XXPhi2, i, j, l});
    for (std::size_t j = 0; j < d; ++j) tags.push_back({K::XPhi2, i, j});
    tags.push_back({K::Phi2, i});
  }
  for (const auto& [w, b] : grid) {
    BasisTag t{K::FreePhi};
    t.w = w;
    t.b = b;
    tags.push_back(std::move(t));
  }
  return tags;
}

struct BasisOptions {
  double pd_floor = 1e-8;
  bool require_independence = true;
};

/// Gram matrix of `tags` on the quadrature sample, accumulated in row chunks.
inline GramBasis gram_from_tags(std::vector<BasisTag> tags, const MlpParams& truth, const Matrix& quad,
                                const BasisOptions& opt = {}, const TransferFunction& tf = tanh_transfer()) {
  check_shape(truth);
  if (quad.rows() == 0) throw InvalidInput("basis needs a non-empty quadrature sample");
  if (static_cast<std::size_t>(quad.cols()) != truth.d())
    throw DimensionMismatch("quadrature sample", truth.d(), static_cast<std::size_t>(quad.cols()));
  GramBasis basis;
  basis.tags = std::move(tags);
  basis.quad_size = static_cast<std::size_t>(quad.rows());
  const auto p = static_cast<Eigen::Index>(basis.tags.size());
  Matrix g = Matrix::Zero(p, p);
  constexpr Eigen::Index chunk = 2048;
  Matrix values(chunk, p);
  for (Eigen::Index start = 0; start < quad.rows(); start += chunk) {
    const Eigen::Index rows = std::min(chunk, quad.rows() - start);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Vector x = quad.row(start + r).transpose();
      for (Eigen::Index a = 0; a < p; ++a) values(r, a) = basis_eval(basis.tags[static_cast<std::size_t>(a)], truth, x, tf);
    }
    g.selfadjointView<Eigen::Lower>().rankUpdate(values.topRows(rows).transpose());
  }
  g = g.selfadjointView<Eigen::Lower>();
  g /= static_cast<double>(quad.rows());
  basis.gram = 0.5 * (g + g.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(basis.gram, Eigen::EigenvaluesOnly);
  basis.min_eig = es.eigenvalues().minCoeff();
  basis.max_eig = es.eigenvalues().maxCoeff();
  const auto smooth = basis.indices_where([](const BasisTag& t) { return !t.is_free(); });
  const Matrix gs = basis.sub_gram(smooth, smooth);
  basis.smooth_min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(gs, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (opt.require_independence && !(basis.smooth_min_eig > opt.pd_floor))
    throw IndependenceViolation(basis.smooth_min_eig, opt.pd_floor);
  return basis;
}

/// Basis for one partition: second-order tags only for true units whose class
/// holds at least two hidden units (a single unit cannot satisfy the
/// cancellation condition with a non-zero (nu, eta)); grid tags only when the
/// partition has free units.
inline GramBasis build_basis(const MlpParams& truth, const Partition& partition,
                             const std::vector<std::pair<Vector, double>>& grid, const Matrix& quad,
                             const BasisOptions& opt = {}, const TransferFunction& tf = tanh_transfer()) {
  check_minimal_truth(truth);
  partition.validate();
  if (partition.k0 != truth.k()) throw DimensionMismatch("partition k0", truth.k(), partition.k0);
  std::vector<std::size_t> second;
  for (std::size_t i = 0; i < partition.k0; ++i)
    if (partition.class_size(i) >= 2) second.push_back(i);
  const bool has_free = partition.count(UnitRole::Free) > 0;
  return gram_from_tags(make_tags(truth, second, has_free ? grid : decltype(grid){}), truth, quad, opt, tf);
}

/// Union basis over every partition of k units: second-order tags for all
/// true units when k > k0, and the free-unit grid when k > k0.
inline GramBasis build_joint_basis(const MlpParams& truth, std::size_t k,
                                   const std::vector<std::pair<Vector, double>>& grid, const Matrix& quad,
                                   const BasisOptions& opt = {}, const TransferFunction& tf = tanh_transfer()) {
  check_minimal_truth(truth);
  if (k < truth.k()) throw InvalidInput("joint basis needs k >= k0");
  std::vector<std::size_t> second;
  if (k > truth.k())
    for (std::size_t i = 0; i < truth.k(); ++i) second.push_back(i);
  return gram_from_tags(make_tags(truth, second, k > truth.k() ? grid : decltype(grid){}), truth, quad, opt, tf);
}

/// Tensor grid of free-unit (w, b) over [-radius, radius]^(d+1), restricted to
/// the Euclidean ball of that radius. Points with w = 0 (constants, already in
/// the span) and points within `exclusion` of a true unit are dropped.
inline std::vector<std::pair<Vector, double>> make_free_grid(const MlpParams& truth, std::size_t points_per_axis,
                                                             double radius, double exclusion = 1e-3) {
  check_shape(truth);
  if (points_per_axis < 2) throw InvalidInput("grid needs at least 2 points per axis");
  if (!(radius > 0.0)) throw InvalidInput("grid radius must be positive");
  const std::size_t d = truth.d();
  const std::size_t dims = d + 1;
  std::vector<double> axis(points_per_axis);
  for (std::size_t s = 0; s < points_per_axis; ++s)
    axis[s] = -radius + 2.0 * radius * static_cast<double>(s) / static_cast<double>(points_per_axis - 1);
  std::vector<std::pair<Vector, double>> grid;
  std::vector<std::size_t> idx(dims, 0);
  for (;;) {
    Vector w(static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c) w[static_cast<Eigen::Index>(c)] = axis[idx[c]];
    const double b = axis[idx[d]];
    bool keep = w.norm() > 1e-12 && std::sqrt(w.squaredNorm() + b * b) <= radius * (1.0 + 1e-12);
    for (const auto& u : truth.units)
      if (std::sqrt((w - u.w).squaredNorm() + (b - u.b) * (b - u.b)) < exclusion) keep = false;
    if (keep) grid.emplace_back(std::move(w), b);
    std::size_t c = 0;
    while (c < dims && ++idx[c] == points_per_axis) idx[c++] = 0;
    if (c == dims) break;
  }
  return grid;
}

}  // namespace nnasym
