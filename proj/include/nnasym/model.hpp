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

// One-hidden-layer perceptron regression functions
//
//   f_theta(x) = beta + sum_i a_i * phi(w_i' x + b_i),   a_i >= 0,
//
// their parameter gradients, and the identifiability-aware reparameterization
// that groups hidden units around a minimal "truth" network.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nnasym/errors.hpp"

namespace nnasym {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Transfer functions

/// A bounded, twice differentiable activation with bounded derivatives.
struct TransferFunction {
  double (*phi)(double);
  double (*phi1)(double);
  double (*phi2)(double);
  std::string_view name;
};

namespace detail {
inline double tanh_0(double z) { return std::tanh(z); }
inline double tanh_1(double z) {
  const double t = std::tanh(z);
  return 1.0 - t * t;
}
inline double tanh_2(double z) {
  const double t = std::tanh(z);
  return -2.0 * t * (1.0 - t * t);
}
inline double logistic_0(double z) { return 1.0 / (1.0 + std::exp(-z)); }
inline double logistic_1(double z) {
  const double s = logistic_0(z);
  return s * (1.0 - s);
}
inline double logistic_2(double z) {
  const double s = logistic_0(z);
  return s * (1.0 - s) * (1.0 - 2.0 * s);
}
}  // namespace detail

inline const TransferFunction& tanh_transfer() {
  static const TransferFunction tf{&detail::tanh_0, &detail::tanh_1, &detail::tanh_2, "tanh"};
  return tf;
}

inline const TransferFunction& logistic_transfer() {
  static const TransferFunction tf{&detail::logistic_0, &detail::logistic_1, &detail::logistic_2,
                                   "logistic"};
  return tf;
}

inline const TransferFunction& transfer_by_name(std::string_view name) {
  if (name == "tanh") return tanh_transfer();
  if (name == "logistic") return logistic_transfer();
  throw InvalidInput("unknown transfer function '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Parameters

struct HiddenUnit {
  double a = 0.0;  // output weight, kept >= 0
  Vector w;        // input weights, length d
  double b = 0.0;  // unit bias
};

struct MlpParams {
  double beta = 0.0;
  std::vector<HiddenUnit> units;

  std::size_t k() const noexcept { return units.size(); }
  std::size_t d() const noexcept { return units.empty() ? 0 : static_cast<std::size_t>(units[0].w.size()); }

  static MlpParams zeros(std::size_t k, std::size_t d) {
    MlpParams p;
    p.units.assign(k, HiddenUnit{0.0, Vector::Zero(static_cast<Eigen::Index>(d)), 0.0});
    return p;
  }
};

inline std::size_t param_dim(std::size_t k, std::size_t d) noexcept { return 1 + k * (d + 2); }

inline void check_shape(const MlpParams& p) {
  if (p.units.empty()) throw InvalidInput("MLP needs at least one hidden unit");
  const std::size_t d = p.d();
  if (d == 0) throw InvalidInput("MLP input dimension must be positive");
  for (const auto& u : p.units)
    if (static_cast<std::size_t>(u.w.size()) != d)
      throw DimensionMismatch("hidden unit input weights", d, static_cast<std::size_t>(u.w.size()));
}

/// Flat layout (beta, a_1..a_k, b_1..b_k, w_11..w_1d, ..., w_k1..w_kd).
inline Vector to_vector(const MlpParams& p) {
  const std::size_t k = p.k(), d = p.d();
  Vector v(static_cast<Eigen::Index>(param_dim(k, d)));
  v[0] = p.beta;
  for (std::size_t i = 0; i < k; ++i) {
    v[static_cast<Eigen::Index>(1 + i)] = p.units[i].a;
    v[static_cast<Eigen::Index>(1 + k + i)] = p.units[i].b;
    v.segment(static_cast<Eigen::Index>(1 + 2 * k + i * d), static_cast<Eigen::Index>(d)) = p.units[i].w;
  }
  return v;
}

inline MlpParams from_vector(const Vector& v, std::size_t k, std::size_t d) {
  if (static_cast<std::size_t>(v.size()) != param_dim(k, d))
    throw DimensionMismatch("flat parameter vector", param_dim(k, d), static_cast<std::size_t>(v.size()));
  MlpParams p = MlpParams::zeros(k, d);
  p.beta = v[0];
  for (std::size_t i = 0; i < k; ++i) {
    p.units[i].a = v[static_cast<Eigen::Index>(1 + i)];
    p.units[i].b = v[static_cast<Eigen::Index>(1 + k + i)];
    p.units[i].w = v.segment(static_cast<Eigen::Index>(1 + 2 * k + i * d), static_cast<Eigen::Index>(d));
  }
  return p;
}

/// Closed ball of parameters, the compact set the estimator searches.
struct ParamSpace {
  std::size_t k = 1;
  std::size_t d = 1;
  double radius = 1.0;
  Vector center;  // flat layout; empty means the origin

  static ParamSpace origin_ball(std::size_t k, std::size_t d, double radius) {
    return ParamSpace{k, d, radius, Vector::Zero(static_cast<Eigen::Index>(param_dim(k, d)))};
  }

  Vector center_vector() const {
    if (center.size() == 0) return Vector::Zero(static_cast<Eigen::Index>(param_dim(k, d)));
    return center;
  }

  void validate() const {
    if (k == 0 || d == 0) throw InvalidInput("parameter space needs k >= 1 and d >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("parameter space radius must be positive");
    if (center.size() != 0 && static_cast<std::size_t>(center.size()) != param_dim(k, d))
      throw DimensionMismatch("parameter space center", param_dim(k, d), static_cast<std::size_t>(center.size()));
  }

  /// radius - |theta - center|; positive for interior points.
  double boundary_distance(const MlpParams& p) const {
    return radius - (to_vector(p) - center_vector()).norm();
  }
};

/// Embeds a k0-unit network into k >= k0 units; surplus units get a = 0 and
/// the supplied (w, b), or zeros when none are given.
inline MlpParams embed_units(const MlpParams& truth, std::size_t k,
                             const std::vector<HiddenUnit>& extra = {}) {
  check_shape(truth);
  if (k < truth.k()) throw InvalidInput("cannot embed into fewer hidden units");
  MlpParams p = truth;
  for (std::size_t j = truth.k(); j < k; ++j) {
    HiddenUnit u{0.0, Vector::Zero(static_cast<Eigen::Index>(truth.d())), 0.0};
    const std::size_t e = j - truth.k();
    if (e < extra.size()) {
      u.w = extra[e].w;
      u.b = extra[e].b;
    }
    p.units.push_back(std::move(u));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Evaluation

inline double mlp_eval(const MlpParams& p, const Eigen::Ref<const Vector>& x,
                       const TransferFunction& tf = tanh_transfer()) {
  if (static_cast<std::size_t>(x.size()) != p.d())
    throw DimensionMismatch("mlp_eval input", p.d(), static_cast<std::size_t>(x.size()));
  double f = p.beta;
  for (const auto& u : p.units) f += u.a * tf.phi(u.w.dot(x) + u.b);
  return f;
}

/// Row-wise evaluation over an n x d input matrix.
inline Vector mlp_eval_rows(const MlpParams& p, const Matrix& xs,
                            const TransferFunction& tf = tanh_transfer()) {
  if (static_cast<std::size_t>(xs.cols()) != p.d())
    throw DimensionMismatch("mlp_eval input matrix", p.d(), static_cast<std::size_t>(xs.cols()));
  Vector out = Vector::Constant(xs.rows(), p.beta);
  for (const auto& u : p.units) {
    if (u.a == 0.0) continue;
    Vector z = xs * u.w;
    for (Eigen::Index t = 0; t < z.size(); ++t) out[t] += u.a * tf.phi(z[t] + u.b);
  }
  return out;
}

/// Gradient of f_theta(x) in the flat parameter layout.
inline Vector mlp_param_gradient(const MlpParams& p, const Eigen::Ref<const Vector>& x,
                                 const TransferFunction& tf = tanh_transfer()) {
  const std::size_t k = p.k(), d = p.d();
  if (static_cast<std::size_t>(x.size()) != d)
    throw DimensionMismatch("mlp_param_gradient input", d, static_cast<std::size_t>(x.size()));
  Vector g(static_cast<Eigen::Index>(param_dim(k, d)));
  g[0] = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& u = p.units[i];
    const double z = u.w.dot(x) + u.b;
    const double slope = u.a * tf.phi1(z);
    g[static_cast<Eigen::Index>(1 + i)] = tf.phi(z);
    g[static_cast<Eigen::Index>(1 + k + i)] = slope;
    g.segment(static_cast<Eigen::Index>(1 + 2 * k + i * d), static_cast<Eigen::Index>(d)) = slope * x;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Reparameterization around a minimal truth network

enum class UnitRole { ZeroWeight, TrueUnit, Free };

struct UnitLabel {
  UnitRole role = UnitRole::Free;
  std::size_t index = 0;  // 0-based true unit, meaningful for TrueUnit only

  static UnitLabel zero_weight() { return {UnitRole::ZeroWeight, 0}; }
  static UnitLabel true_unit(std::size_t i) { return {UnitRole::TrueUnit, i}; }
  static UnitLabel free() { return {UnitRole::Free, 0}; }

  friend bool operator==(const UnitLabel& l, const UnitLabel& r) {
    return l.role == r.role && (l.role != UnitRole::TrueUnit || l.index == r.index);
  }
};

/// Assignment of the k hidden units to the zero-weight / true-unit / free classes.
struct Partition {
  std::vector<UnitLabel> labels;
  std::size_t k0 = 1;

  std::size_t k() const noexcept { return labels.size(); }

  std::size_t count(UnitRole role) const {
    std::size_t n = 0;
    for (const auto& l : labels) n += l.role == role;
    return n;
  }

  std::size_t class_size(std::size_t i) const {
    std::size_t n = 0;
    for (const auto& l : labels) n += l.role == UnitRole::TrueUnit && l.index == i;
    return n;
  }

  std::vector<std::size_t> members(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (labels[j].role == UnitRole::TrueUnit && labels[j].index == i) out.push_back(j);
    return out;
  }

  std::vector<std::size_t> units_with(UnitRole role) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (labels[j].role == role) out.push_back(j);
    return out;
  }

  void validate() const {
    if (k0 == 0) throw InvalidInput("partition needs k0 >= 1");
    for (const auto& l : labels)
      if (l.role == UnitRole::TrueUnit && l.index >= k0)
        throw InvalidInput("partition references true unit " + std::to_string(l.index + 1) +
                           " but k0 = " + std::to_string(k0));
    for (std::size_t i = 0; i < k0; ++i)
      if (class_size(i) == 0)
        throw InvalidInput("true-unit class " + std::to_string(i + 1) + " is empty");
    if (count(UnitRole::ZeroWeight) > k() - k0)
      throw InvalidInput("too many zero-weight units for k - k0");
  }

  std::string describe() const {
    std::string s;
    for (const auto& l : labels) {
      if (!s.empty()) s += ' ';
      switch (l.role) {
        case UnitRole::ZeroWeight: s += "Z"; break;
        case UnitRole::Free: s += "F"; break;
        case UnitRole::TrueUnit: s += "T" + std::to_string(l.index + 1); break;
      }
    }
    return s;
  }
};

/// Coordinates (identifiable part, non-identifiable part) relative to a
/// partition. Per-unit vectors are indexed by hidden unit; entries that do not
/// apply to a unit's role are left at zero.
struct ReparamCoords {
  double gamma = 0.0;
  std::vector<double> s;         // per true unit: class weight total minus a_i^0
  std::vector<bool> vanished;    // per true unit: class weight total is exactly 0
  std::vector<double> q;         // per hidden unit: share of class weight (TrueUnit)
  std::vector<double> a;         // per hidden unit: output weight (ZeroWeight, Free)
  std::vector<Vector> w;         // per hidden unit
  std::vector<double> b;         // per hidden unit
};

struct Reparameterization {
  Partition partition;
  ReparamCoords coords;
};

/// Checks that `truth` is a minimal representation: a_i > 0, w_i != 0 and
/// pairwise distinct (w_i, b_i).
inline void check_minimal_truth(const MlpParams& truth) {
  check_shape(truth);
  for (std::size_t i = 0; i < truth.k(); ++i) {
    const auto& u = truth.units[i];
    if (!(u.a > 0.0)) throw InvalidInput("truth output weights must be positive");
    if (u.w.norm() == 0.0) throw InvalidInput("truth input weights must be non-zero");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& v = truth.units[j];
      if ((u.w - v.w).norm() == 0.0 && u.b == v.b)
        throw InvalidInput("truth hidden units must have distinct (w, b)");
    }
  }
}

inline Reparameterization reparameterize(const MlpParams& params, const MlpParams& truth,
                                         double tol = 1e-6,
                                         const TransferFunction& tf = tanh_transfer()) {
  check_shape(params);
  check_minimal_truth(truth);
  if (params.d() != truth.d()) throw DimensionMismatch("reparameterize truth", params.d(), truth.d());
  const std::size_t k = params.k(), k0 = truth.k();

  Reparameterization rep;
  rep.partition.k0 = k0;
  rep.partition.labels.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& u = params.units[j];
    if (u.w.norm() <= tol) {
      rep.partition.labels[j] = UnitLabel::zero_weight();
      continue;
    }
    int hit = -1;
    for (std::size_t i = 0; i < k0; ++i) {
      const auto& t = truth.units[i];
      const double dist = std::sqrt((u.w - t.w).squaredNorm() + (u.b - t.b) * (u.b - t.b));
      if (dist <= tol) {
        if (hit >= 0)
          throw InvalidInput("hidden unit " + std::to_string(j + 1) + " is within tol of true units " +
                             std::to_string(hit + 1) + " and " + std::to_string(i + 1));
        hit = static_cast<int>(i);
      }
    }
    rep.partition.labels[j] = hit >= 0 ? UnitLabel::true_unit(static_cast<std::size_t>(hit)) : UnitLabel::free();
  }
  rep.partition.validate();

  auto& c = rep.coords;
  c.s.assign(k0, 0.0);
  c.vanished.assign(k0, false);
  c.q.assign(k, 0.0);
  c.a.assign(k, 0.0);
  c.b.assign(k, 0.0);
  c.w.assign(k, Vector::Zero(static_cast<Eigen::Index>(params.d())));

  double gamma = params.beta - truth.beta;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& u = params.units[j];
    c.w[j] = u.w;
    c.b[j] = u.b;
    const auto role = rep.partition.labels[j].role;
    if (role != UnitRole::TrueUnit) c.a[j] = u.a;
    if (role == UnitRole::ZeroWeight) gamma += u.a * tf.phi(u.b);
  }
  c.gamma = gamma;
  for (std::size_t i = 0; i < k0; ++i) {
    const auto members = rep.partition.members(i);
    double total = 0.0;
    for (auto j : members) total += params.units[j].a;
    c.s[i] = total - truth.units[i].a;
    c.vanished[i] = total == 0.0;
    for (auto j : members) c.q[j] = total == 0.0 ? 0.0 : params.units[j].a / total;
  }
  return rep;
}

/// Inverse of reparameterize: rebuilds theta from (partition, coordinates).
inline MlpParams reconstruct(const Reparameterization& rep, const MlpParams& truth,
                             const TransferFunction& tf = tanh_transfer()) {
  rep.partition.validate();
  const std::size_t k = rep.partition.k();
  const auto& c = rep.coords;
  if (rep.partition.k0 != truth.k()) throw DimensionMismatch("reconstruct k0", truth.k(), rep.partition.k0);
  if (c.s.size() != truth.k() || c.q.size() != k || c.a.size() != k || c.w.size() != k || c.b.size() != k)
    throw InvalidInput("reparameterization coordinates do not match the partition");
  MlpParams p;
  p.beta = c.gamma + truth.beta;
  p.units.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& l = rep.partition.labels[j];
    auto& u = p.units[j];
    u.w = c.w[j];
    u.b = c.b[j];
    switch (l.role) {
      case UnitRole::ZeroWeight:
        u.a = c.a[j];
        p.beta -= c.a[j] * tf.phi(c.b[j]);
        break;
      case UnitRole::Free:
        u.a = c.a[j];
        break;
      case UnitRole::TrueUnit:
        u.a = (truth.units[l.index].a + c.s[l.index]) * c.q[j];
        break;
    }
  }
  return p;
}

// Identifiable coordinates Phi, flattened as
//   [gamma, s_1..s_k0, (w_j, b_j) for TrueUnit units, a_j for Free units,
//    w_j for ZeroWeight units]
// with units visited in index order. The remaining coordinates (q, free-unit
// (w, b), zero-weight (a, b)) are the non-identifiable part and stay fixed.

inline std::size_t identifiable_dim(const Partition& part, std::size_t d) {
  return 1 + part.k0 + part.count(UnitRole::TrueUnit) * (d + 1) + part.count(UnitRole::Free) +
         part.count(UnitRole::ZeroWeight) * d;
}

inline Vector identifiable_vector(const Reparameterization& rep) {
  const std::size_t d = rep.coords.w.empty() ? 0 : static_cast<std::size_t>(rep.coords.w[0].size());
  Vector v(static_cast<Eigen::Index>(identifiable_dim(rep.partition, d)));
  Eigen::Index o = 0;
  v[o++] = rep.coords.gamma;
  for (double s : rep.coords.s) v[o++] = s;
  const auto di = static_cast<Eigen::Index>(d);
  for (std::size_t j = 0; j < rep.partition.k(); ++j) {
    switch (rep.partition.labels[j].role) {
      case UnitRole::TrueUnit:
        v.segment(o, di) = rep.coords.w[j];
        o += di;
        v[o++] = rep.coords.b[j];
        break;
      case UnitRole::Free: v[o++] = rep.coords.a[j]; break;
      case UnitRole::ZeroWeight:
        v.segment(o, di) = rep.coords.w[j];
        o += di;
        break;
    }
  }
  return v;
}

inline Reparameterization with_identifiable(Reparameterization rep, const Vector& phi) {
  const std::size_t d = rep.coords.w.empty() ? 0 : static_cast<std::size_t>(rep.coords.w[0].size());
  if (static_cast<std::size_t>(phi.size()) != identifiable_dim(rep.partition, d))
    throw DimensionMismatch("identifiable coordinates", identifiable_dim(rep.partition, d),
                            static_cast<std::size_t>(phi.size()));
  Eigen::Index o = 0;
  rep.coords.gamma = phi[o++];
  for (auto& s : rep.coords.s) s = phi[o++];
  const auto di = static_cast<Eigen::Index>(d);
  for (std::size_t j = 0; j < rep.partition.k(); ++j) {
    switch (rep.partition.labels[j].role) {
      case UnitRole::TrueUnit:
        rep.coords.w[j] = phi.segment(o, di);
        o += di;
        rep.coords.b[j] = phi[o++];
        break;
      case UnitRole::Free: rep.coords.a[j] = phi[o++]; break;
      case UnitRole::ZeroWeight:
        rep.coords.w[j] = phi.segment(o, di);
        o += di;
        break;
    }
  }
  return rep;
}

/// Phi^0: the identifiable coordinates at which f equals the truth for every
/// value of the non-identifiable part.
inline Vector identifiable_anchor(const Reparameterization& rep, const MlpParams& truth) {
  Reparameterization anchor = rep;
  auto& c = anchor.coords;
  c.gamma = 0.0;
  std::fill(c.s.begin(), c.s.end(), 0.0);
  for (std::size_t j = 0; j < rep.partition.k(); ++j) {
    const auto& l = rep.partition.labels[j];
    switch (l.role) {
      case UnitRole::TrueUnit:
        c.w[j] = truth.units[l.index].w;
        c.b[j] = truth.units[l.index].b;
        break;
      case UnitRole::Free: c.a[j] = 0.0; break;
      case UnitRole::ZeroWeight: c.w[j].setZero(); break;
    }
  }
  return identifiable_vector(anchor);
}

struct TaylorTerms {
  double first = 0.0;   // (Phi - Phi0)' f'
  double second = 0.0;  // (Phi - Phi0)' f'' (Phi - Phi0)
};

/// First and second order terms of f_(Phi, psi)(x) - f_0(x) expanded around
/// Phi^0 at fixed psi. Zero-weight units enter through their input weights
/// (a_j phi'(b_j) w_j'x to first order), which vanish at w_j = 0.
inline TaylorTerms taylor_terms(const Reparameterization& rep, const MlpParams& truth,
                                const Eigen::Ref<const Vector>& x,
                                const TransferFunction& tf = tanh_transfer()) {
  const auto& part = rep.partition;
  const auto& c = rep.coords;
  if (part.k0 != truth.k()) throw DimensionMismatch("taylor_terms k0", truth.k(), part.k0);
  if (static_cast<std::size_t>(x.size()) != truth.d())
    throw DimensionMismatch("taylor_terms input", truth.d(), static_cast<std::size_t>(x.size()));
  for (std::size_t i = 0; i < part.k0; ++i)
    if (c.vanished.size() > i && c.vanished[i])
      throw InvalidInput("taylor expansion is undefined for a vanished true-unit class");

  TaylorTerms out;
  out.first = c.gamma;
  std::vector<double> z(part.k0), p0(part.k0), p1(part.k0), p2(part.k0);
  for (std::size_t i = 0; i < part.k0; ++i) {
    z[i] = truth.units[i].w.dot(x) + truth.units[i].b;
    p0[i] = tf.phi(z[i]);
    p1[i] = tf.phi1(z[i]);
    p2[i] = tf.phi2(z[i]);
    out.first += c.s[i] * p0[i];
  }
  for (std::size_t j = 0; j < part.k(); ++j) {
    const auto& l = part.labels[j];
    switch (l.role) {
      case UnitRole::TrueUnit: {
        const auto i = l.index;
        const double a0 = truth.units[i].a;
        const double dev = (c.w[j] - truth.units[i].w).dot(x) + (c.b[j] - truth.units[i].b);
        out.first += c.q[j] * a0 * p1[i] * dev;
        out.second += c.q[j] * (a0 * p2[i] * dev * dev + 2.0 * c.s[i] * p1[i] * dev);
        break;
      }
      case UnitRole::Free: out.first += c.a[j] * tf.phi(c.w[j].dot(x) + c.b[j]); break;
      case UnitRole::ZeroWeight: {
        const double lin = c.w[j].dot(x);
        out.first += c.a[j] * tf.phi1(c.b[j]) * lin;
        out.second += c.a[j] * tf.phi2(c.b[j]) * lin * lin;
        break;
      }
    }
  }
  return out;
}

}  // namespace nnasym
