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

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nnasym/data.hpp"
#include "nnasym/errors.hpp"
#include "nnasym/fit.hpp"
#include "nnasym/io.hpp"
#include "nnasym/model.hpp"

namespace nnasym {

/// SSE(truth) - SSE(fitted) on the same data.
inline double sse_difference(const MlpParams& truth, const MlpParams& fitted, const Dataset& data,
                             const TransferFunction& tf = tanh_transfer()) {
  return sse(truth, data, tf) - sse(fitted, data, tf);
}

/// Normalized deviation d_f = (f - f0) / ||f - f0||_2, with the L2(Q) norm
/// estimated once on a fixed quadrature sample.
class GeneralizedDerivative {
 public:
  static constexpr double kNormFloor = 1e-10;

  GeneralizedDerivative(MlpParams f, MlpParams f0, std::shared_ptr<const Matrix> quad,
                        const TransferFunction& tf = tanh_transfer())
      : f_(std::move(f)), f0_(std::move(f0)), quad_(std::move(quad)), tf_(&tf) {
    check_shape(f_);
    check_shape(f0_);
    if (f_.d() != f0_.d()) throw DimensionMismatch("generalized derivative f vs f0", f0_.d(), f_.d());
    if (!quad_ || quad_->rows() == 0) throw InvalidInput("generalized derivative needs a quadrature sample");
    const Vector diff = mlp_eval_rows(f_, *quad_, *tf_) - mlp_eval_rows(f0_, *quad_, *tf_);
    norm_ = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
    if (!(norm_ >= kNormFloor))
      throw Degenerate("f is indistinguishable from f0 on the quadrature sample (norm " +
                       io::format_double(norm_) + ")");
  }

  double norm() const noexcept { return norm_; }
  const MlpParams& f() const noexcept { return f_; }
  const MlpParams& f0() const noexcept { return f0_; }
  const Matrix& quad_sample() const noexcept { return *quad_; }

  double operator()(const Eigen::Ref<const Vector>& x) const {
    return (mlp_eval(f_, x, *tf_) - mlp_eval(f0_, x, *tf_)) / norm_;
  }

  Vector eval_rows(const Matrix& xs) const {
    return (mlp_eval_rows(f_, xs, *tf_) - mlp_eval_rows(f0_, xs, *tf_)) / norm_;
  }

 private:
  MlpParams f_, f0_;
  std::shared_ptr<const Matrix> quad_;
  const TransferFunction* tf_;
  double norm_ = 0.0;
};

inline double gen_derivative_eval(const GeneralizedDerivative& gd, const Eigen::Ref<const Vector>& x) {
  return gd(x);
}

struct Lemma1Bound {
  double lhs = 0.0;
  double rhs = 0.0;

  bool holds() const { return lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs)); }
};

/// Both sides of
///   SSE(f0) - SSE(f) <= (n^-1/2 sum eps_t d_f(X_t))^2 / (n^-1 sum d_f(X_t)^2)
/// with eps_t = Y_t - f0(X_t) taken from the known truth.
inline Lemma1Bound lemma1_bound(const MlpParams& truth, const MlpParams& f, const Dataset& data,
                                const GeneralizedDerivative& gd,
                                const TransferFunction& tf = tanh_transfer()) {
  data.validate();
  const Vector f0x = mlp_eval_rows(truth, data.xs, tf);
  const Vector eps = data.ys - f0x;
  const Vector dv = gd.eval_rows(data.xs);
  const double n = static_cast<double>(data.n());
  const double den = dv.squaredNorm() / n;
  if (!(den > 0.0)) throw Degenerate("d_f vanishes on every data point");
  const double z = eps.dot(dv) / std::sqrt(n);
  Lemma1Bound out;
  out.lhs = sse_difference(truth, f, data, tf);
  out.rhs = z * z / den;
  return out;
}

/// |n^-1 sum_t d_f(X_t)^2 - 1|.
inline double normalization_diagnostic(const GeneralizedDerivative& gd, const Dataset& data) {
  data.validate();
  const Vector dv = gd.eval_rows(data.xs);
  return std::abs(dv.squaredNorm() / static_cast<double>(dv.size()) - 1.0);
}

/// n^-1/2 sum_t eps_t d(X_t).
inline double empirical_process_draw(std::span<const double> d_values, std::span<const double> eps) {
  if (d_values.size() != eps.size())
    throw DimensionMismatch("empirical process inputs", d_values.size(), eps.size());
  if (d_values.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t < eps.size(); ++t) acc += eps[t] * d_values[t];
  return acc / std::sqrt(static_cast<double>(eps.size()));
}

/// Monte Carlo draws of T_n = SSE(f0) - SSE(f_hat), one per replication.
struct TnSample {
  std::vector<double> values;
  std::vector<std::size_t> replications;  // replication index of each value
  std::size_t n = 0;
  std::size_t failures = 0;
  std::string meta;
};

inline std::string tn_to_csv(const TnSample& tn) {
  std::string out = "replication,n,tn\n";
  for (std::size_t i = 0; i < tn.values.size(); ++i) {
    out += std::to_string(i < tn.replications.size() ? tn.replications[i] : i);
    out += ',';
    out += std::to_string(tn.n);
    out += ',';
    out += io::format_double(tn.values[i]);
    out += '\n';
  }
  return out;
}

inline TnSample tn_from_csv(std::string_view text) {
  TnSample tn;
  bool header = true;
  std::size_t row = 0;
  for (auto line : io::split(text, '\n')) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "replication,n,tn") throw InvalidInput("T_n CSV header must be replication,n,tn");
      header = false;
      continue;
    }
    const auto cells = io::split(line, ',');
    if (cells.size() != 3) throw InvalidInput("T_n CSV row " + std::to_string(row) + " must have 3 fields");
    tn.replications.push_back(static_cast<std::size_t>(io::parse_double(cells[0])));
    tn.n = static_cast<std::size_t>(io::parse_double(cells[1]));
    tn.values.push_back(io::parse_double(cells[2]));
  }
  if (header) throw InvalidInput("T_n CSV is empty");
  return tn;
}

}  // namespace nnasym
