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

// Randomized verification suites: the SSE bound, the Taylor expansion in the
// identifiable coordinates, the normalization of d_f, the linear-independence
// witness, cone feasibility, path realization and simulator calibration.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnasym/data.hpp"
#include "nnasym/experiment.hpp"
#include "nnasym/limitset/basis.hpp"
#include "nnasym/limitset/delta.hpp"
#include "nnasym/limitset/direction.hpp"
#include "nnasym/limitset/realize.hpp"
#include "nnasym/limitset/simulate.hpp"
#include "nnasym/model.hpp"
#include "nnasym/rng.hpp"
#include "nnasym/statistic.hpp"

namespace nnasym {

/// Pass count of a randomized suite plus per-instance detail for failures.
struct SuiteResult {
  std::string name;
  std::size_t total = 0;
  std::size_t passed = 0;
  nlohmann::json details = nlohmann::json::array();  // failing instances
  nlohmann::json summary = nlohmann::json::object();

  bool all_passed() const { return total > 0 && passed == total; }

  nlohmann::json to_json() const {
    nlohmann::json j = summary;
    j["suite"] = name;
    j["instances"] = total;
    j["passed"] = passed;
    j["failures"] = details;
    return j;
  }
};

/// Random minimal truth: a in [0.5, 2], |w| >= 0.3, b in [-1, 1], and units
/// kept apart from each other and from each other's sign flips.
inline MlpParams random_truth(Stream& s, std::size_t k0, std::size_t d) {
  for (;;) {
    MlpParams t;
    t.beta = 0.5 * s.normal();
    for (std::size_t i = 0; i < k0; ++i) {
      HiddenUnit u{s.uniform(0.5, 2.0), Vector(static_cast<Eigen::Index>(d)), s.uniform(-1.0, 1.0)};
      for (Eigen::Index c = 0; c < u.w.size(); ++c) u.w[c] = s.normal();
      t.units.push_back(std::move(u));
    }
    bool ok = true;
    for (std::size_t i = 0; i < k0 && ok; ++i) {
      const auto& u = t.units[i];
      if (u.w.norm() < 0.3) ok = false;
      for (std::size_t j = 0; j < i && ok; ++j) {
        const auto& v = t.units[j];
        const double minus = std::sqrt((u.w - v.w).squaredNorm() + (u.b - v.b) * (u.b - v.b));
        const double plus = std::sqrt((u.w + v.w).squaredNorm() + (u.b + v.b) * (u.b + v.b));
        if (std::min(minus, plus) < 0.3) ok = false;
      }
    }
    if (ok) return t;
  }
}

/// Random (w, b) at distance >= 0.3 from every true unit and its sign flip.
inline std::pair<Vector, double> random_free_unit(Stream& s, const MlpParams& truth) {
  const std::size_t d = truth.d();
  for (;;) {
    Vector w(static_cast<Eigen::Index>(d));
    for (Eigen::Index c = 0; c < w.size(); ++c) w[c] = s.normal();
    const double b = s.uniform(-1.5, 1.5);
    bool ok = w.norm() >= 0.3;
    for (const auto& u : truth.units) {
      const double minus = std::sqrt((w - u.w).squaredNorm() + (b - u.b) * (b - u.b));
      const double plus = std::sqrt((w + u.w).squaredNorm() + (b + u.b) * (b + u.b));
      if (std::min(minus, plus) < 0.3) ok = false;
    }
    if (ok) return {w, b};
  }
}

// ---------------------------------------------------------------------------
// SSE bound

inline SuiteResult lemma1_sweep(std::size_t count, std::uint64_t seed) {
  SuiteResult r;
  r.name = "lemma1";
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t inst = 0; inst < count; ++inst) {
    Stream s = Stream::derive(seed, inst, Purpose::Verify);
    const std::size_t d = 1 + (s.uniform() < 0.5 ? 0 : 1);
    const std::size_t k0 = 1 + (s.uniform() < 0.5 ? 0 : 1);
    const std::size_t k = k0 + static_cast<std::size_t>(s.uniform() * static_cast<double>(4 - k0));
    const MlpParams truth = random_truth(s, k0, d);
    MlpParams f;
    if (s.uniform() < 0.5) {
      // Near the truth: embedded plus a perturbation of random size.
      f = embed_units(truth, k);
      const double scale = std::pow(10.0, s.uniform(-4.0, 0.0));
      Vector v = to_vector(f);
      for (Eigen::Index c = 0; c < v.size(); ++c) v[c] += scale * s.normal();
      f = from_vector(v, f.k(), d);
    } else {
      f = MlpParams::zeros(k, d);
      f.beta = s.normal();
      for (auto& u : f.units) {
        u.a = s.uniform(0.0, 2.0);
        for (Eigen::Index c = 0; c < u.w.size(); ++c) u.w[c] = 1.5 * s.normal();
        u.b = s.normal();
      }
    }
    const std::size_t n = 20 + static_cast<std::size_t>(s.uniform() * 481.0);
    const InputLaw input = s.uniform() < 0.5 ? InputLaw::standard_normal(d) : InputLaw::uniform_box(d, -2.0, 2.0);
    const NoiseLaw noise = s.uniform() < 0.5 ? NoiseLaw::gaussian(s.uniform(0.05, 1.0))
                                             : NoiseLaw::rademacher(s.uniform(0.05, 1.0));
    const Dataset data = sample_dataset(truth, input, noise, n, s.substream(0, Purpose::Data));
    auto quad = std::make_shared<const Matrix>(sample_inputs(input, 500, s.substream(0, Purpose::Quadrature)));
    r.total += 1;
    try {
      const GeneralizedDerivative gd(f, truth, quad);
      const Lemma1Bound b = lemma1_bound(truth, f, data, gd);
      worst = std::max(worst, (b.lhs - b.rhs) / (1.0 + std::abs(b.rhs)));
      if (b.holds()) {
        r.passed += 1;
      } else {
        r.details.push_back({{"instance", inst}, {"lhs", b.lhs}, {"rhs", b.rhs}});
      }
    } catch (const Degenerate& e) {
      r.details.push_back({{"instance", inst}, {"error", e.what()}});
    }
  }
  r.summary["worst_relative_excess"] = worst;
  return r;
}

// ---------------------------------------------------------------------------
// Taylor expansion

/// Random partition of k0 + extra units with roles drawn at random, and
/// non-identifiable coordinates (q, free (w, b), zero-weight (a, b)).
inline Reparameterization random_reparameterization(Stream& s, const MlpParams& truth, std::size_t extra) {
  const std::size_t k0 = truth.k(), d = truth.d();
  Reparameterization rep;
  rep.partition.k0 = k0;
  for (std::size_t i = 0; i < k0; ++i) rep.partition.labels.push_back(UnitLabel::true_unit(i));
  for (std::size_t e = 0; e < extra; ++e) {
    const double u = s.uniform();
    if (u < 1.0 / 3.0) rep.partition.labels.push_back(UnitLabel::zero_weight());
    else if (u < 2.0 / 3.0) rep.partition.labels.push_back(UnitLabel::free());
    else rep.partition.labels.push_back(UnitLabel::true_unit(static_cast<std::size_t>(s.uniform() * static_cast<double>(k0))));
  }
  rep.partition.validate();
  const std::size_t k = rep.partition.k();
  auto& c = rep.coords;
  c.s.assign(k0, 0.0);
  c.vanished.assign(k0, false);
  c.q.assign(k, 0.0);
  c.a.assign(k, 0.0);
  c.w.assign(k, Vector::Zero(static_cast<Eigen::Index>(d)));
  c.b.assign(k, 0.0);
  for (std::size_t i = 0; i < k0; ++i) {
    const auto members = rep.partition.members(i);
    double total = 0.0;
    for (auto j : members) total += (c.q[j] = s.uniform(0.1, 1.0));
    for (auto j : members) c.q[j] /= total;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto& l = rep.partition.labels[j];
    if (l.role == UnitRole::TrueUnit) {
      c.w[j] = truth.units[l.index].w;
      c.b[j] = truth.units[l.index].b;
    } else if (l.role == UnitRole::Free) {
      auto [w, b] = random_free_unit(s, truth);
      c.w[j] = w;
      c.b[j] = b;
    } else {
      c.a[j] = s.uniform(0.2, 1.5);
      c.b[j] = s.uniform(-1.0, 1.0);
    }
  }
  return rep;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

struct TaylorCheck {
  double fd_rel_error = 0.0;
  double slope = 0.0;
  std::vector<double> steps, remainders;
};

/// Checks one configuration along direction `delta` at inputs `xs` (rows).
inline TaylorCheck taylor_check(const Reparameterization& rep, const MlpParams& truth, const Vector& delta,
                                const Matrix& xs, const std::vector<double>& steps) {
  const Vector phi0 = identifiable_anchor(rep, truth);
  auto model_at = [&](double h) { return reconstruct(with_identifiable(rep, phi0 + h * delta), truth); };
  const Reparameterization unit = with_identifiable(rep, phi0 + delta);
  const Vector f0 = mlp_eval_rows(truth, xs);
  Vector first(xs.rows()), second(xs.rows());
  for (Eigen::Index t = 0; t < xs.rows(); ++t) {
    const TaylorTerms tt = taylor_terms(unit, truth, xs.row(t).transpose());
    first[t] = tt.first;
    second[t] = tt.second;
  }
  TaylorCheck out;
  const double eps = 1e-4;
  const Vector fd = (mlp_eval_rows(model_at(eps), xs) - mlp_eval_rows(model_at(-eps), xs)) / (2.0 * eps);
  out.fd_rel_error = (fd - first).lpNorm<Eigen::Infinity>() / std::max(first.lpNorm<Eigen::Infinity>(), 1e-300);
  for (double h : steps) {
    const Vector rem = mlp_eval_rows(model_at(h), xs) - f0 - h * first - 0.5 * h * h * second;
    out.steps.push_back(h);
    out.remainders.push_back(std::max(rem.lpNorm<Eigen::Infinity>(), 1e-300));
  }
  out.slope = loglog_slope(out.steps, out.remainders);
  return out;
}

inline SuiteResult taylor_suite(std::size_t count, std::uint64_t seed, double fd_tol = 1e-5, double min_slope = 2.5) {
  SuiteResult r;
  r.name = "taylor";
  const std::vector<double> steps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  double worst_fd = 0.0, worst_slope = std::numeric_limits<double>::infinity();
  for (std::size_t inst = 0; inst < count; ++inst) {
    Stream s = Stream::derive(seed, inst, Purpose::Verify);
    const std::size_t d = 1 + (s.uniform() < 0.5 ? 0 : 1);
    const std::size_t k0 = 1 + (s.uniform() < 0.5 ? 0 : 1);
    const MlpParams truth = random_truth(s, k0, d);
    const Reparameterization rep = random_reparameterization(s, truth, static_cast<std::size_t>(s.uniform() * 3.0));
    Vector delta(static_cast<Eigen::Index>(identifiable_dim(rep.partition, d)));
    for (Eigen::Index c = 0; c < delta.size(); ++c) delta[c] = s.normal();
    delta.normalize();
    Matrix xs(7, static_cast<Eigen::Index>(d));
    for (Eigen::Index e = 0; e < xs.size(); ++e) xs.data()[e] = s.normal();
    const TaylorCheck tc = taylor_check(rep, truth, delta, xs, steps);
    worst_fd = std::max(worst_fd, tc.fd_rel_error);
    worst_slope = std::min(worst_slope, tc.slope);
    r.total += 1;
    if (tc.fd_rel_error <= fd_tol && tc.slope > min_slope) {
      r.passed += 1;
    } else {
      r.details.push_back({{"instance", inst}, {"partition", rep.partition.describe()},
                           {"fd_rel_error", tc.fd_rel_error}, {"slope", tc.slope}, {"remainders", tc.remainders}});
    }
  }
  r.summary["worst_fd_rel_error"] = worst_fd;
  r.summary["min_slope"] = worst_slope;
  r.summary["steps"] = steps;
  return r;
}

// ---------------------------------------------------------------------------
// Normalization of d_f

inline SuiteResult normalization_suite(const MlpParams& truth, std::size_t count, std::size_t n, std::size_t quad_m,
                                       std::uint64_t seed, double tol = 0.05) {
  SuiteResult r;
  r.name = "normalization";
  const InputLaw input = InputLaw::standard_normal(truth.d());
  auto quad = std::make_shared<const Matrix>(sample_inputs(input, quad_m, Stream::derive(seed, 0, Purpose::Quadrature)));
  double worst = 0.0;
  std::vector<double> diags;
  for (std::size_t inst = 0; inst < count; ++inst) {
    Stream s = Stream::derive(seed, inst, Purpose::Verify);
    const MlpParams base = embed_units(truth, truth.k() + 1, {HiddenUnit{0.0, Vector::Constant(static_cast<Eigen::Index>(truth.d()), 0.5), -0.5}});
    Vector v = to_vector(base);
    const double scale = std::pow(10.0, s.uniform(-3.0, -1.0));
    for (Eigen::Index c = 0; c < v.size(); ++c) v[c] += scale * s.normal();
    const MlpParams f = from_vector(v, base.k(), base.d());
    const GeneralizedDerivative gd(f, truth, quad);
    const Dataset data = sample_dataset(truth, input, NoiseLaw::gaussian(0.3), n, s.substream(0, Purpose::Data));
    const double diag = normalization_diagnostic(gd, data);
    diags.push_back(diag);
    worst = std::max(worst, diag);
    r.total += 1;
    if (diag <= tol) r.passed += 1;
    else r.details.push_back({{"instance", inst}, {"diagnostic", diag}});
  }
  r.summary["worst"] = worst;
  r.summary["n"] = n;
  r.summary["quad_m"] = quad_m;
  return r;
}

// ---------------------------------------------------------------------------
// Linear-independence witness

struct BasisWitness {
  double smooth_min_eig = 0.0;       // first- and second-order tags
  double first_order_min_eig = 0.0;  // tags of the identifiable span
  std::size_t quad_m = 0;
  double floor = 1e-8;

  bool holds() const { return smooth_min_eig > floor; }

  nlohmann::json to_json() const {
    return {{"smooth_min_eig", smooth_min_eig}, {"first_order_min_eig", first_order_min_eig},
            {"quad_m", quad_m}, {"pd_floor", floor}, {"holds", holds()}};
  }
};

inline BasisWitness basis_witness(const MlpParams& truth, const Matrix& quad, double floor = 1e-8,
                                  const TransferFunction& tf = tanh_transfer()) {
  BasisOptions opt;
  opt.pd_floor = floor;
  opt.require_independence = false;
  BasisWitness w;
  w.floor = floor;
  w.quad_m = static_cast<std::size_t>(quad.rows());
  w.smooth_min_eig = build_joint_basis(truth, truth.k() + 1, {}, quad, opt, tf).smooth_min_eig;
  w.first_order_min_eig = build_joint_basis(truth, truth.k(), {}, quad, opt, tf).smooth_min_eig;
  return w;
}

// ---------------------------------------------------------------------------
// Cone feasibility against a brute-force grid over the simplex

/// min over q on the simplex grid of |sum_j sqrt(q_j) v_j| / max_j |v_j|.
inline double delta_grid_residual(const std::vector<Vector>& v, std::size_t steps = 100) {
  const std::size_t m = v.size();
  double vmax = 0.0;
  for (const auto& x : v) vmax = std::max(vmax, x.norm());
  if (vmax == 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cnt(m, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t left) {
    if (j + 1 == m) {
      cnt[j] = left;
      Vector acc = Vector::Zero(v[0].size());
      for (std::size_t i = 0; i < m; ++i) acc += std::sqrt(static_cast<double>(cnt[i]) / static_cast<double>(steps)) * v[i];
      best = std::min(best, acc.norm() / vmax);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      cnt[j] = c;
      rec(j + 1, left - c);
    }
  };
  rec(0, steps);
  return best;
}

inline SuiteResult delta_oracle_suite(std::size_t count, std::uint64_t seed) {
  SuiteResult r;
  r.name = "delta_oracle";
  std::size_t feasible = 0, resampled = 0;
  Stream s = Stream::derive(seed, 0, Purpose::Verify);
  while (r.total < count) {
    const std::size_t m = 1 + static_cast<std::size_t>(s.uniform() * 3.0);
    const std::size_t d = 1 + (s.uniform() < 0.5 ? 0 : 1);
    std::vector<Vector> v(m, Vector(static_cast<Eigen::Index>(d + 1)));
    for (auto& x : v)
      for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = s.normal();
    if (s.uniform() < 0.5) {
      // Plant a witness on the grid: q_j = c_j / 100 with the last positive
      // entry absorbing the cancellation.
      std::vector<std::size_t> cnt(m, 0);
      std::size_t left = 100;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        cnt[j] = static_cast<std::size_t>(s.uniform() * static_cast<double>(left + 1));
        left -= cnt[j];
      }
      cnt[m - 1] = left;
      std::size_t last = m;
      for (std::size_t j = m; j-- > 0;)
        if (cnt[j] > 0) {
          last = j;
          break;
        }
      Vector acc = Vector::Zero(static_cast<Eigen::Index>(d + 1));
      for (std::size_t j = 0; j < m; ++j)
        if (j != last) acc += std::sqrt(static_cast<double>(cnt[j]) / 100.0) * v[j];
      v[last] = -acc / std::sqrt(static_cast<double>(cnt[last]) / 100.0);
    }
    const double res = delta_grid_residual(v);
    bool oracle;
    if (res <= 1e-9) oracle = true;
    else if (res >= 0.05) oracle = false;
    else {
      resampled += 1;
      continue;
    }
    std::vector<Vector> nu;
    std::vector<double> eta;
    for (const auto& x : v) {
      nu.push_back(x.head(static_cast<Eigen::Index>(d)));
      eta.push_back(x[static_cast<Eigen::Index>(d)]);
    }
    const bool got = delta_feasibility(nu, eta);
    r.total += 1;
    feasible += oracle;
    if (got == oracle) r.passed += 1;
    else r.details.push_back({{"m", m}, {"d", d}, {"oracle", oracle}, {"solver", got}, {"grid_residual", res}});
  }
  r.summary["oracle_feasible"] = feasible;
  r.summary["resampled"] = resampled;
  return r;
}

// ---------------------------------------------------------------------------
// Path realization

struct RealizationCheck {
  bool second_order = false;
  std::vector<double> u, ratio;  // |f_theta(u) - f0 - u d|_2 / u
  double slope = 0.0;
};

/// Random limit direction around `truth` for a random partition of `k` units;
/// second-order parts get a planted cancelling witness when `second_order`.
inline LimitDirection random_direction(Stream& s, const MlpParams& truth, std::size_t k, bool second_order) {
  const std::size_t k0 = truth.k(), d = truth.d();
  // Classes: the first spare unit joins class 1 when second order is requested.
  std::vector<std::size_t> sizes(k0, 1);
  std::size_t spare = k - k0, n_free = 0, n_zero = 0;
  if (second_order && spare > 0) {
    sizes[0] += 1;
    spare -= 1;
  }
  while (spare-- > 0) {
    const double u = s.uniform();
    if (u < 0.4) n_free += 1;
    else if (u < 0.6) n_zero += 1;
    else sizes[static_cast<std::size_t>(s.uniform() * static_cast<double>(k0))] += 1;
  }
  LimitDirection dir = LimitDirection::zeros(make_partition(k0, n_zero, sizes, n_free), d);
  dir.gamma = s.normal();
  for (std::size_t i = 0; i < k0; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    dir.eps[ii] = s.normal();
    for (std::size_t c = 0; c < d; ++c) dir.zeta(ii, static_cast<Eigen::Index>(c)) = s.normal();
    dir.alpha[ii] = s.normal();
    const auto members = dir.partition.members(i);
    if (second_order && members.size() >= 2) {
      // Random v_j with sum_j sqrt(q_j) v_j = 0 for random simplex weights q.
      std::vector<double> q;
      double tot = 0.0;
      for (std::size_t c = 0; c < members.size(); ++c) tot += q.emplace_back(s.uniform(0.2, 1.0));
      Vector acc = Vector::Zero(static_cast<Eigen::Index>(d + 1));
      for (std::size_t c = 0; c + 1 < members.size(); ++c) {
        Vector v(static_cast<Eigen::Index>(d + 1));
        for (Eigen::Index e = 0; e < v.size(); ++e) v[e] = 0.7 * s.normal();
        dir.nu[members[c]] = v.head(static_cast<Eigen::Index>(d));
        dir.eta[members[c]] = v[static_cast<Eigen::Index>(d)];
        acc += std::sqrt(q[c] / tot) * v;
      }
      const Vector last = -acc / std::sqrt(q.back() / tot);
      dir.nu[members.back()] = last.head(static_cast<Eigen::Index>(d));
      dir.eta[members.back()] = last[static_cast<Eigen::Index>(d)];
    }
  }
  for (auto j : dir.partition.units_with(UnitRole::Free)) {
    dir.mu[j] = s.uniform(0.2, 1.5);
    auto [w, b] = random_free_unit(s, truth);
    dir.free_w[j] = w;
    dir.free_b[j] = b;
  }
  dir.refresh_delta();
  return dir;
}

inline RealizationCheck realization_check(const LimitDirection& dir, const MlpParams& truth, const Matrix& quad,
                                          const std::vector<double>& us) {
  RealizationCheck out;
  for (std::size_t i = 0; i < dir.partition.k0; ++i) out.second_order = out.second_order || second_order_matrix(dir, i).norm() > 0.0;
  const auto m = quad.rows();
  Vector dv(m);
  for (Eigen::Index t = 0; t < m; ++t) dv[t] = direction_eval(dir, truth, quad.row(t).transpose());
  const double nrm = std::sqrt(dv.squaredNorm() / static_cast<double>(m));
  const Vector f0 = mlp_eval_rows(truth, quad);
  const ParamSpace space = ParamSpace::origin_ball(dir.partition.k(), truth.d(), 1e6);
  for (double u : us) {
    const MlpParams th = realize_direction(dir, u, truth, space, nrm);
    const Vector rem = mlp_eval_rows(th, quad) - f0 - (u / nrm) * dv;
    out.u.push_back(u);
    out.ratio.push_back(std::max(std::sqrt(rem.squaredNorm() / static_cast<double>(m)) / u, 1e-300));
  }
  out.slope = loglog_slope(out.u, out.ratio);
  return out;
}

inline SuiteResult realization_suite(std::size_t count, std::uint64_t seed, std::size_t quad_m = 20000,
                                     double first_slope = 0.9, double second_slope = 0.4) {
  SuiteResult r;
  r.name = "realization";
  const std::vector<double> us{1e-1, 1e-2, 1e-3};
  double worst_first = std::numeric_limits<double>::infinity(), worst_second = worst_first;
  for (std::size_t inst = 0; inst < count; ++inst) {
    Stream s = Stream::derive(seed, inst, Purpose::Verify);
    const std::size_t d = 1 + (s.uniform() < 0.5 ? 0 : 1);
    const std::size_t k0 = 1 + (s.uniform() < 0.5 ? 0 : 1);
    const MlpParams truth = random_truth(s, k0, d);
    const bool second = inst % 2 == 1;
    const std::size_t k = k0 + (second ? 1 : 0) + static_cast<std::size_t>(s.uniform() * 2.0);
    const LimitDirection dir = random_direction(s, truth, k, second);
    const Matrix quad = sample_inputs(InputLaw::standard_normal(d), quad_m, s.substream(0, Purpose::Quadrature));
    const RealizationCheck rc = realization_check(dir, truth, quad, us);
    bool decreasing = true;
    for (std::size_t i = 1; i < rc.ratio.size(); ++i) decreasing = decreasing && rc.ratio[i] < rc.ratio[i - 1];
    const double need = rc.second_order ? second_slope : first_slope;
    (rc.second_order ? worst_second : worst_first) = std::min(rc.second_order ? worst_second : worst_first, rc.slope);
    r.total += 1;
    if (decreasing && rc.slope >= need) {
      r.passed += 1;
    } else {
      r.details.push_back({{"instance", inst}, {"partition", dir.partition.describe()}, {"second_order", rc.second_order},
                           {"slope", rc.slope}, {"ratios", rc.ratio}});
    }
  }
  r.summary["min_first_order_slope"] = worst_first;
  r.summary["min_second_order_slope"] = worst_second;
  return r;
}

// ---------------------------------------------------------------------------
// Simulator calibration

/// A GramBasis with the given tags and Gram, bypassing quadrature.
inline GramBasis synthetic_basis(std::vector<BasisTag> tags, Matrix gram) {
  GramBasis b;
  b.tags = std::move(tags);
  b.gram = std::move(gram);
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.gram, Eigen::EigenvaluesOnly);
  b.min_eig = es.eigenvalues().minCoeff();
  b.max_eig = es.eigenvalues().maxCoeff();
  b.smooth_min_eig = b.min_eig;
  return b;
}

struct Calibration {
  double ks_single = 1.0;  // one free function against chi2_1
  double ks_span = 1.0;    // orthonormal 4-dim span against chi2_4
};

inline Calibration calibrate_simulator(std::size_t draws, std::uint64_t seed, unsigned threads = 1) {
  SupSettings st;
  st.threads = threads;
  Calibration out;
  {
    BasisTag t{BasisTag::Kind::FreePhi};
    t.w = Vector::Ones(1);
    const GramBasis basis = synthetic_basis({t}, Matrix::Identity(1, 1));
    SupPiece piece;
    piece.label = "single";
    piece.n_free = 1;
    piece.grid = {0};
    const SupSimulator sim(basis, {piece}, st);
    const SupSample sample = sim.run(draws, Stream::derive(seed, 1, Purpose::LimitDraw));
    const boost::math::chi_squared chi(1.0);
    out.ks_single = ks_one_sample(sample.values, [&](double x) { return x <= 0.0 ? 0.0 : boost::math::cdf(chi, x); });
  }
  {
    std::vector<BasisTag> tags;
    tags.push_back({BasisTag::Kind::Const});
    for (std::size_t c = 0; c < 3; ++c) tags.push_back({BasisTag::Kind::Phi, c});
    const GramBasis basis = synthetic_basis(tags, Matrix::Identity(4, 4));
    SupPiece piece;
    piece.label = "span";
    piece.span = {0, 1, 2, 3};
    const SupSimulator sim(basis, {piece}, st);
    const SupSample sample = sim.run(draws, Stream::derive(seed, 2, Purpose::LimitDraw));
    const boost::math::chi_squared chi(4.0);
    out.ks_span = ks_one_sample(sample.values, [&](double x) { return x <= 0.0 ? 0.0 : boost::math::cdf(chi, x); });
  }
  return out;
}

}  // namespace nnasym
