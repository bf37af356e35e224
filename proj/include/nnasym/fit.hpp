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

// Least-squares estimation over a closed parameter ball with a_i >= 0.
//
// The optimizer is a projected limited-memory quasi-Newton method: L-BFGS
// directions restricted to the coordinates that are not pinned at a_i = 0,
// followed by projection back onto the feasible set and an Armijo backtracking
// search along the projected path.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nnasym/data.hpp"
#include "nnasym/errors.hpp"
#include "nnasym/model.hpp"
#include "nnasym/rng.hpp"

namespace nnasym {

inline double sse(const MlpParams& params, const Dataset& data,
                  const TransferFunction& tf = tanh_transfer()) {
  data.validate();
  if (params.d() != data.d()) throw DimensionMismatch("sse parameters vs data", data.d(), params.d());
  const Vector f = mlp_eval_rows(params, data.xs, tf);
  return (data.ys - f).squaredNorm();
}

namespace detail {

inline void clamp_and_shrink(Vector& theta, const ParamSpace& space) {
  for (std::size_t i = 0; i < space.k; ++i) {
    auto& a = theta[static_cast<Eigen::Index>(1 + i)];
    if (!(a >= 0.0)) a = 0.0;
  }
  const Vector c = space.center_vector();
  const double dist = (theta - c).norm();
  if (dist > space.radius) theta = c + (theta - c) * (space.radius * (1.0 - 1e-14) / dist);
}

}  // namespace detail

/// Clamps each a_i at 0, then pulls the vector radially toward the center
/// until it lies in the ball. Idempotent when the center has a_i >= 0.
inline MlpParams project_to_space(const Vector& theta, const ParamSpace& space) {
  space.validate();
  if (static_cast<std::size_t>(theta.size()) != param_dim(space.k, space.d))
    throw DimensionMismatch("project_to_space", param_dim(space.k, space.d), static_cast<std::size_t>(theta.size()));
  Vector t = theta;
  detail::clamp_and_shrink(t, space);
  return from_vector(t, space.k, space.d);
}

inline bool in_space(const MlpParams& p, const ParamSpace& space) {
  for (const auto& u : p.units)
    if (!(u.a >= 0.0)) return false;
  return space.boundary_distance(p) >= 0.0;
}

/// SSE and its gradient in the flat parameter layout.
class SseObjective {
 public:
  SseObjective(const Dataset& data, std::size_t k, const TransferFunction& tf = tanh_transfer())
      : data_(data), k_(k), d_(data.d()), tf_(tf) {
    data.validate();
  }

  double value_and_gradient(const Vector& theta, Vector& grad) const {
    const auto n = data_.xs.rows();
    const bool fast_tanh = &tf_ == &tanh_transfer();
    Vector f = Vector::Constant(n, theta[0]);
    Matrix phi(n, static_cast<Eigen::Index>(k_)), slope(n, static_cast<Eigen::Index>(k_));
    for (std::size_t i = 0; i < k_; ++i) {
      const double a = theta[static_cast<Eigen::Index>(1 + i)];
      const double b = theta[static_cast<Eigen::Index>(1 + k_ + i)];
      const Vector z = data_.xs * theta.segment(static_cast<Eigen::Index>(1 + 2 * k_ + i * d_),
                                                static_cast<Eigen::Index>(d_));
      for (Eigen::Index t = 0; t < n; ++t) {
        const double arg = z[t] + b;
        double p, p1;
        if (fast_tanh) {
          p = std::tanh(arg);
          p1 = 1.0 - p * p;
        } else {
          p = tf_.phi(arg);
          p1 = tf_.phi1(arg);
        }
        phi(t, static_cast<Eigen::Index>(i)) = p;
        slope(t, static_cast<Eigen::Index>(i)) = p1;
        f[t] += a * p;
      }
    }
    const Vector r = data_.ys - f;
    grad.resize(static_cast<Eigen::Index>(param_dim(k_, d_)));
    grad[0] = -2.0 * r.sum();
    for (std::size_t i = 0; i < k_; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double a = theta[static_cast<Eigen::Index>(1 + i)];
      grad[static_cast<Eigen::Index>(1 + i)] = -2.0 * r.dot(phi.col(ii));
      const Vector rs = r.cwiseProduct(slope.col(ii));
      grad[static_cast<Eigen::Index>(1 + k_ + i)] = -2.0 * a * rs.sum();
      grad.segment(static_cast<Eigen::Index>(1 + 2 * k_ + i * d_), static_cast<Eigen::Index>(d_)) =
          -2.0 * a * (data_.xs.transpose() * rs);
    }
    return r.squaredNorm();
  }

  double value(const Vector& theta) const {
    Vector g;
    return value_and_gradient(theta, g);
  }

 private:
  const Dataset& data_;
  std::size_t k_, d_;
  const TransferFunction& tf_;
};

struct FitConfig {
  std::size_t starts = 16;
  std::size_t max_iters = 2000;
  double grad_tol = 1e-8;  // stop when |projected gradient| <= grad_tol * (1 + SSE)
  ParamSpace space;
  double init_scale = 1.0;
  std::size_t memory = 7;
  /// Stop when the SSE improved by less than stall_tol * (1 + SSE) over the
  /// last stall_window iterations; 0 disables.
  std::size_t stall_window = 25;
  double stall_tol = 1e-12;
  /// When set, start 0 is the truth embedded into k units (surplus units at
  /// a = 0 with random (w, b)); the remaining starts are random.
  std::optional<MlpParams> oracle_truth;

  void validate() const {
    space.validate();
    if (starts == 0) throw InvalidInput("fit needs at least one start");
    if (max_iters == 0) throw InvalidInput("fit needs max_iters >= 1");
    if (!(grad_tol > 0.0)) throw InvalidInput("fit grad_tol must be positive");
    if (!(stall_tol >= 0.0)) throw InvalidInput("fit stall_tol must be >= 0");
    if (!(init_scale > 0.0)) throw InvalidInput("fit init_scale must be positive");
    const Vector c = space.center_vector();
    for (std::size_t i = 0; i < space.k; ++i)
      if (c[static_cast<Eigen::Index>(1 + i)] < 0.0) throw InvalidInput("ball center must have a_i >= 0");
  }
};

struct FitResult {
  MlpParams theta_hat;
  double sse = 0.0;
  bool converged = false;
  std::size_t start_index = 0;
  std::size_t iterations = 0;
  std::vector<double> start_sse;  // NaN for starts whose objective went non-finite
};

struct StartOutcome {
  Vector theta;
  double sse = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::size_t iterations = 0;
};

/// Single projected L-BFGS run from `x0` (projected first).
inline StartOutcome minimize_from(const SseObjective& obj, Vector x, const FitConfig& cfg) {
  const ParamSpace& space = cfg.space;
  detail::clamp_and_shrink(x, space);
  const auto dim = x.size();
  const auto k = static_cast<Eigen::Index>(space.k);

  Vector g;
  double f = obj.value_and_gradient(x, g);
  StartOutcome out;
  if (!std::isfinite(f)) return out;

  struct Pair {
    Vector s, y;
    double rho;
  };
  std::deque<Pair> mem;
  std::vector<double> alpha;

  auto projected_gradient_norm = [&](const Vector& xx, const Vector& gg) {
    Vector t = xx - gg;
    detail::clamp_and_shrink(t, space);
    return (xx - t).norm();
  };

  std::size_t iter = 0;
  bool converged = false;
  std::deque<double> history;
  for (; iter < cfg.max_iters; ++iter) {
    if (projected_gradient_norm(x, g) <= cfg.grad_tol * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }
    if (cfg.stall_window > 0) {
      history.push_back(f);
      if (history.size() > cfg.stall_window) {
        history.pop_front();
        if (history.front() - f <= cfg.stall_tol * (1.0 + std::abs(f))) break;
      }
    }
    // Coordinates pinned at a_i = 0 with the gradient pushing outward.
    std::vector<bool> pinned(static_cast<std::size_t>(dim), false);
    for (Eigen::Index i = 0; i < k; ++i)
      if (x[1 + i] <= 0.0 && g[1 + i] > 0.0) pinned[static_cast<std::size_t>(1 + i)] = true;
    auto mask = [&](Vector v) {
      for (Eigen::Index i = 0; i < dim; ++i)
        if (pinned[static_cast<std::size_t>(i)]) v[i] = 0.0;
      return v;
    };

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const Vector gm = mask(g);
      Vector dir;
      double t0 = 1.0;
      if (mem.empty()) {
        dir = -gm;
        t0 = 1.0 / std::max(1.0, gm.norm());
      } else {
        Vector q = gm;
        alpha.assign(mem.size(), 0.0);
        for (std::size_t m = mem.size(); m-- > 0;) {
          alpha[m] = mem[m].rho * mem[m].s.dot(q);
          q -= alpha[m] * mem[m].y;
        }
        const auto& last = mem.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
        for (std::size_t m = 0; m < mem.size(); ++m) {
          const double beta = mem[m].rho * mem[m].y.dot(q);
          q += (alpha[m] - beta) * mem[m].s;
        }
        dir = -mask(q);
        if (!(g.dot(dir) < -1e-12 * g.norm() * dir.norm())) {
          mem.clear();
          dir = -gm;
          t0 = 1.0 / std::max(1.0, gm.norm());
        }
      }
      double t = t0;
      for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
        Vector xn = x + t * dir;
        detail::clamp_and_shrink(xn, space);
        const Vector step = xn - x;
        if (step.squaredNorm() == 0.0) break;
        Vector gn;
        const double fn = obj.value_and_gradient(xn, gn);
        if (std::isfinite(fn) && fn <= f + 1e-4 * g.dot(step)) {
          const Vector y = gn - g;
          const double sy = step.dot(y);
          if (sy > 1e-12 * step.norm() * y.norm() && sy > 0.0) {
            mem.push_back(Pair{step, y, 1.0 / sy});
            if (mem.size() > cfg.memory) mem.pop_front();
          }
          x = std::move(xn);
          g = std::move(gn);
          f = fn;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (mem.empty()) break;
        mem.clear();
      }
    }
    if (!accepted) break;
  }
  out.theta = x;
  out.sse = f;
  out.converged = converged;
  out.iterations = iter;
  return out;
}

/// Draws the initial point for start `s`.
inline Vector initial_point(const FitConfig& cfg, std::size_t s, Stream stream) {
  const ParamSpace& sp = cfg.space;
  if (s == 0 && cfg.oracle_truth) {
    std::vector<HiddenUnit> extra;
    for (std::size_t j = cfg.oracle_truth->k(); j < sp.k; ++j) {
      HiddenUnit u{0.0, Vector(static_cast<Eigen::Index>(sp.d)), 0.0};
      for (Eigen::Index c = 0; c < u.w.size(); ++c) u.w[c] = cfg.init_scale * stream.normal();
      u.b = cfg.init_scale * stream.normal();
      extra.push_back(std::move(u));
    }
    return to_vector(embed_units(*cfg.oracle_truth, sp.k, extra));
  }
  Vector x = sp.center_vector();
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += cfg.init_scale * stream.normal();
  for (std::size_t i = 0; i < sp.k; ++i) x[static_cast<Eigen::Index>(1 + i)] = std::abs(x[static_cast<Eigen::Index>(1 + i)]);
  return x;
}

/// Best-of-multistart least-squares fit. Start s draws from
/// stream.substream(s, Fit), so adding starts never changes earlier ones.
inline FitResult lse_fit(const Dataset& data, const FitConfig& cfg, Stream stream,
                         const TransferFunction& tf = tanh_transfer()) {
  cfg.validate();
  data.validate();
  if (cfg.space.d != data.d()) throw DimensionMismatch("fit space vs data", data.d(), cfg.space.d);
  if (cfg.oracle_truth && (cfg.oracle_truth->d() != data.d() || cfg.oracle_truth->k() > cfg.space.k))
    throw InvalidInput("oracle truth does not fit in the parameter space");

  const SseObjective obj(data, cfg.space.k, tf);
  FitResult best;
  best.start_sse.assign(cfg.starts, std::numeric_limits<double>::quiet_NaN());
  bool found = false;
  for (std::size_t s = 0; s < cfg.starts; ++s) {
    const Vector x0 = initial_point(cfg, s, stream.substream(s, Purpose::Fit));
    StartOutcome run = minimize_from(obj, x0, cfg);
    if (!std::isfinite(run.sse)) continue;
    best.start_sse[s] = run.sse;
    if (!found || run.sse < best.sse) {
      found = true;
      best.sse = run.sse;
      best.theta_hat = from_vector(run.theta, cfg.space.k, cfg.space.d);
      best.converged = run.converged;
      best.start_index = s;
      best.iterations = run.iterations;
    }
  }
  if (!found)
    throw PipelineError("lse_fit: all " + std::to_string(cfg.starts) +
                        " starts produced a non-finite objective (n = " + std::to_string(data.n()) + ")");
  return best;
}

}  // namespace nnasym
