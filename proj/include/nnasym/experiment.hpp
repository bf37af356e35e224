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

// Monte Carlo pipelines: the empirical law of T_n, the simulated limit law,
// and their comparison.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnasym/data.hpp"
#include "nnasym/errors.hpp"
#include "nnasym/fit.hpp"
#include "nnasym/limitset/basis.hpp"
#include "nnasym/limitset/simulate.hpp"
#include "nnasym/model.hpp"
#include "nnasym/parallel.hpp"
#include "nnasym/rng.hpp"
#include "nnasym/statistic.hpp"

namespace nnasym {

struct LimitConfig {
  std::size_t draws = 100000;
  std::size_t grid_points = 21;  // per axis
  double grid_radius = 0.0;      // 0: largest radius keeping a free unit inside the fit ball
  double grid_exclusion = 1e-3;
  std::size_t quad_m = 200000;
  SupSettings search;
};

struct ExperimentConfig {
  MlpParams truth;
  std::string transfer = "tanh";
  ParamSpace space;
  std::size_t n = 2000;
  std::size_t replications = 500;
  NoiseLaw noise = NoiseLaw::gaussian(0.3);
  InputLaw input = InputLaw::standard_normal(1);
  FitConfig fit;  // fit.space is overwritten by `space`
  bool oracle_start = true;
  LimitConfig limit;
  std::uint64_t master_seed = 20260415;
  unsigned threads = 1;
  double failure_cap = 0.05;

  /// d = 1, k0 = 1, truth (beta 0, a 1, w 1, b 0.3), k = 2, sigma 0.3.
  static ExperimentConfig flagship() {
    ExperimentConfig c;
    c.truth.beta = 0.0;
    c.truth.units.push_back(HiddenUnit{1.0, Vector::Constant(1, 1.0), 0.3});
    c.space = ParamSpace::origin_ball(2, 1, 4.0);
    return c;
  }

  const TransferFunction& tf() const { return transfer_by_name(transfer); }
  double sigma2() const { return noise.sigma * noise.sigma; }

  FitConfig fit_config() const {
    FitConfig f = fit;
    f.space = space;
    if (oracle_start) f.oracle_truth = truth;
    else f.oracle_truth.reset();
    return f;
  }

  void validate() const {
    check_minimal_truth(truth);
    (void)tf();
    space.validate();
    if (space.k < truth.k())
      throw InvalidInput("fit.k = " + std::to_string(space.k) + " is smaller than truth.k0 = " + std::to_string(truth.k()));
    if (space.d != truth.d()) throw DimensionMismatch("fit.d vs truth.d", truth.d(), space.d);
    if (input.d != truth.d()) throw DimensionMismatch("input law d vs truth.d", truth.d(), input.d);
    input.validate();
    noise.validate();
    fit_config().validate();
    if (n == 0) throw InvalidInput("data.n must be >= 1");
    if (replications == 0) throw InvalidInput("experiment.replications must be >= 1");
    if (limit.draws == 0) throw InvalidInput("limit.draws must be >= 1");
    if (limit.quad_m == 0) throw InvalidInput("limit.quad_m must be >= 1");
    if (limit.grid_points < 2) throw InvalidInput("limit.grid_points must be >= 2");
    if (limit.grid_radius < 0.0) throw InvalidInput("limit.grid_radius must be >= 0");
    if (limit.search.starts == 0 || limit.search.iters == 0) throw InvalidInput("limit search needs starts, iters >= 1");
    if (!(failure_cap >= 0.0 && failure_cap <= 1.0)) throw InvalidInput("experiment.failure_cap must lie in [0, 1]");
    if (space.boundary_distance(embed_units(truth, space.k)) <= 0.0)
      throw InvalidInput("the truth does not lie inside the fit ball");
    if (space.k > truth.k()) (void)grid_radius();
  }

  /// Radius of the free-unit grid.
  double grid_radius() const {
    if (limit.grid_radius > 0.0) return limit.grid_radius;
    const double inner = (to_vector(embed_units(truth, space.k)) - space.center_vector()).squaredNorm();
    const double r2 = space.radius * space.radius - inner;
    if (!(r2 > 0.0)) throw InvalidInput("fit ball leaves no room for free units");
    return std::sqrt(r2);
  }

  /// Degrees of freedom of the identifiable reference law.
  std::size_t chi2_df() const { return 1 + truth.k() + truth.k() * (truth.d() + 1); }
};

// ---------------------------------------------------------------------------
// T_n

/// Replication r draws its dataset from derive(seed, r, Data) and its fit
/// starts from derive(seed, r, Fit).
inline TnSample run_tn_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  const TransferFunction& tf = cfg.tf();
  const FitConfig fit = cfg.fit_config();
  std::vector<double> values(cfg.replications, 0.0);
  std::vector<char> ok(cfg.replications, 0);
  std::vector<char> converged(cfg.replications, 0);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    const Dataset data = sample_dataset(cfg.truth, cfg.input, cfg.noise, cfg.n,
                                        Stream::derive(cfg.master_seed, r, Purpose::Data), tf);
    try {
      const FitResult res = lse_fit(data, fit, Stream::derive(cfg.master_seed, r, Purpose::Fit), tf);
      const double tn = sse_difference(cfg.truth, res.theta_hat, data, tf);
      if (!std::isfinite(tn)) return;
      values[r] = tn;
      ok[r] = 1;
      converged[r] = res.converged ? 1 : 0;
    } catch (const PipelineError&) {
    }
  });
  TnSample out;
  out.n = cfg.n;
  std::size_t nonconverged = 0;
  for (std::size_t r = 0; r < cfg.replications; ++r) {
    if (!ok[r]) {
      out.failures += 1;
      continue;
    }
    out.values.push_back(values[r]);
    out.replications.push_back(r);
    if (!converged[r]) nonconverged += 1;
  }
  out.meta = "seed=" + std::to_string(cfg.master_seed) + " k=" + std::to_string(cfg.space.k) +
             " k0=" + std::to_string(cfg.truth.k()) + " nonconverged=" + std::to_string(nonconverged);
  if (static_cast<double>(out.failures) > cfg.failure_cap * static_cast<double>(cfg.replications) || out.values.empty())
    throw PipelineError(std::to_string(out.failures) + " of " + std::to_string(cfg.replications) +
                        " replications failed to fit (cap " + io::format_double(cfg.failure_cap) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// Limit law

struct LimitRun {
  SupSample sample;
  nlohmann::json manifest;
};

inline Matrix quadrature_sample(const ExperimentConfig& cfg) {
  return sample_inputs(cfg.input, cfg.limit.quad_m, Stream::derive(cfg.master_seed, 0, Purpose::Quadrature));
}

inline LimitRun simulate_limit(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t k = cfg.space.k;
  std::vector<std::pair<Vector, double>> grid;
  std::string grid_spec = "none";
  if (k > cfg.truth.k()) {
    const double R = cfg.grid_radius();
    grid = make_free_grid(cfg.truth, cfg.limit.grid_points, R, cfg.limit.grid_exclusion);
    grid_spec = std::to_string(cfg.limit.grid_points) + "^" + std::to_string(cfg.truth.d() + 1) + " over [-" +
                io::format_double(R) + "," + io::format_double(R) + "], " + std::to_string(grid.size()) + " kept";
  }
  const Matrix quad = quadrature_sample(cfg);
  const GramBasis basis = build_joint_basis(cfg.truth, k, grid, quad, BasisOptions{}, cfg.tf());
  std::vector<std::string> labels;
  auto pieces = pieces_for(basis, k, cfg.truth.k(), cfg.truth.d(), &labels);
  SupSettings settings = cfg.limit.search;
  settings.threads = cfg.threads;
  const SupSimulator sim(basis, std::move(pieces), settings);
  LimitRun out;
  out.sample = sim.run(cfg.limit.draws, Stream::derive(cfg.master_seed, 0, Purpose::LimitDraw));
  out.sample.grid_spec = grid_spec;
  out.manifest = basis_manifest(basis, sim, labels, grid_spec);
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

/// Empirical quantile, linear interpolation between order statistics
/// (R type 7). `sorted` must be ascending.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, p);
}

/// sup_x |F_a(x) - F_b(x)| of the two empirical CDFs.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("KS distance needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// sup_x |F_n(x) - F(x)| against a continuous reference CDF.
template <typename Cdf>
double ks_one_sample(std::vector<double> a, Cdf&& cdf) {
  if (a.empty()) throw InvalidInput("KS distance needs a non-empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double F = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

inline const std::vector<double>& comparison_levels() {
  static const std::vector<double> levels{0.5, 0.75, 0.9, 0.95, 0.99};
  return levels;
}

struct QuantileRow {
  double p = 0.0;
  double tn = 0.0;
  double limit = 0.0;     // sigma2 * sup quantile
  double chi2_ref = 0.0;  // sigma2 * chi2_df quantile
  bool dominates = false; // limit >= chi2_ref
};

struct ComparisonReport {
  double ks = 0.0;
  std::vector<QuantileRow> quantiles;
  std::size_t chi2_df = 0;
  std::size_t tn_count = 0;
  std::size_t sup_count = 0;
  std::size_t failures = 0;
  nlohmann::json seeds = nlohmann::json::object();
  std::optional<double> runtime_s;
};

inline ComparisonReport compare_distributions(const TnSample& tn, const SupSample& sup, double sigma2,
                                              std::size_t chi2_df) {
  if (tn.values.empty() || sup.values.empty()) throw InvalidInput("comparison needs non-empty samples");
  if (!(sigma2 > 0.0)) throw InvalidInput("comparison needs sigma2 > 0");
  if (chi2_df == 0) throw InvalidInput("comparison needs chi2 df >= 1");
  std::vector<double> a = tn.values, b;
  b.reserve(sup.values.size());
  for (double v : sup.values) b.push_back(sigma2 * v);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  ComparisonReport rep;
  rep.ks = ks_two_sample(a, b);
  rep.chi2_df = chi2_df;
  rep.tn_count = a.size();
  rep.sup_count = b.size();
  rep.failures = tn.failures;
  const boost::math::chi_squared chi2(static_cast<double>(chi2_df));
  for (double p : comparison_levels()) {
    QuantileRow row;
    row.p = p;
    row.tn = quantile_sorted(a, p);
    row.limit = quantile_sorted(b, p);
    row.chi2_ref = sigma2 * boost::math::quantile(chi2, p);
    row.dominates = row.limit >= row.chi2_ref;
    rep.quantiles.push_back(row);
  }
  return rep;
}

inline nlohmann::json report_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["ks"] = r.ks;
  nlohmann::json q = nlohmann::json::array();
  for (const auto& row : r.quantiles)
    q.push_back({{"p", row.p}, {"tn", row.tn}, {"limit", row.limit}, {"chi2_ref", row.chi2_ref},
                 {"limit_dominates_chi2", row.dominates}});
  j["quantiles"] = q;
  j["chi2_df"] = r.chi2_df;
  j["tn_count"] = r.tn_count;
  j["sup_count"] = r.sup_count;
  j["failures"] = r.failures;
  j["seeds"] = r.seeds;
  j["runtime_s"] = r.runtime_s ? nlohmann::json(*r.runtime_s) : nlohmann::json(nullptr);
  return j;
}

/// Seed provenance for a report.
inline nlohmann::json seed_record(const ExperimentConfig& cfg) {
  return {{"master_seed", cfg.master_seed},
          {"data_stream", "derive(master_seed, r, Data)"},
          {"fit_stream", "derive(master_seed, r, Fit)"},
          {"quadrature_stream", "derive(master_seed, 0, Quadrature)"},
          {"limit_stream", "derive(master_seed, 0, LimitDraw)"}};
}

}  // namespace nnasym
