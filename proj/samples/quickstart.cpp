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

// Fits a two-unit network to data from a one-unit truth, then compares a few
// draws of T_n with the simulated limit law.

#include <cstdio>

#include "nnasym/nnasym.hpp"

using namespace nnasym;

int main() {
  ExperimentConfig cfg = ExperimentConfig::flagship();
  cfg.n = 500;
  cfg.replications = 20;
  cfg.fit.starts = 4;
  cfg.limit.draws = 2000;
  cfg.limit.grid_points = 11;
  cfg.limit.quad_m = 20000;

  const TnSample tn = run_tn_monte_carlo(cfg);
  const LimitRun limit = simulate_limit(cfg);
  const ComparisonReport rep = compare_distributions(tn, limit.sample, cfg.sigma2(), cfg.chi2_df());

  std::printf("KS distance %.3f over %zu replications\n", rep.ks, rep.tn_count);
  std::printf("%6s %10s %10s %10s\n", "p", "T_n", "limit", "chi2_4");
  for (const auto& row : rep.quantiles) std::printf("%6.2f %10.4f %10.4f %10.4f\n", row.p, row.tn, row.limit, row.chi2_ref);
}
