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

#include <gtest/gtest.h>

#include "nnasym/fit.hpp"
#include "nnasym/statistic.hpp"

using namespace nnasym;

namespace {

MlpParams flagship_truth() {
  MlpParams t;
  t.units.push_back(HiddenUnit{1.0, Vector::Constant(1, 1.0), 0.3});
  return t;
}

FitConfig config(std::size_t k, std::size_t d, double radius = 4.0) {
  FitConfig c;
  c.space = ParamSpace::origin_ball(k, d, radius);
  c.starts = 4;
  return c;
}

}  // namespace

TEST(Sse, Examples) {
  Dataset data;
  data.xs = Matrix::Constant(1, 1, 0.4);
  data.ys = Vector::Constant(1, 2.0);
  MlpParams p;
  p.beta = 0.5;
  p.units.push_back(HiddenUnit{0.0, Vector::Constant(1, 1.0), 0.0});
  EXPECT_DOUBLE_EQ(sse(p, data), 2.25);

  const MlpParams t = flagship_truth();
  const Dataset clean = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.0), 100, Stream(1));
  EXPECT_EQ(sse(t, clean), 0.0);
}

TEST(Sse, MatchesNaiveSummation) {
  Stream s(4);
  const MlpParams t = flagship_truth();
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.5), 300, s.substream(trial, Purpose::Data));
    MlpParams p = MlpParams::zeros(2, 1);
    p.beta = s.normal();
    for (auto& u : p.units) {
      u.a = s.uniform(0.0, 2.0);
      u.w[0] = s.normal();
      u.b = s.normal();
    }
    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < data.xs.rows(); ++i) {
      long double f = p.beta;
      for (const auto& u : p.units) f += u.a * std::tanh(u.w[0] * data.xs(i, 0) + u.b);
      const long double r = data.ys[i] - f;
      acc += r * r;
    }
    EXPECT_NEAR(sse(p, data), static_cast<double>(acc), 1e-12 * static_cast<double>(acc));
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 50, Stream(2));
  for (const auto* tf : {&tanh_transfer(), &logistic_transfer()}) {
    const SseObjective obj(data, 2, *tf);
    Stream s(3);
    Vector x(static_cast<Eigen::Index>(param_dim(2, 1)));
    for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = s.normal();
    Vector g;
    obj.value_and_gradient(x, g);
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      Vector up = x, dn = x;
      up[c] += 1e-6;
      dn[c] -= 1e-6;
      EXPECT_NEAR(g[c], (obj.value(up) - obj.value(dn)) / 2e-6, 1e-4 * std::max(1.0, std::abs(g[c])));
    }
  }
}

TEST(Projection, Examples) {
  const ParamSpace sp = ParamSpace::origin_ball(2, 1, 4.0);
  Vector inside(7);
  inside << 0.1, 0.5, 0.2, 0.0, 0.3, 1.0, -1.0;
  EXPECT_EQ(to_vector(project_to_space(inside, sp)), inside);
  Vector neg = inside;
  neg[1] = -0.5;
  EXPECT_EQ(project_to_space(neg, sp).units[0].a, 0.0);
  Stream s(6);
  for (int i = 0; i < 1000; ++i) {
    Vector v(7);
    for (Eigen::Index c = 0; c < 7; ++c) v[c] = 5.0 * s.normal();
    const Vector once = to_vector(project_to_space(v, sp));
    EXPECT_EQ(to_vector(project_to_space(once, sp)), once);
    EXPECT_TRUE(in_space(from_vector(once, 2, 1), sp));
  }
}

TEST(LseFit, NoiselessRecovery) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.0), 500, Stream(8));
  FitConfig cfg = config(1, 1);
  cfg.oracle_truth.reset();
  cfg.grad_tol = 1e-12;
  cfg.stall_window = 0;
  const FitResult r = lse_fit(data, cfg, Stream(9));
  EXPECT_LE(r.sse, 1e-10);
  const Matrix fresh = sample_inputs(InputLaw::standard_normal(1), 2000, Stream(10));
  const Vector diff = mlp_eval_rows(r.theta_hat, fresh) - mlp_eval_rows(t, fresh);
  EXPECT_LE(std::sqrt(diff.squaredNorm() / 2000.0), 1e-5);
}

TEST(LseFit, ConstantData) {
  Dataset data;
  data.xs = sample_inputs(InputLaw::standard_normal(1), 100, Stream(1));
  data.ys = Vector::Constant(100, 0.7);
  const FitResult r = lse_fit(data, config(1, 1), Stream(2));
  MlpParams constant = MlpParams::zeros(1, 1);
  constant.beta = 0.7;
  EXPECT_LE(r.sse, sse(constant, data) + 1e-12);
}

TEST(LseFit, MoreStartsNeverWorse) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 300, Stream(11));
  FitConfig few = config(2, 1);
  few.starts = 3;
  FitConfig many = few;
  many.starts = 6;
  const FitResult a = lse_fit(data, few, Stream(12));
  const FitResult b = lse_fit(data, many, Stream(12));
  EXPECT_LE(b.sse, a.sse);
  for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(a.start_sse[s], b.start_sse[s]);
}

TEST(LseFit, OracleStartDominatesTruth) {
  const MlpParams t = flagship_truth();
  FitConfig cfg = config(2, 1);
  cfg.oracle_truth = t;
  for (int rep = 0; rep < 5; ++rep) {
    const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 200, Stream(rep));
    const FitResult r = lse_fit(data, cfg, Stream(100 + rep));
    EXPECT_GE(sse_difference(t, r.theta_hat, data), -1e-8);
    EXPECT_TRUE(in_space(r.theta_hat, cfg.space));
  }
}

TEST(LseFit, Deterministic) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 200, Stream(5));
  const FitResult a = lse_fit(data, config(2, 1), Stream(6));
  const FitResult b = lse_fit(data, config(2, 1), Stream(6));
  EXPECT_EQ(to_vector(a.theta_hat), to_vector(b.theta_hat));
}

TEST(LseFit, Errors) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 20, Stream(5));
  FitConfig bad = config(2, 1);
  bad.starts = 0;
  EXPECT_THROW(lse_fit(data, bad, Stream(1)), InvalidInput);
  EXPECT_THROW(lse_fit(data, config(2, 2), Stream(1)), DimensionMismatch);
  Dataset broken = data;
  broken.ys[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(lse_fit(broken, config(1, 1), Stream(1)), PipelineError);
}
