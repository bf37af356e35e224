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

#include <algorithm>
#include <limits>
#include <memory>

#include "nnasym/statistic.hpp"
#include "nnasym/verify.hpp"

using namespace nnasym;

namespace {

MlpParams flagship_truth() {
  MlpParams t;
  t.units.push_back(HiddenUnit{1.0, Vector::Constant(1, 1.0), 0.3});
  return t;
}

std::shared_ptr<const Matrix> quad(std::size_t m, std::uint64_t seed) {
  return std::make_shared<const Matrix>(sample_inputs(InputLaw::standard_normal(1), m, Stream(seed)));
}

}  // namespace

TEST(SseDifference, Examples) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 300, Stream(1));
  EXPECT_EQ(sse_difference(t, t, data), 0.0);

  // Grid over (a, b) containing the truth: the grid minimizer beats the truth.
  double best = std::numeric_limits<double>::infinity();
  MlpParams arg = t;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      MlpParams p = t;
      p.units[0].a = 0.5 + 0.05 * i;
      p.units[0].b = -0.2 + 0.05 * j;
      const double v = sse(p, data);
      if (v < best) {
        best = v;
        arg = p;
      }
    }
  EXPECT_GE(sse_difference(t, arg, data), 0.0);

  long double naive_t = 0.0L, naive_f = 0.0L;
  for (Eigen::Index i = 0; i < data.xs.rows(); ++i) {
    const long double rt = data.ys[i] - std::tanh(data.xs(i, 0) + 0.3);
    const long double rf = data.ys[i] - arg.units[0].a * std::tanh(data.xs(i, 0) + arg.units[0].b);
    naive_t += rt * rt;
    naive_f += rf * rf;
  }
  const double naive = static_cast<double>(naive_t - naive_f);
  EXPECT_NEAR(sse_difference(t, arg, data), naive, 1e-10 * std::abs(naive) + 1e-12);
}

TEST(GeneralizedDerivative, ConstantShift) {
  const MlpParams t = flagship_truth();
  const auto q = quad(1000, 2);
  MlpParams up = t, down = t;
  up.beta += 0.3;
  down.beta -= 0.3;
  const GeneralizedDerivative gu(up, t, q), gd(down, t, q);
  for (double x : {-2.0, 0.0, 1.5}) {
    EXPECT_NEAR(gen_derivative_eval(gu, Vector::Constant(1, x)), 1.0, 1e-12);
    EXPECT_NEAR(gen_derivative_eval(gd, Vector::Constant(1, x)), -1.0, 1e-12);
  }
}

TEST(GeneralizedDerivative, NormalizedOnQuadrature) {
  const MlpParams t = flagship_truth();
  const auto q = quad(5000, 3);
  MlpParams f = embed_units(t, 2, {HiddenUnit{0.0, Vector::Constant(1, -0.8), 0.4}});
  f.units[1].a = 0.05;
  f.units[0].w[0] = 1.02;
  const GeneralizedDerivative g(f, t, q);
  const Vector d = g.eval_rows(*q);
  EXPECT_NEAR(d.squaredNorm() / 5000.0, 1.0, 1e-12);
  const Matrix fresh = sample_inputs(InputLaw::standard_normal(1), 1000000, Stream(4));
  const Vector df = g.eval_rows(fresh);
  EXPECT_NEAR(df.squaredNorm() / 1e6, 1.0, 0.01);
}

TEST(GeneralizedDerivative, RejectsDegenerate) {
  const MlpParams t = flagship_truth();
  EXPECT_THROW(GeneralizedDerivative(t, t, quad(100, 1)), Degenerate);
  EXPECT_THROW(GeneralizedDerivative(t, t, std::make_shared<const Matrix>()), InvalidInput);
}

TEST(Lemma1, NoiselessAndEquality) {
  const MlpParams t = flagship_truth();
  const auto q = quad(1000, 5);
  const Dataset clean = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.0), 200, Stream(6));
  MlpParams f = t;
  f.units[0].a = 1.2;
  const Lemma1Bound b0 = lemma1_bound(t, f, clean, GeneralizedDerivative(f, t, q));
  EXPECT_LE(b0.lhs, 0.0);
  EXPECT_EQ(b0.rhs, 0.0);
  EXPECT_TRUE(b0.holds());

  // f = f0 + c g with c = <eps, g> / <g, g> attains the bound.
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.5), 200, Stream(7));
  const HiddenUnit g{1.0, Vector::Constant(1, 0.5), -0.2};
  MlpParams gnet;
  gnet.units.push_back(g);
  const Vector gv = mlp_eval_rows(gnet, data.xs);
  const Vector eps = data.ys - mlp_eval_rows(t, data.xs);
  HiddenUnit scaled = g;
  scaled.a = eps.dot(gv) / gv.squaredNorm();
  MlpParams fe2 = embed_units(t, 2, {scaled});
  fe2.units[1].a = scaled.a;
  const Lemma1Bound be = lemma1_bound(t, fe2, data, GeneralizedDerivative(fe2, t, q));
  EXPECT_NEAR(be.lhs, be.rhs, 1e-9 * std::max(1.0, be.rhs));
}

TEST(Lemma1, RandomSweep) {
  const SuiteResult r = lemma1_sweep(1000, 2026);
  EXPECT_EQ(r.passed, 1000u) << r.to_json().dump();
}

TEST(Normalization, QuadratureSampleGivesZero) {
  const MlpParams t = flagship_truth();
  const auto q = quad(2000, 8);
  MlpParams f = t;
  f.units[0].b = 0.35;
  const GeneralizedDerivative g(f, t, q);
  Dataset data;
  data.xs = *q;
  data.ys = Vector::Zero(q->rows());
  EXPECT_NEAR(normalization_diagnostic(g, data), 0.0, 1e-12);
}

TEST(Normalization, ShrinksWithSampleSize) {
  const MlpParams t = flagship_truth();
  std::vector<double> medians;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::vector<double> diags;
    const auto q = std::make_shared<const Matrix>(
        sample_inputs(InputLaw::standard_normal(1), 200000, Stream::derive(31, 0, Purpose::Quadrature)));
    for (std::size_t i = 0; i < 15; ++i) {
      Stream s = Stream::derive(77, i, Purpose::Verify);
      MlpParams f = t;
      f.units[0].a += 0.05 * s.normal();
      f.units[0].b += 0.05 * s.normal();
      const GeneralizedDerivative g(f, t, q);
      diags.push_back(normalization_diagnostic(
          g, sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), n, s.substream(0, Purpose::Data))));
    }
    std::nth_element(diags.begin(), diags.begin() + 7, diags.end());
    medians.push_back(diags[7]);
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}

TEST(Normalization, FiftyRandomNearTruth) {
  const SuiteResult r = normalization_suite(flagship_truth(), 50, 100000, 200000, 12);
  EXPECT_GE(r.passed, 48u) << r.to_json().dump();
}

TEST(EmpiricalProcess, Examples) {
  const std::vector<double> d{0.5, -1.0, 1.5};
  const std::vector<double> zero(3, 0.0), e{0.1, 0.2, -0.3};
  EXPECT_EQ(empirical_process_draw(d, zero), 0.0);
  std::vector<double> e3 = e;
  for (auto& v : e3) v *= 3.0;
  EXPECT_NEAR(empirical_process_draw(d, e3), 3.0 * empirical_process_draw(d, e), 1e-15);
  EXPECT_THROW(empirical_process_draw(d, std::vector<double>(2, 0.0)), DimensionMismatch);
}

TEST(EmpiricalProcess, VarianceMatchesNoise) {
  const std::size_t n = 200;
  Stream s(13);
  std::vector<double> d(n);
  double sq = 0.0;
  for (auto& v : d) sq += (v = s.normal()) * v;
  for (auto& v : d) v /= std::sqrt(sq / static_cast<double>(n));
  std::vector<double> draws;
  std::vector<double> eps(n);
  for (int r = 0; r < 100000; ++r) {
    for (auto& v : eps) v = s.normal();
    draws.push_back(empirical_process_draw(d, eps));
  }
  double mean = 0.0, var = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  for (double v : draws) var += (v - mean) * (v - mean);
  var /= static_cast<double>(draws.size() - 1);
  EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(TnSample, CsvRoundTrip) {
  TnSample tn;
  tn.n = 2000;
  tn.values = {0.125, -1e-9, 3.0000000000000004};
  tn.replications = {0, 2, 5};
  const std::string csv = tn_to_csv(tn);
  EXPECT_EQ(csv.substr(0, 17), "replication,n,tn\n");
  const TnSample back = tn_from_csv(csv);
  EXPECT_EQ(back.values, tn.values);
  EXPECT_EQ(back.replications, tn.replications);
  EXPECT_EQ(back.n, 2000u);
  EXPECT_THROW(tn_from_csv("a,b\n"), InvalidInput);
}
