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
#include <cmath>
#include <set>

#include "nnasym/limitset/partitions.hpp"
#include "nnasym/model.hpp"
#include "nnasym/verify.hpp"

using namespace nnasym;

namespace {

MlpParams one_unit(double beta, double a, double w, double b) {
  MlpParams p;
  p.beta = beta;
  p.units.push_back(HiddenUnit{a, Vector::Constant(1, w), b});
  return p;
}

Vector x1(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST(Transfer, DerivativesMatchFiniteDifferences) {
  for (const auto* tf : {&tanh_transfer(), &logistic_transfer()}) {
    Stream s(7);
    for (int i = 0; i < 1000; ++i) {
      const double z = s.uniform(-10.0, 10.0), h = 1e-5;
      EXPECT_NEAR(tf->phi1(z), (tf->phi(z + h) - tf->phi(z - h)) / (2 * h), 1e-7) << tf->name;
      EXPECT_NEAR(tf->phi2(z), (tf->phi1(z + h) - tf->phi1(z - h)) / (2 * h), 1e-7) << tf->name;
      EXPECT_LE(std::abs(tf->phi(z)), 1.0);
      EXPECT_LE(std::abs(tf->phi1(z)), 1.0);
      EXPECT_LE(std::abs(tf->phi2(z)), 1.0);
    }
  }
  EXPECT_THROW(transfer_by_name("relu"), InvalidInput);
}

TEST(MlpEval, Examples) {
  MlpParams p = one_unit(0.5, 2.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(mlp_eval(p, x1(3.7)), 0.5);
  EXPECT_DOUBLE_EQ(mlp_eval(one_unit(1.0, 1.0, 1.0, 0.3), x1(-0.3)), 1.0);

  MlpParams split = one_unit(0.0, 0.3, 1.0, 0.0);
  split.units.push_back(HiddenUnit{0.7, Vector::Constant(1, 1.0), 0.0});
  const MlpParams whole = one_unit(0.0, 1.0, 1.0, 0.0);
  for (double x : {-2.0, -0.1, 0.0, 0.4, 3.0}) EXPECT_NEAR(mlp_eval(split, x1(x)), mlp_eval(whole, x1(x)), 1e-15);

  EXPECT_THROW(mlp_eval(p, Vector::Zero(2)), DimensionMismatch);
}

TEST(MlpEval, RowsAgreeWithPointwise) {
  Stream s(3);
  const MlpParams t = random_truth(s, 2, 2);
  Matrix xs(10, 2);
  for (Eigen::Index e = 0; e < xs.size(); ++e) xs.data()[e] = s.normal();
  const Vector f = mlp_eval_rows(t, xs);
  for (Eigen::Index r = 0; r < xs.rows(); ++r) EXPECT_DOUBLE_EQ(f[r], mlp_eval(t, xs.row(r).transpose()));
}

TEST(ParamLayout, RoundTrip) {
  Stream s(11);
  const MlpParams t = random_truth(s, 3, 2);
  const Vector v = to_vector(t);
  ASSERT_EQ(static_cast<std::size_t>(v.size()), param_dim(3, 2));
  EXPECT_DOUBLE_EQ(v[0], t.beta);
  EXPECT_DOUBLE_EQ(v[1], t.units[0].a);
  EXPECT_DOUBLE_EQ(v[4], t.units[0].b);
  EXPECT_DOUBLE_EQ(v[7], t.units[0].w[0]);
  const MlpParams back = from_vector(v, 3, 2);
  EXPECT_EQ(to_vector(back), v);
  EXPECT_THROW(from_vector(v, 2, 2), DimensionMismatch);
}

TEST(ParamGradient, Examples) {
  const MlpParams p = one_unit(0.2, 1.3, 0.0, 0.0);
  const Vector g = mlp_param_gradient(p, x1(0.9));
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(ParamGradient, MatchesCentralDifferences) {
  Stream s(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + trial % 3, d = 1 + trial % 2;
    MlpParams p = MlpParams::zeros(k, d);
    Vector v = to_vector(p);
    for (Eigen::Index c = 0; c < v.size(); ++c) v[c] = s.normal();
    p = from_vector(v, k, d);
    Vector x(static_cast<Eigen::Index>(d));
    for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = s.normal();
    const Vector g = mlp_param_gradient(p, x);
    const double h = 1e-5;
    Vector fd(v.size());
    for (Eigen::Index c = 0; c < v.size(); ++c) {
      Vector up = v, dn = v;
      up[c] += h;
      dn[c] -= h;
      fd[c] = (mlp_eval(from_vector(up, k, d), x) - mlp_eval(from_vector(dn, k, d), x)) / (2 * h);
    }
    EXPECT_LE((fd - g).norm(), 1e-6 * std::max(1.0, g.norm())) << "trial " << trial;
  }
}

TEST(Partition, Invariants) {
  Partition p;
  p.k0 = 2;
  p.labels = {UnitLabel::true_unit(0), UnitLabel::free()};
  EXPECT_THROW(p.validate(), InvalidInput);  // class 2 empty
  p.labels = {UnitLabel::true_unit(0), UnitLabel::true_unit(1), UnitLabel::zero_weight(), UnitLabel::zero_weight()};
  EXPECT_NO_THROW(p.validate());
  p.labels.push_back(UnitLabel::true_unit(2));
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(EnumeratePartitions, Counts) {
  EXPECT_EQ(enumerate_partitions(1, 1).size(), 1u);
  EXPECT_EQ(enumerate_partitions(1, 1)[0].describe(), "T1");
  const auto two = enumerate_partitions(2, 1);
  ASSERT_EQ(two.size(), 3u);
  std::vector<std::string> names;
  for (const auto& p : two) names.push_back(p.describe());
  EXPECT_NE(std::find(names.begin(), names.end(), "T1 T1"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "Z T1"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "T1 F"), names.end());
  EXPECT_THROW(enumerate_partitions(1, 2), InvalidInput);

  // Brute force: label every unit independently, keep valid ones, count
  // distinct multisets (orbits under permutation).
  for (std::size_t k0 = 1; k0 <= 2; ++k0) {
    for (std::size_t k = k0; k <= 4; ++k) {
      const std::size_t kinds = k0 + 2;
      std::set<std::vector<std::size_t>> orbits;
      std::vector<std::size_t> lab(k, 0);
      for (;;) {
        std::vector<std::size_t> hist(kinds, 0);
        for (auto l : lab) hist[l] += 1;
        bool ok = hist[0] <= k - k0;
        for (std::size_t i = 0; i < k0; ++i) ok = ok && hist[2 + i] >= 1;
        if (ok) orbits.insert(hist);
        std::size_t c = 0;
        while (c < k && ++lab[c] == kinds) lab[c++] = 0;
        if (c == k) break;
      }
      EXPECT_EQ(enumerate_partitions(k, k0).size(), orbits.size()) << "k=" << k << " k0=" << k0;
    }
  }
}

TEST(Reparameterize, ExactTruth) {
  const MlpParams t = one_unit(0.1, 1.0, 1.0, 0.3);
  const auto rep = reparameterize(t, t);
  EXPECT_EQ(rep.partition.describe(), "T1");
  EXPECT_DOUBLE_EQ(rep.coords.gamma, 0.0);
  EXPECT_DOUBLE_EQ(rep.coords.s[0], 0.0);
  EXPECT_DOUBLE_EQ(rep.coords.q[0], 1.0);
}

TEST(Reparameterize, SplitUnit) {
  const MlpParams truth = one_unit(0.0, 1.0, 1.0, 0.0);
  MlpParams p = one_unit(0.0, 0.3, 1.0, 0.0);
  p.units.push_back(HiddenUnit{0.7, Vector::Constant(1, 1.0), 0.0});
  const auto rep = reparameterize(p, truth);
  EXPECT_EQ(rep.partition.describe(), "T1 T1");
  EXPECT_NEAR(rep.coords.s[0], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(rep.coords.q[0], 0.3);
  EXPECT_DOUBLE_EQ(rep.coords.q[1], 0.7);
  EXPECT_DOUBLE_EQ(rep.coords.gamma, 0.0);
}

TEST(Reparameterize, ZeroWeightAbsorbedIntoGamma) {
  const MlpParams truth = one_unit(0.0, 1.0, 1.0, 0.3);
  MlpParams p = one_unit(0.0, 0.5, 0.0, 0.2);
  p.units.push_back(truth.units[0]);
  const auto rep = reparameterize(p, truth);
  EXPECT_EQ(rep.partition.labels[0].role, UnitRole::ZeroWeight);
  EXPECT_EQ(rep.partition.labels[1].role, UnitRole::TrueUnit);
  EXPECT_NEAR(rep.coords.gamma, 0.5 * std::tanh(0.2), 1e-15);
}

TEST(Reparameterize, Errors) {
  MlpParams truth = one_unit(0.0, 1.0, 1.0, 0.0);
  truth.units.push_back(HiddenUnit{1.0, Vector::Constant(1, 1.0), 1e-7});
  EXPECT_THROW(reparameterize(one_unit(0.0, 1.0, 1.0, 0.0), truth, 1e-3), InvalidInput);  // ambiguous
  const MlpParams t1 = one_unit(0.0, 1.0, 1.0, 0.0);
  EXPECT_THROW(reparameterize(one_unit(0.0, 1.0, -2.0, 0.0), t1), InvalidInput);  // empty class
}

TEST(Reparameterize, ReconstructRoundTrip) {
  Stream s(21);
  for (int trial = 0; trial < 50; ++trial) {
    const MlpParams truth = random_truth(s, 1 + trial % 2, 1 + trial % 2);
    Reparameterization rep = random_reparameterization(s, truth, trial % 3);
    rep.coords.gamma = s.normal();
    for (auto& v : rep.coords.s) v = 0.1 * s.normal();
    for (auto j : rep.partition.units_with(UnitRole::Free)) rep.coords.a[j] = s.uniform(0.1, 1.0);
    const MlpParams p = reconstruct(rep, truth);
    const auto again = reparameterize(p, truth, 1e-9);
    EXPECT_EQ(again.partition.describe(), rep.partition.describe());
    EXPECT_NEAR(again.coords.gamma, rep.coords.gamma, 1e-12);
    for (std::size_t i = 0; i < truth.k(); ++i) {
      EXPECT_NEAR(again.coords.s[i], rep.coords.s[i], 1e-12);
      double sum = 0.0;
      for (auto j : again.partition.members(i)) {
        EXPECT_NEAR(again.coords.q[j], rep.coords.q[j], 1e-12);
        sum += again.coords.q[j];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    const MlpParams q = reconstruct(again, truth);
    for (int i = 0; i < 5; ++i) {
      Vector x(static_cast<Eigen::Index>(truth.d()));
      for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = s.normal();
      EXPECT_NEAR(mlp_eval(p, x), mlp_eval(q, x), 1e-12);
    }
  }
}

TEST(Identifiable, RoundTripAndAnchor) {
  Stream s(8);
  const MlpParams truth = random_truth(s, 2, 2);
  const Reparameterization rep = random_reparameterization(s, truth, 2);
  const Vector phi0 = identifiable_anchor(rep, truth);
  EXPECT_EQ(static_cast<std::size_t>(phi0.size()), identifiable_dim(rep.partition, 2));
  const MlpParams at = reconstruct(with_identifiable(rep, phi0), truth);
  for (int i = 0; i < 5; ++i) {
    Vector x(2);
    x << s.normal(), s.normal();
    EXPECT_NEAR(mlp_eval(at, x), mlp_eval(truth, x), 1e-12);
  }
  EXPECT_EQ(identifiable_vector(with_identifiable(rep, phi0)), phi0);
  EXPECT_THROW(with_identifiable(rep, Vector::Zero(1)), DimensionMismatch);
}

TEST(TaylorTerms, ZeroAtAnchor) {
  Stream s(4);
  const MlpParams truth = random_truth(s, 2, 1);
  const Reparameterization rep = random_reparameterization(s, truth, 2);
  const auto at = with_identifiable(rep, identifiable_anchor(rep, truth));
  const TaylorTerms tt = taylor_terms(at, truth, x1(0.7));
  EXPECT_NEAR(tt.first, 0.0, 1e-15);
  EXPECT_NEAR(tt.second, 0.0, 1e-15);
}

TEST(TaylorTerms, FiniteDifferencesAndRemainderSlope) {
  const SuiteResult r = taylor_suite(100, 99);
  EXPECT_EQ(r.passed, 100u) << r.to_json().dump();
}

TEST(TaylorTerms, Errors) {
  const MlpParams truth = one_unit(0.0, 1.0, 1.0, 0.0);
  auto rep = reparameterize(truth, truth);
  MlpParams two = truth;
  two.units.push_back(HiddenUnit{1.0, Vector::Constant(1, -1.0), 0.5});
  EXPECT_THROW(taylor_terms(rep, two, x1(0.0)), DimensionMismatch);
  rep.coords.vanished[0] = true;
  EXPECT_THROW(taylor_terms(rep, truth, x1(0.0)), InvalidInput);
}

TEST(ParamSpace, CenterAndBoundary) {
  const ParamSpace sp = ParamSpace::origin_ball(2, 1, 4.0);
  EXPECT_NO_THROW(sp.validate());
  const MlpParams t = embed_units(one_unit(0.0, 1.0, 1.0, 0.3), 2);
  EXPECT_NEAR(sp.boundary_distance(t), 4.0 - std::sqrt(2.09), 1e-12);
  EXPECT_THROW(ParamSpace::origin_ball(2, 1, -1.0).validate(), InvalidInput);
}
