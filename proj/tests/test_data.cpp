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

#include "nnasym/data.hpp"

using namespace nnasym;

namespace {

MlpParams flagship_truth() {
  MlpParams t;
  t.units.push_back(HiddenUnit{1.0, Vector::Constant(1, 1.0), 0.3});
  return t;
}

}  // namespace

TEST(SampleDataset, NoiselessIsExact) {
  const MlpParams t = flagship_truth();
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.0), 200, Stream(1));
  const Vector f0 = mlp_eval_rows(t, data.xs);
  for (Eigen::Index i = 0; i < f0.size(); ++i) EXPECT_EQ(data.ys[i], f0[i]);
}

TEST(SampleDataset, Deterministic) {
  const MlpParams t = flagship_truth();
  const auto a = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 100, Stream(42));
  const auto b = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 100, Stream(42));
  const auto c = sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(0.3), 100, Stream(43));
  EXPECT_EQ(a.xs, b.xs);
  EXPECT_EQ(a.ys, b.ys);
  EXPECT_NE(a.ys, c.ys);
}

TEST(SampleDataset, NoiseVariance) {
  const MlpParams t = flagship_truth();
  for (const NoiseLaw& law : {NoiseLaw::gaussian(1.0), NoiseLaw::rademacher(1.0)}) {
    const Dataset data = sample_dataset(t, InputLaw::standard_normal(1), law, 1000000, Stream(9));
    const Vector e = data.ys - mlp_eval_rows(t, data.xs);
    const double mean = e.mean();
    const double var = (e.array() - mean).square().sum() / static_cast<double>(e.size() - 1);
    EXPECT_GE(var, 0.99);
    EXPECT_LE(var, 1.01);
  }
}

TEST(SampleDataset, Errors) {
  const MlpParams t = flagship_truth();
  EXPECT_THROW(sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(1.0), 0, Stream(1)), InvalidInput);
  EXPECT_THROW(sample_dataset(t, InputLaw::standard_normal(2), NoiseLaw::gaussian(1.0), 5, Stream(1)),
               DimensionMismatch);
  EXPECT_THROW(sample_dataset(t, InputLaw::standard_normal(1), NoiseLaw::gaussian(-1.0), 5, Stream(1)), InvalidInput);
}

TEST(SampleInputs, Moments) {
  const Matrix n = sample_inputs(InputLaw::standard_normal(1), 1000000, Stream(5));
  EXPECT_LE(std::abs(n.mean()), 0.005);
  const Matrix u = sample_inputs(InputLaw::uniform_box(1, -1.0, 1.0), 1000000, Stream(6));
  const double mean = u.mean();
  const double var = (u.array() - mean).square().sum() / static_cast<double>(u.size() - 1);
  EXPECT_NEAR(var, 1.0 / 3.0, 0.005);
  EXPECT_GE(u.minCoeff(), -1.0);
  EXPECT_LT(u.maxCoeff(), 1.0);
}

TEST(SampleInputs, ReplayAndErrors) {
  EXPECT_EQ(sample_inputs(InputLaw::standard_normal(3), 50, Stream(2)),
            sample_inputs(InputLaw::standard_normal(3), 50, Stream(2)));
  EXPECT_THROW(sample_inputs(InputLaw::standard_normal(1), 0, Stream(2)), InvalidInput);
  EXPECT_THROW(sample_inputs(InputLaw::uniform_box(1, 1.0, 1.0), 5, Stream(2)), InvalidInput);
}

TEST(DatasetCsv, RoundTrip) {
  MlpParams t;
  t.units.push_back(HiddenUnit{0.7, Vector::Constant(2, 0.5), -0.2});
  const Dataset data = sample_dataset(t, InputLaw::standard_normal(2), NoiseLaw::gaussian(0.3), 25, Stream(3));
  const std::string csv = dataset_to_csv(data);
  EXPECT_EQ(csv.substr(0, 8), "x1,x2,y\n");
  const Dataset back = dataset_from_csv(csv);
  EXPECT_EQ(back.xs, data.xs);
  EXPECT_EQ(back.ys, data.ys);
  EXPECT_THROW(dataset_from_csv("x1,y\n1,2,3\n"), InvalidInput);
}

TEST(Stream, SubstreamsIndependentOfConsumption) {
  Stream a(77), b(77);
  for (int i = 0; i < 10; ++i) (void)a.normal();
  EXPECT_EQ(a.substream(3, Purpose::Fit).next_u64(), b.substream(3, Purpose::Fit).next_u64());
  EXPECT_NE(b.substream(3, Purpose::Fit).next_u64(), b.substream(3, Purpose::Data).next_u64());
  EXPECT_NE(b.substream(3, Purpose::Fit).next_u64(), b.substream(4, Purpose::Fit).next_u64());
}
