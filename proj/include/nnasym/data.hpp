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
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "nnasym/errors.hpp"
#include "nnasym/io.hpp"
#include "nnasym/model.hpp"
#include "nnasym/rng.hpp"

namespace nnasym {

/// Law Q of the regression inputs.
struct InputLaw {
  enum class Kind { StandardNormal, UniformBox };
  Kind kind = Kind::StandardNormal;
  std::size_t d = 1;
  double lo = -1.0;
  double hi = 1.0;

  static InputLaw standard_normal(std::size_t d) { return {Kind::StandardNormal, d, 0.0, 0.0}; }
  static InputLaw uniform_box(std::size_t d, double lo, double hi) { return {Kind::UniformBox, d, lo, hi}; }

  void validate() const {
    if (d == 0) throw InvalidInput("input law needs d >= 1");
    if (kind == Kind::UniformBox && !(hi > lo)) throw InvalidInput("uniform box needs lo < hi");
  }

  std::string describe() const {
    if (kind == Kind::StandardNormal) return "normal(d=" + std::to_string(d) + ")";
    return "uniform(d=" + std::to_string(d) + "," + io::format_double(lo) + "," + io::format_double(hi) + ")";
  }
};

/// Law of the additive noise; both kinds have mean 0 and variance sigma^2.
struct NoiseLaw {
  enum class Kind { Gaussian, ScaledRademacher };
  Kind kind = Kind::Gaussian;
  double sigma = 1.0;

  static NoiseLaw gaussian(double sigma) { return {Kind::Gaussian, sigma}; }
  static NoiseLaw rademacher(double sigma) { return {Kind::ScaledRademacher, sigma}; }

  void validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("noise sigma must be finite and >= 0");
  }

  double draw(Stream& s) const {
    if (kind == Kind::Gaussian) return sigma * s.normal();
    return (s.next_u64() >> 63) ? sigma : -sigma;
  }

  std::string describe() const {
    return (kind == Kind::Gaussian ? "gaussian(" : "rademacher(") + io::format_double(sigma) + ")";
  }
};

struct DatasetMeta {
  std::uint64_t stream_key = 0;
  InputLaw input;
  NoiseLaw noise;
  MlpParams truth;
};

struct Dataset {
  Matrix xs;  // n x d
  Vector ys;  // n
  DatasetMeta meta;

  std::size_t n() const noexcept { return static_cast<std::size_t>(ys.size()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(xs.cols()); }

  void validate() const {
    if (xs.rows() != ys.size())
      throw DimensionMismatch("dataset rows", static_cast<std::size_t>(ys.size()), static_cast<std::size_t>(xs.rows()));
  }
};

inline Matrix sample_inputs(const InputLaw& law, std::size_t m, Stream stream) {
  law.validate();
  if (m == 0) throw InvalidInput("sample_inputs needs m >= 1");
  Matrix xs(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(law.d));
  for (Eigen::Index t = 0; t < xs.rows(); ++t)
    for (Eigen::Index j = 0; j < xs.cols(); ++j)
      xs(t, j) = law.kind == InputLaw::Kind::StandardNormal ? stream.normal() : stream.uniform(law.lo, law.hi);
  return xs;
}

/// Draws (X_t, Y_t = f_0(X_t) + eps_t), t = 1..n. Inputs and noise come from
/// separate child streams of `stream`.
inline Dataset sample_dataset(const MlpParams& truth, const InputLaw& input, const NoiseLaw& noise,
                              std::size_t n, Stream stream,
                              const TransferFunction& tf = tanh_transfer()) {
  check_shape(truth);
  input.validate();
  noise.validate();
  if (n == 0) throw InvalidInput("sample_dataset needs n >= 1");
  if (truth.d() != input.d) throw DimensionMismatch("truth vs input law", input.d, truth.d());
  Dataset data;
  data.xs = sample_inputs(input, n, stream.substream(0, Purpose::Data));
  data.ys = mlp_eval_rows(truth, data.xs, tf);
  Stream eps = stream.substream(1, Purpose::Data);
  for (Eigen::Index t = 0; t < data.ys.size(); ++t) data.ys[t] += noise.draw(eps);
  data.meta = DatasetMeta{stream.key(), input, noise, truth};
  return data;
}

// CSV with header x1,...,xd,y and round-trip decimal formatting.

inline std::string dataset_to_csv(const Dataset& data) {
  data.validate();
  std::string out;
  for (std::size_t j = 0; j < data.d(); ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "y\n";
  for (Eigen::Index t = 0; t < data.xs.rows(); ++t) {
    for (Eigen::Index j = 0; j < data.xs.cols(); ++j) {
      out += io::format_double(data.xs(t, j));
      out += ',';
    }
    out += io::format_double(data.ys[t]);
    out += '\n';
  }
  return out;
}

inline Dataset dataset_from_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : io::split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw InvalidInput("dataset CSV is empty");
  const auto header = io::split(lines[0], ',');
  if (header.size() < 2 || header.back() != "y") throw InvalidInput("dataset CSV header must be x1,...,xd,y");
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j)
    if (header[j] != "x" + std::to_string(j + 1)) throw InvalidInput("dataset CSV header must be x1,...,xd,y");
  Dataset data;
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  data.xs.resize(n, static_cast<Eigen::Index>(d));
  data.ys.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto cells = io::split(lines[static_cast<std::size_t>(t + 1)], ',');
    if (cells.size() != d + 1)
      throw InvalidInput("dataset CSV row " + std::to_string(t + 2) + " has " + std::to_string(cells.size()) +
                         " fields, expected " + std::to_string(d + 1));
    for (std::size_t j = 0; j < d; ++j) data.xs(t, static_cast<Eigen::Index>(j)) = io::parse_double(cells[j]);
    data.ys[t] = io::parse_double(cells[d]);
  }
  data.meta.input = InputLaw::standard_normal(d);
  return data;
}

}  // namespace nnasym
