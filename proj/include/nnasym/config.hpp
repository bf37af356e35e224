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

// Experiment configuration files: one `section.key = value` per line, `#`
// starts a comment. Unset keys keep the flagship defaults.
//
//   truth.k0 = 1
//   truth.d = 1
//   truth.beta = 0
//   truth.a = 1            # k0 values
//   truth.w = 1            # k0*d values, unit by unit
//   truth.b = 0.3          # k0 values
//   fit.k = 2

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nnasym/errors.hpp"
#include "nnasym/experiment.hpp"
#include "nnasym/io.hpp"

namespace nnasym {

namespace detail {

struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, ConfigEntry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::size_t line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  double real(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    const auto& e = entries_.at(key);
    try {
      return io::parse_double(e.value);
    } catch (const InvalidInput&) {
      throw ConfigError(e.line, key + ": expected a number, got '" + e.value + "'");
    }
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!take(key)) return fallback;
    const auto& e = entries_.at(key);
    std::uint64_t v = 0;
    const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
      throw ConfigError(e.line, key + ": expected a non-negative integer, got '" + e.value + "'");
    return v;
  }

  std::string text(const std::string& key, std::string fallback) {
    if (!take(key)) return fallback;
    return entries_.at(key).value;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    const auto& e = entries_.at(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError(e.line, key + ": expected true or false, got '" + e.value + "'");
  }

  std::vector<double> list(const std::string& key, std::size_t expected) {
    take(key);
    const auto& e = entries_.at(key);
    std::vector<double> out;
    for (auto cell : io::split(e.value, ',')) {
      try {
        out.push_back(io::parse_double(cell));
      } catch (const InvalidInput&) {
        throw ConfigError(e.line, key + ": expected a comma-separated list of numbers");
      }
    }
    if (out.size() != expected)
      throw ConfigError(e.line, key + ": expected " + std::to_string(expected) + " values, got " +
                                    std::to_string(out.size()));
    return out;
  }

  /// Throws on the first key nobody asked for.
  void reject_unknown() const {
    std::size_t worst_line = 0;
    std::string worst;
    for (const auto& [k, e] : entries_)
      if (!used_.count(k) && (worst.empty() || e.line < worst_line)) {
        worst = k;
        worst_line = e.line;
      }
    if (!worst.empty()) throw ConfigError(worst_line, "unknown key '" + worst + "'");
  }

 private:
  bool take(const std::string& key) {
    used_[key] = true;
    return has(key);
  }

  std::map<std::string, ConfigEntry> entries_;
  std::map<std::string, bool> used_;
};

}  // namespace detail

inline std::map<std::string, detail::ConfigEntry> parse_config_entries(std::string_view text) {
  std::map<std::string, detail::ConfigEntry> out;
  std::size_t line_no = 0;
  for (auto raw : io::split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
    if (out.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "' (first on line " +
                                                       std::to_string(out.at(key).line) + ")");
    out.emplace(key, detail::ConfigEntry{value, line_no});
  }
  return out;
}

/// Parses and validates a configuration; every failure is a ConfigError.
inline ExperimentConfig parse_config(std::string_view text) {
  detail::ConfigReader r(parse_config_entries(text));
  ExperimentConfig cfg = ExperimentConfig::flagship();

  const std::size_t k0 = r.count("truth.k0", cfg.truth.k());
  const std::size_t d = r.count("truth.d", cfg.truth.d());
  if (k0 == 0) throw ConfigError(r.line("truth.k0"), "truth.k0 must be >= 1");
  if (d == 0) throw ConfigError(r.line("truth.d"), "truth.d must be >= 1");
  const bool reshaped = k0 != cfg.truth.k() || d != cfg.truth.d();
  for (const char* key : {"truth.a", "truth.w", "truth.b"})
    if (reshaped && !r.has(key))
      throw ConfigError(r.line(r.has("truth.k0") ? "truth.k0" : "truth.d"),
                        std::string(key) + " is required when truth.k0 or truth.d differ from the defaults");
  cfg.truth.beta = r.real("truth.beta", cfg.truth.beta);
  if (r.has("truth.a") || r.has("truth.w") || r.has("truth.b") || reshaped) {
    std::vector<double> a, w, b;
    a = r.has("truth.a") ? r.list("truth.a", k0) : std::vector<double>{cfg.truth.units[0].a};
    b = r.has("truth.b") ? r.list("truth.b", k0) : std::vector<double>{cfg.truth.units[0].b};
    if (r.has("truth.w")) w = r.list("truth.w", k0 * d);
    else w.assign(cfg.truth.units[0].w.data(), cfg.truth.units[0].w.data() + cfg.truth.units[0].w.size());
    cfg.truth.units.clear();
    for (std::size_t i = 0; i < k0; ++i) {
      HiddenUnit u{a[i], Vector(static_cast<Eigen::Index>(d)), b[i]};
      for (std::size_t j = 0; j < d; ++j) u.w[static_cast<Eigen::Index>(j)] = w[i * d + j];
      cfg.truth.units.push_back(std::move(u));
    }
  }
  cfg.transfer = r.text("truth.transfer", cfg.transfer);
  try {
    (void)transfer_by_name(cfg.transfer);
  } catch (const InvalidInput& e) {
    throw ConfigError(r.line("truth.transfer"), e.what());
  }

  const std::size_t k = r.count("fit.k", cfg.space.k);
  if (k < k0)
    throw ConfigError(r.line("fit.k"), "fit.k = " + std::to_string(k) + " is smaller than truth.k0 = " +
                                           std::to_string(k0));
  cfg.space = ParamSpace::origin_ball(k, d, r.real("fit.radius", cfg.space.radius));
  cfg.fit.starts = r.count("fit.starts", cfg.fit.starts);
  cfg.fit.max_iters = r.count("fit.max_iters", cfg.fit.max_iters);
  cfg.fit.grad_tol = r.real("fit.grad_tol", cfg.fit.grad_tol);
  cfg.fit.init_scale = r.real("fit.init_scale", cfg.fit.init_scale);
  cfg.fit.memory = r.count("fit.memory", cfg.fit.memory);
  cfg.oracle_start = r.flag("fit.oracle_start", cfg.oracle_start);

  cfg.n = r.count("data.n", cfg.n);
  const std::string noise = r.text("data.noise", "gaussian");
  const double sigma = r.real("data.sigma", cfg.noise.sigma);
  if (noise == "gaussian") cfg.noise = NoiseLaw::gaussian(sigma);
  else if (noise == "rademacher") cfg.noise = NoiseLaw::rademacher(sigma);
  else throw ConfigError(r.line("data.noise"), "data.noise must be gaussian or rademacher");
  const std::string input = r.text("data.input", "normal");
  if (input == "normal") {
    cfg.input = InputLaw::standard_normal(d);
  } else if (input == "uniform") {
    cfg.input = InputLaw::uniform_box(d, r.real("data.lo", -1.0), r.real("data.hi", 1.0));
  } else {
    throw ConfigError(r.line("data.input"), "data.input must be normal or uniform");
  }

  cfg.replications = r.count("experiment.replications", cfg.replications);
  cfg.master_seed = r.count("experiment.seed", cfg.master_seed);
  cfg.threads = static_cast<unsigned>(r.count("experiment.threads", cfg.threads));
  cfg.failure_cap = r.real("experiment.failure_cap", cfg.failure_cap);

  cfg.limit.draws = r.count("limit.draws", cfg.limit.draws);
  cfg.limit.grid_points = r.count("limit.grid_points", cfg.limit.grid_points);
  cfg.limit.grid_radius = r.real("limit.grid_radius", cfg.limit.grid_radius);
  cfg.limit.grid_exclusion = r.real("limit.grid_exclusion", cfg.limit.grid_exclusion);
  cfg.limit.quad_m = r.count("limit.quad_m", cfg.limit.quad_m);
  cfg.limit.search.starts = r.count("limit.starts", cfg.limit.search.starts);
  cfg.limit.search.iters = r.count("limit.iters", cfg.limit.search.iters);

  r.reject_unknown();
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(0, e.what());
  } catch (const Degenerate& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const InvalidInput& e) {
    throw ConfigError(0, e.what());
  }
  return parse_config(text);
}

}  // namespace nnasym
