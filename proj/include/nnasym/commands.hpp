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

// Pipeline commands behind the command-line tool. Each writes its artifacts
// atomically under an output directory; the configuration is validated by the
// caller before any command runs.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "json.hpp"
#include "nnasym/config.hpp"
#include "nnasym/experiment.hpp"
#include "nnasym/io.hpp"
#include "nnasym/verify.hpp"

namespace nnasym {

namespace files {
inline constexpr const char* tn = "tn.csv";
inline constexpr const char* sup = "sup.csv";
inline constexpr const char* manifest = "basis_manifest.json";
inline constexpr const char* report = "report.json";
inline constexpr const char* lemma1 = "lemma1_report.json";
inline constexpr const char* taylor = "taylor_report.json";
inline constexpr const char* basis = "basis_report.json";
}  // namespace files

struct RunOptions {
  bool verbose = false;
  bool record_runtime = false;  // put wall-clock seconds into report.json
  std::size_t count = 0;        // instance count for verify suites; 0 = default
  std::optional<std::filesystem::path> tn_path, sup_path;
};

namespace detail {

inline void log(const RunOptions& opt, const std::string& msg) {
  if (opt.verbose) std::cerr << msg << '\n';
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  io::write_atomic(path, j.dump(2) + "\n");
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline TnSample cmd_simulate_tn(const ExperimentConfig& cfg, const std::filesystem::path& out, const RunOptions& opt) {
  std::filesystem::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();
  TnSample tn = run_tn_monte_carlo(cfg);
  io::write_atomic(out / files::tn, tn_to_csv(tn));
  detail::log(opt, "simulate-tn: " + std::to_string(tn.values.size()) + " values, " + std::to_string(tn.failures) +
                       " failures, " + io::format_double(detail::seconds_since(t0)) + " s");
  return tn;
}

inline SupSample cmd_simulate_limit(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                    const RunOptions& opt) {
  std::filesystem::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();
  LimitRun run = simulate_limit(cfg);
  io::write_atomic(out / files::sup, sup_to_csv(run.sample));
  detail::write_json(out / files::manifest, run.manifest);
  detail::log(opt, "simulate-limit: " + std::to_string(run.sample.values.size()) + " draws, grid " +
                       run.sample.grid_spec + ", " + io::format_double(detail::seconds_since(t0)) + " s");
  return run.sample;
}

inline ComparisonReport cmd_compare(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                    const RunOptions& opt, const TnSample* tn_in = nullptr,
                                    const SupSample* sup_in = nullptr, std::optional<double> runtime = {}) {
  std::filesystem::create_directories(out);
  TnSample tn = tn_in ? *tn_in : tn_from_csv(io::read_file(opt.tn_path.value_or(out / files::tn)));
  const SupSample sup = sup_in ? *sup_in : sup_from_csv(io::read_file(opt.sup_path.value_or(out / files::sup)));
  if (!tn_in) tn.failures = cfg.replications > tn.values.size() ? cfg.replications - tn.values.size() : 0;
  ComparisonReport rep = compare_distributions(tn, sup, cfg.sigma2(), cfg.chi2_df());
  rep.seeds = seed_record(cfg);
  if (opt.record_runtime) rep.runtime_s = runtime;
  detail::write_json(out / files::report, report_json(rep));
  detail::log(opt, "compare: ks = " + io::format_double(rep.ks));
  return rep;
}

inline ComparisonReport cmd_full_run(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                     const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const TnSample tn = cmd_simulate_tn(cfg, out, opt);
  const SupSample sup = cmd_simulate_limit(cfg, out, opt);
  return cmd_compare(cfg, out, opt, &tn, &sup, detail::seconds_since(t0));
}

inline SuiteResult cmd_verify_lemma1(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                     const RunOptions& opt) {
  std::filesystem::create_directories(out);
  const SuiteResult r = lemma1_sweep(opt.count ? opt.count : 1000, cfg.master_seed);
  detail::write_json(out / files::lemma1, r.to_json());
  detail::log(opt, "verify-lemma1: " + std::to_string(r.passed) + "/" + std::to_string(r.total) + " instances pass");
  return r;
}

inline SuiteResult cmd_verify_taylor(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                     const RunOptions& opt) {
  std::filesystem::create_directories(out);
  const SuiteResult r = taylor_suite(opt.count ? opt.count : 100, cfg.master_seed);
  detail::write_json(out / files::taylor, r.to_json());
  detail::log(opt, "verify-taylor: " + std::to_string(r.passed) + "/" + std::to_string(r.total) + " configurations pass");
  return r;
}

inline BasisWitness cmd_verify_basis(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                     const RunOptions& opt) {
  std::filesystem::create_directories(out);
  const BasisWitness w = basis_witness(cfg.truth, quadrature_sample(cfg), BasisOptions{}.pd_floor, cfg.tf());
  detail::write_json(out / files::basis, w.to_json());
  detail::log(opt, "verify-basis: smooth-block min eigenvalue " + io::format_double(w.smooth_min_eig));
  return w;
}

}  // namespace nnasym
