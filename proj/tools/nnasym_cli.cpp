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

// Command-line entry point.
//
//   nnasym <subcommand> [--config PATH] [--out DIR] [--seed U64] [--threads N] [--verbose]
//
// Exit status: 0 success, 1 invalid invocation or configuration, 2 pipeline
// failure (including a verification suite that does not pass).

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nnasym/commands.hpp"
#include "nnasym/config.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kPipeline = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares MLP asymptotics under loss of identifiability"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool verbose = false;
  nnasym::RunOptions opt;
  std::string tn_path, sup_path;

  auto* config_opt = app.add_option("--config", config_path, "configuration file (defaults when omitted)");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master seed override");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "progress on stderr");
  app.add_flag("--record-runtime", opt.record_runtime, "store wall-clock seconds in report.json");
  app.add_option("--count", opt.count, "instances for verify suites");

  auto* tn_cmd = app.add_subcommand("simulate-tn", "Monte Carlo draws of T_n -> tn.csv");
  auto* limit_cmd = app.add_subcommand("simulate-limit", "draws of the limit law -> sup.csv, basis_manifest.json");
  auto* compare_cmd = app.add_subcommand("compare", "compare tn.csv with sup.csv -> report.json");
  compare_cmd->add_option("--tn", tn_path, "T_n CSV (default <out>/tn.csv)");
  compare_cmd->add_option("--sup", sup_path, "limit CSV (default <out>/sup.csv)");
  auto* lemma_cmd = app.add_subcommand("verify-lemma1", "randomized check of the SSE bound");
  auto* taylor_cmd = app.add_subcommand("verify-taylor", "randomized check of the Taylor expansion");
  auto* basis_cmd = app.add_subcommand("verify-basis", "linear-independence witness of the smooth block");
  auto* full_cmd = app.add_subcommand("full-run", "simulate-tn + simulate-limit + compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }
  opt.verbose = verbose;
  if (!tn_path.empty()) opt.tn_path = tn_path;
  if (!sup_path.empty()) opt.sup_path = sup_path;

  nnasym::ExperimentConfig cfg;
  try {
    cfg = *config_opt ? nnasym::load_config(config_path) : nnasym::ExperimentConfig::flagship();
    if (*seed_opt) cfg.master_seed = seed;
    if (*threads_opt) cfg.threads = threads;
    cfg.validate();
  } catch (const nnasym::ConfigError& e) {
    std::cerr << "config " << (config_path.empty() ? "<defaults>" : config_path) << ": " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    const std::filesystem::path out(out_dir);
    if (tn_cmd->parsed()) {
      nnasym::cmd_simulate_tn(cfg, out, opt);
    } else if (limit_cmd->parsed()) {
      nnasym::cmd_simulate_limit(cfg, out, opt);
    } else if (compare_cmd->parsed()) {
      nnasym::cmd_compare(cfg, out, opt);
    } else if (full_cmd->parsed()) {
      nnasym::cmd_full_run(cfg, out, opt);
    } else if (lemma_cmd->parsed()) {
      const auto r = nnasym::cmd_verify_lemma1(cfg, out, opt);
      std::cout << r.passed << "/" << r.total << " instances pass\n";
      if (!r.all_passed()) return kPipeline;
    } else if (taylor_cmd->parsed()) {
      const auto r = nnasym::cmd_verify_taylor(cfg, out, opt);
      std::cout << r.passed << "/" << r.total << " configurations pass\n";
      if (!r.all_passed()) return kPipeline;
    } else if (basis_cmd->parsed()) {
      const auto w = nnasym::cmd_verify_basis(cfg, out, opt);
      std::cout << "smooth-block min eigenvalue " << nnasym::io::format_double(w.smooth_min_eig)
                << (w.holds() ? " > " : " <= ") << nnasym::io::format_double(w.floor) << '\n';
      if (!w.holds()) return kPipeline;
    }
  } catch (const nnasym::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << '\n';
    return kPipeline;
  }
  return kOk;
}
