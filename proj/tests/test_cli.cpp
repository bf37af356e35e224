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

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "nnasym/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(NNASYM_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nnasym_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::string configs = NNASYM_CONFIGS;

}  // namespace

TEST(Cli, InvalidConfigWritesNothing) {
  const fs::path dir = scratch("invalid");
  const fs::path out = dir / "out";
  EXPECT_EQ(run("full-run --config " + configs + "/invalid_k.cfg --out " + out.string(), dir / "log"), 1);
  EXPECT_FALSE(fs::exists(out));
  const std::string log = nnasym::io::read_file(dir / "log");
  EXPECT_NE(log.find("line 7"), std::string::npos) << log;
  EXPECT_EQ(run("simulate-tn --config " + (dir / "missing.cfg").string() + " --out " + out.string(), dir / "log"), 1);
  EXPECT_EQ(run("no-such-command", dir / "log"), 1);
  EXPECT_EQ(run("simulate-tn --threads 0", dir / "log"), 1);
  EXPECT_FALSE(fs::exists(out));
  fs::remove_all(dir);
}

TEST(Cli, VerifyLemma1Defaults) {
  const fs::path dir = scratch("lemma1");
  EXPECT_EQ(run("verify-lemma1 --out " + (dir / "o").string(), dir / "log"), 0);
  EXPECT_NE(nnasym::io::read_file(dir / "log").find("1000/1000"), std::string::npos);
  const auto j = nlohmann::json::parse(nnasym::io::read_file(dir / "o" / "lemma1_report.json"));
  EXPECT_EQ(j["passed"], 1000);
  EXPECT_EQ(j["instances"], 1000);
  fs::remove_all(dir);
}

TEST(Cli, FullRunIsByteIdentical) {
  const fs::path dir = scratch("full");
  const std::string cfg = " --config " + configs + "/smoke.cfg";
  ASSERT_EQ(run("full-run" + cfg + " --out " + (dir / "a").string(), dir / "log"), 0)
      << nnasym::io::read_file(dir / "log");
  ASSERT_EQ(run("full-run" + cfg + " --threads 2 --out " + (dir / "b").string(), dir / "log"), 0);
  for (const char* f : {"tn.csv", "sup.csv", "report.json", "basis_manifest.json"})
    EXPECT_EQ(nnasym::io::read_file(dir / "a" / f), nnasym::io::read_file(dir / "b" / f)) << f;
  const auto rep = nlohmann::json::parse(nnasym::io::read_file(dir / "a" / "report.json"));
  for (const char* key : {"ks", "quantiles", "failures", "seeds", "runtime_s"}) EXPECT_TRUE(rep.contains(key)) << key;

  // compare alone reproduces the report from the CSVs.
  ASSERT_EQ(run("compare" + cfg + " --out " + (dir / "a").string(), dir / "log"), 0);
  EXPECT_EQ(nnasym::io::read_file(dir / "a" / "report.json"), nnasym::io::read_file(dir / "b" / "report.json"));
  fs::remove_all(dir);
}
