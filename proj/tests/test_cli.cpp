// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the qtomo binary and checks its outputs and exit codes.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qtomo/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QTOMO_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp(const std::string& name) { return (fs::temp_directory_path() / ("qtomo_cli_" + name)).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data(const std::string& name) { return std::string(QTOMO_DATA_DIR) + "/" + name; }

}  // namespace

TEST(CliTomogram, VacuumColumn) {
  const auto summary = tmp("tom_summary.json");
  const auto r = run("tomogram --source builtin:vacuum --rays \"1,0\" --xmin -6 --xmax 6 --nx 241 --summary " + summary);
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  const auto rays = qtomo::io::read_csv(is);
  ASSERT_EQ(rays.size(), 1u);
  EXPECT_EQ(rays[0].values.size(), 241u);
  EXPECT_NEAR(rays[0].values[120], 1.0 / std::sqrt(M_PI), 1e-12);
  const json s = json::parse(slurp(summary));
  EXPECT_NEAR(s["rays"][0]["normalization"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(s["version"], "0.1.0");
}

TEST(CliTomogram, CounterexampleFlagged) {
  const auto summary = tmp("ce_summary.json");
  const auto r = run("tomogram --source builtin:counterexample --rays \"1,0;0,1\" --summary " + summary);
  EXPECT_EQ(r.code, 1);
  const json s = json::parse(slurp(summary));
  EXPECT_TRUE(s["rays"][0]["negative_values"].get<bool>());
  EXPECT_LT(s["rays"][1]["min_value"].get<double>(), 0.0);
}

TEST(CliTomogram, StateFileAndJsonFormat) {
  const auto r = run("tomogram --state " + data("fock1.json") + " --rays \"0,1\" --format json");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["rays"][0]["normalization"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(j["rows"].size(), 241u);
  EXPECT_EQ(j["columns"][3], "W");
}

TEST(CliTomogram, InputErrors) {
  EXPECT_EQ(run("tomogram --source builtin:vacuum --rays \"0,0\"").code, 2);
  EXPECT_EQ(run("tomogram --source /nonexistent.json").code, 2);
  EXPECT_EQ(run("tomogram --source builtin:nothing").code, 2);
  EXPECT_EQ(run("tomogram --source builtin:vacuum --nx banana").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(CliCertify, ExitCodes) {
  const auto out = tmp("cert_vac.json");
  EXPECT_EQ(run("certify --source builtin:vacuum --seed 42 --out " + out).code, 0);
  EXPECT_EQ(json::parse(slurp(out))["report"]["verdict"], "pass");

  const auto ce = tmp("cert_ce.json");
  EXPECT_EQ(run("certify --source builtin:counterexample --out " + ce).code, 1);
  const json j = json::parse(slurp(ce));
  EXPECT_EQ(j["report"]["verdict"], "fail");
  EXPECT_EQ(j["report"]["witness"].size(), 16u);
  EXPECT_EQ(j["config"]["certify"]["trials"], 200);

  const auto bad = tmp("malformed.json");
  qtomo::io::write_text(bad, "{\"dim\": 2, \"rho_re\": [[1, 0]]}");
  EXPECT_EQ(run("certify --source " + bad).code, 2);
  EXPECT_EQ(run("certify --source builtin:vacuum --format csv").code, 2);
}

TEST(CliCertify, ReproducibleBytes) {
  const auto a = tmp("rep_a.json"), b = tmp("rep_b.json");
  const std::string args = "certify --source builtin:thermal:0.5 --trials 20 --seed 5 --out ";
  ASSERT_EQ(run(args + a).code, 0);
  ASSERT_EQ(run(args + b).code, 0);
  json ja = json::parse(slurp(a)), jb = json::parse(slurp(b));
  ja["config"].erase("out");
  jb["config"].erase("out");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(run(args + a).out, run(args + b).out);
  // Same config, same path: byte-identical file.
  const std::string first = slurp(a);
  ASSERT_EQ(run(args + a).code, 0);
  EXPECT_EQ(slurp(a), first);
}

TEST(CliReconstruct, Roundtrips) {
  const auto out = tmp("rec_vac.json");
  ASSERT_EQ(run("reconstruct --source builtin:vacuum --out " + out).code, 0);
  const json j = json::parse(slurp(out));
  EXPECT_GE(j["fidelity"].get<double>(), 0.999);
  EXPECT_TRUE(j["validation"]["accepted"].get<bool>());
  const auto st = qtomo::io::state_from_json(j["state"]);
  EXPECT_EQ(st.dim(), 32u);

  const auto th = tmp("rec_th.json");
  ASSERT_EQ(run("reconstruct --source " + data("thermal1.json") + " --out " + th).code, 0);
  EXPECT_GE(json::parse(slurp(th))["fidelity"].get<double>(), 0.999);

  const auto ce = tmp("rec_ce.json");
  EXPECT_EQ(run("reconstruct --source builtin:counterexample --dim 12 --disk-radius 12 --out " + ce).code, 1);
  const json jc = json::parse(slurp(ce));
  EXPECT_FALSE(jc["validation"]["accepted"].get<bool>());
  EXPECT_LT(jc["validation"]["min_eigenvalue"].get<double>(), -1e-3);
  EXPECT_FALSE(jc.contains("state"));
}

TEST(CliPurity, Values) {
  const auto vac = json::parse(run("purity --source builtin:vacuum --nodes 96").out);
  EXPECT_NEAR(vac["purity_characteristic"].get<double>(), 1.0, 1e-3);
  EXPECT_NEAR(vac["purity_tomogram"].get<double>(), 1.0, 1e-3);
  const auto th = run("purity --source " + data("thermal1.json") + " --nodes 96");
  ASSERT_EQ(th.code, 0);
  const json jt = json::parse(th.out);
  EXPECT_NEAR(jt["purity_characteristic"].get<double>(), 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(jt["purity_exact"].get<double>(), 1.0 / 3.0, 1e-10);
  const json jf = json::parse(run("purity --source " + data("fock1.json") + " --nodes 96").out);
  EXPECT_NEAR(jf["purity_tomogram"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(run("purity --source builtin:counterexample --nodes 64").code, 1);
}

TEST(CliDemo, Showcases) {
  const auto ce = run("demo counterexample");
  EXPECT_EQ(ce.code, 1);
  const json jc = json::parse(ce.out);
  EXPECT_EQ(jc["verdict"], "fail");
  EXPECT_NEAR(jc["moments"]["P2_raw"].get<double>(), 2.0 * std::sqrt(M_PI), 1e-6);
  EXPECT_EQ(jc["moments"]["P2_claimed"].get<double>(), -0.5);

  const auto v42 = run("demo vacuum --seed 42");
  const auto v7 = run("demo vacuum --seed 7");
  EXPECT_EQ(v42.code, 0);
  EXPECT_EQ(v7.code, 0);
  const json j42 = json::parse(v42.out), j7 = json::parse(v7.out);
  for (const char* k : {"quantum", "omega_positive", "classical"}) {
    EXPECT_TRUE(j42[k]["passed"].get<bool>()) << k;
    EXPECT_EQ(j42[k]["passed"], j7[k]["passed"]) << k;
  }
  EXPECT_EQ(run("demo nothing").code, 2);
}
