// Copyright 2026 The pertbound Authors
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

// Runs the installed command-line tool and checks its exit-code contract.

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PB_CLI_PATH;
const fs::path kConfigs = PB_SOURCE_DIR "/configs";

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run cli(const std::string& args) {
  const fs::path dir = fs::temp_directory_path() / "pertbound_cli_io";
  fs::create_directories(dir);
  const std::string cmd = "'" + kCli + "' " + args + " > '" + (dir / "out").string() + "' 2> '" +
                          (dir / "err").string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("pertbound_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("help and version") {
  CHECK(cli("--help").code == 0);
  const Run v = cli("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli("").code == 1);
  const Run unknown = cli("frobnicate");
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("unknown command") != std::string::npos);
  CHECK(cli("bounds --threads 0").code == 1);
  CHECK(cli("bounds --no-such-flag").code == 1);
  CHECK(cli("simulate --config /nonexistent.cfg --seed 1").code == 1);
  const Run ci = cli("simulate --ci --config '" + (kConfigs / "zero_noise.cfg").string() + "'");
  CHECK(ci.code == 1);
  CHECK(ci.err.find("--seed") != std::string::npos);
  const Run missing = cli("bounds --set kind=dk_wedin --set norm_E=1");
  CHECK(missing.code == 1);
  CHECK(missing.err.find("'delta'") != std::string::npos);
}

TEST_CASE("bounds prints json") {
  const Run r = cli("bounds --set kind=weyl --set norm_E=5");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["value"] == 5.0);
  CHECK(j["flags"][0] == "deterministic");

  const Run dk = cli("bounds --set kind=dk_wedin --set norm_E=40 --set delta=8");
  REQUIRE(dk.code == 0);
  const auto d = nlohmann::json::parse(dk.out);
  CHECK(d["value"] == 1.0);
  CHECK(d["raw_value"] == 10.0);
  CHECK(d["clipped"] == true);
}

TEST_CASE("simulate, then report on the output directory") {
  const fs::path d = fresh("simulate");
  const Run r = cli("simulate --config '" + (kConfigs / "zero_noise.cfg").string() + "' --seed 5 --output '" +
                    d.string() + "'");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(d / "report.json"));
  CHECK(fs::exists(d / "cdf.csv"));
  CHECK(r.err.empty());

  const Run rep = cli("report '" + d.string() + "' --output '" + d.string() + "'");
  REQUIRE(rep.code == 0);
  const auto s = nlohmann::json::parse(slurp(d / "summary.json"));
  CHECK(s["artifacts"].size() == 2);

  const fs::path empty = fresh("empty");
  fs::create_directories(empty);
  CHECK(cli("report '" + empty.string() + "'").code == 1);
}

TEST_CASE("thread count does not change the bytes written") {
  const fs::path a = fresh("t1"), b = fresh("t4");
  const std::string base = "simulate --config '" + (kConfigs / "small.cfg").string() +
                           "' --seed 9 --set experiment.trials=20 --output ";
  REQUIRE(cli(base + "'" + a.string() + "' --threads 1").code == 0);
  REQUIRE(cli(base + "'" + b.string() + "' --threads 4").code == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "cdf.csv") == slurp(b / "cdf.csv"));
}
