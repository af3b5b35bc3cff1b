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

// Command-line front end. Parses flags and forwards to the C API.

#include "pertbound/pertbound.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"Perturbation bounds for low-rank matrices under random noise"};
  app.set_version_flag("--version", pb_version());

  std::string command;
  std::vector<std::string> inputs;
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string output;
  std::vector<std::string> overrides;
  bool ci = false;

  app.add_option("command", command, "simulate | bounds | concentration | complete | report")->required();
  app.add_option("inputs", inputs, "report: artifact files or directories");
  app.add_option("--config", config, "config file");
  app.add_option("--seed", seed, "master seed (all randomness derives from it)");
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_option("--output", output, "output directory");
  app.add_option("--set", overrides, "override section.key=value (repeatable)");
  app.add_flag("--ci", ci, "CI mode: a missing --seed is an error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  pb_command* cmd = nullptr;
  if (pb_command_create(command.c_str(), &cmd) != PB_OK) {
    std::fprintf(stderr, "error: %s\n", pb_last_error());
    return 1;
  }
  if (!config.empty()) pb_command_set_config(cmd, config.c_str());
  if (seed) pb_command_set_seed(cmd, *seed);
  pb_command_set_threads(cmd, threads);
  if (!output.empty()) pb_command_set_output(cmd, output.c_str());
  pb_command_set_ci(cmd, ci ? 1 : 0);
  for (const auto& o : overrides) pb_command_add_override(cmd, o.c_str());
  for (const auto& in : inputs) pb_command_add_input(cmd, in.c_str());

  pb_result* res = nullptr;
  const pb_status st = pb_command_run(cmd, &res);
  pb_command_destroy(cmd);
  if (st != PB_OK) {
    std::fprintf(stderr, "error: %s\n", pb_last_error());
    return 1;
  }
  std::fputs(pb_result_stdout(res), stdout);
  std::fputs(pb_result_stderr(res), stderr);
  const int code = pb_result_exit_code(res);
  pb_result_destroy(res);
  return code;
}
