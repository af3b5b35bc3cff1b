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

#pragma once

// Command implementations shared by the C API and the command-line tool.
// Each command returns an exit code: 0 success, 1 configuration / input /
// I/O error, 2 a deterministic theorem was violated.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pertbound {

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitTheoremViolation = 2 };

struct CommandOptions {
  std::string command;  // simulate | bounds | concentration | complete | report
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<std::string> output_dir;
  std::vector<std::string> overrides;  // section.key=value
  bool ci = false;
  std::vector<std::string> inputs;     // report: files or directories
};

struct CommandOutput {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

CommandOutput run_command(const CommandOptions& opts);

}  // namespace pertbound
