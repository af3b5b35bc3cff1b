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

// Experiment config files:
//
//   # comment
//   [section]
//   key = value
//   list = 1, 2, 3
//
// Keys are addressed as "section.key" (keys before any section header
// live in section ""). Overrides "section.key=value" replace or add keys.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pertbound {

/// Parse or lookup failure; the message includes the line number when
/// the problem is tied to one.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  /// "section.key=value"; throws ConfigError on a malformed override.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& key, std::vector<std::int64_t> fallback) const;

  void set(const std::string& key, const std::string& value);
  /// Keys in lexicographic order.
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for overrides
  };
  std::string where(const std::string& key) const;
  const Entry& require(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace pertbound
