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

#include "pertbound/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pertbound {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line_no) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("matrix text: line " + std::to_string(line_no) + ": not a number: '" + tok + "'");
  }
  return value;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = split_ws(line);
  }
  if (header.size() != 2) throw DomainError("matrix text: expected header 'rows cols'");
  long rows = 0;
  long cols = 0;
  try {
    rows = std::stol(header[0]);
    cols = std::stol(header[1]);
  } catch (const std::exception&) {
    throw DomainError("matrix text: line " + std::to_string(line_no) + ": bad header");
  }
  if (rows <= 0 || cols <= 0) throw DomainError("matrix text: dimensions must be positive");

  Matrix m(rows, cols);
  long r = 0;
  while (r < rows && std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<long>(toks.size()) != cols) {
      throw DomainError("matrix text: line " + std::to_string(line_no) + ": expected " +
                        std::to_string(cols) + " values, got " + std::to_string(toks.size()));
    }
    for (long c = 0; c < cols; ++c) m(r, c) = parse_double(toks[c], line_no);
    ++r;
  }
  if (r != rows) throw DomainError("matrix text: expected " + std::to_string(rows) + " rows");
  require_finite(m, "matrix text");
  return m;
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open matrix file: " + path.string());
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      auto res = std::to_chars(buf, buf + sizeof buf, m(r, c));
      if (c) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write matrix file: " + path.string());
  write_matrix(out, m);
}

}  // namespace pertbound
