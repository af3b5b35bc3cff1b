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

// Random generators shared by the test suites. They draw from std::mt19937_64
// so the fixtures do not depend on the library's own generator.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testsupport {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::uint64_t u64() { return eng_(); }

  Matrix gaussian(Eigen::Index m, Eigen::Index n) {
    Matrix a(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal();
    return a;
  }

  Vector unit(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v / v.norm();
  }

  // Orthonormal m x k via Householder QR of a Gaussian draw.
  Matrix orthonormal(Eigen::Index m, Eigen::Index k) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(m, k));
    return qr.householderQ() * Matrix::Identity(m, k);
  }

  // Descending positive values; consecutive gaps are at least min_gap.
  std::vector<double> spectrum(int r, double scale, double min_gap) {
    std::vector<double> s(r);
    double cur = min_gap + uniform(0.0, scale);
    for (int i = r - 1; i >= 0; --i) {
      s[i] = cur;
      cur += min_gap + uniform(0.0, scale);
    }
    return s;
  }

 private:
  std::mt19937_64 eng_;
};

inline double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

}  // namespace testsupport
