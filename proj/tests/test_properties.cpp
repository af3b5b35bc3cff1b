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

#include "pertbound/linalg.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pertbound;

namespace {

struct Pair {
  Matrix a, e;
  std::uint64_t seed;
};

// A of random shape and rank with a random spectrum; E is one of dense
// Gaussian, a rank-1 kick aligned with the top pair, or a tiny jitter.
Pair gen_pair(std::uint64_t seed) {
  testsupport::Gen g(seed);
  const Index m = g.integer(2, 24), n = g.integer(2, 24);
  const Index r = g.integer(1, std::min(m, n));
  const std::vector<double> sv = g.spectrum(r, g.uniform(1, 100), g.uniform(0, 2));
  const Matrix u = g.orthonormal(m, r), v = g.orthonormal(n, r);
  Pair p{u * Eigen::Map<const Vector>(sv.data(), r).asDiagonal() * v.transpose(), Matrix(), seed};
  switch (g.integer(0, 2)) {
    case 0:
      p.e = g.uniform(0.01, 5) * g.gaussian(m, n);
      break;
    case 1:
      p.e = g.uniform(-2, 2) * sv[0] * u.col(0) * v.col(0).transpose() + 1e-3 * g.gaussian(m, n);
      break;
    default:
      p.e = 1e-9 * g.gaussian(m, n);
  }
  return p;
}

Vector random_unit_near(testsupport::Gen& g, const Vector& base, double spread) {
  return (base + spread * g.gaussian(base.size(), 1).col(0)).normalized();
}

}  // namespace

TEST_CASE("weyl: singular values move by at most the norm of E") {
  for (std::uint64_t s = 0; s < 400; ++s) {
    const Pair p = gen_pair(s);
    const Vector a = singular_values(p.a);
    const Vector b = singular_values(p.a + p.e);
    const double norm = spectral_norm(p.e);
    INFO("seed " << s);
    CHECK((a - b).cwiseAbs().maxCoeff() <= norm + 1e-8);
  }
}

TEST_CASE("davis-kahan-wedin: top right vector moves by at most 2 ||E|| / delta") {
  int checked = 0;
  for (std::uint64_t s = 1000; s < 1400; ++s) {
    const Pair p = gen_pair(s);
    const SvdResult sa = svd(p.a);
    const Vector& sv = sa.singular_values;
    const double delta = sv(0) - (sv.size() > 1 ? sv(1) : 0.0);
    if (delta <= kSvdTol * sv(0)) continue;
    const SvdResult sb = svd(p.a + p.e);
    const double sine = vector_angle_sin(sa.right.col(0), sb.right.col(0));
    INFO("seed " << s);
    CHECK(sine <= 2 * spectral_norm(p.e) / delta + 1e-8);
    ++checked;
  }
  CHECK(checked >= 300);
}

TEST_CASE("angles of the stacked vectors dominate the block angles") {
  // sin^2(u1, v1) + sin^2(u2, v2) <= 2 sin^2(u, v) with u = [u1; u2] / sqrt 2.
  testsupport::Gen g(77);
  for (int k = 0; k < 10000; ++k) {
    const Index m = g.integer(1, 8), n = g.integer(1, 8);
    const Vector u1 = g.unit(m), u2 = g.unit(n);
    // Mix far-apart and nearly aligned pairs.
    const double spread = k % 2 ? g.uniform(0, 0.1) : 10.0;
    const Vector v1 = random_unit_near(g, u1, spread), v2 = random_unit_near(g, u2, spread);
    const Vector u = dilation_eigenvector(u1, u2), v = dilation_eigenvector(v1, v2);
    const double lhs = std::pow(vector_angle_sin(u1, v1), 2) + std::pow(vector_angle_sin(u2, v2), 2);
    CHECK(lhs <= 2 * std::pow(vector_angle_sin(u, v), 2) + 1e-10);
  }
}

TEST_CASE("subspace sine is a pseudometric") {
  testsupport::Gen g(78);
  for (int k = 0; k < 500; ++k) {
    const Index n = g.integer(2, 12);
    const Index d = g.integer(1, n);
    const Matrix base = g.gaussian(n, d);
    auto near = [&](double spread) { return orthonormalize(base + spread * g.gaussian(n, d)); };
    const double spread = k % 3 == 0 ? 5.0 : g.uniform(0, 0.3);
    const Subspace a = near(spread), b = near(spread), c = near(spread);
    const double ab = subspace_angle_sin(a, b), ba = subspace_angle_sin(b, a);
    CHECK(std::abs(ab - ba) <= 1e-8);
    CHECK(subspace_angle_sin(a, a) <= 1e-8);
    CHECK(ab <= subspace_angle_sin(a, c) + subspace_angle_sin(c, b) + 1e-8);
    CHECK(ab >= -1e-15);
    CHECK(ab <= 1 + 1e-12);
  }
}

TEST_CASE("dilation spectrum is the doubled singular spectrum") {
  testsupport::Gen g(79);
  for (int k = 0; k < 100; ++k) {
    const Index m = g.integer(1, 10), n = g.integer(1, 10);
    const Matrix a = g.gaussian(m, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dilate(a));
    Vector ev = es.eigenvalues().cwiseAbs();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    const Vector s = singular_values(a);
    for (Index i = 0; i < s.size(); ++i) {
      CHECK(std::abs(ev(2 * i) - s(i)) <= 1e-8);
      CHECK(std::abs(ev(2 * i + 1) - s(i)) <= 1e-8);
    }
    for (Index i = 2 * s.size(); i < ev.size(); ++i) CHECK(ev(i) <= 1e-8);
  }
}
