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

#include "pertbound/completion.hpp"
#include "pertbound/linalg.hpp"

#include "rank1_fixture.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pertbound;

namespace {

const NoiseSpec kBern{NoiseKind::Bernoulli, 1.0};

Matrix rank_r(testsupport::Gen& g, Index m, Index n, const std::vector<double>& sv) {
  const Index r = static_cast<Index>(sv.size());
  const Matrix u = g.orthonormal(m, r), v = g.orthonormal(n, r);
  return u * Eigen::Map<const Vector>(sv.data(), r).asDiagonal() * v.transpose();
}

}  // namespace

TEST_CASE("observation at p = 1 without noise is the matrix itself") {
  testsupport::Gen g(1);
  const Matrix a = rank_r(g, 12, 9, {3, 1});
  const Observation o = observe(a, 1.0, {NoiseKind::Zero, 1.0}, 5);
  CHECK(o.observed.values == a);
  CHECK(o.observed.mask->all());
  CHECK(o.flags.empty());
  CHECK_FALSE(estimate_p(o.observed).approximate);
  CHECK(estimate_p(o.observed).p == 1.0);
}

TEST_CASE("mask density and the entrywise decomposition") {
  testsupport::Gen g(2);
  const Matrix a = rank_r(g, 200, 150, {30, 10});
  const double p = 0.3;
  const Observation o = observe(a, p, kBern, 17);
  const Mask& mask = *o.observed.mask;
  const double n = 200.0 * 150.0;
  const double density = static_cast<double>(mask.count()) / n;
  CHECK(std::abs(density - p) <= 4 * std::sqrt(p * (1 - p) / n));
  CHECK(estimate_p(o.observed).p == density);

  const Matrix e = implied_perturbation(a, o.z, mask, p);
  CHECK((o.observed.values / p - (a + e)).cwiseAbs().maxCoeff() <= 1e-12);
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (mask(i, j)) {
        CHECK(o.observed.values(i, j) == a(i, j) + o.z(i, j));
      } else {
        CHECK(o.observed.values(i, j) == 0.0);
      }
    }
  }
  CHECK_NOTHROW(validate(o.observed));

  // Same seed, same observation.
  const Observation o2 = observe(a, p, kBern, 17);
  CHECK(o2.observed.values == o.observed.values);

  // Without a mask, the density of nonzero values is used.
  ObservedMatrix bare{o.observed.values, std::nullopt, std::nullopt};
  const PEstimate est = estimate_p(bare);
  CHECK(est.approximate);
  CHECK(est.p <= density);
}

TEST_CASE("implied perturbation variance") {
  // Constant A = a: Var e_ij = (a^2 p (1 - p) + p) / p^2 with unit-variance Z.
  const double a0 = 2.0, p = 0.4;
  const Matrix a = Matrix::Constant(300, 300, a0);
  const Observation o = observe(a, p, kBern, 3);
  const Matrix e = implied_perturbation(a, o.z, *o.observed.mask, p);
  const double mean = e.mean();
  const double var = (e.array() - mean).square().mean();
  const double want = (a0 * a0 * p * (1 - p) + p) / (p * p);
  CHECK(std::abs(mean) <= 5 * std::sqrt(want / e.size()));
  CHECK(std::abs(var - want) <= 0.1 * want);
}

TEST_CASE("observation errors") {
  testsupport::Gen g(3);
  const Matrix a = rank_r(g, 6, 6, {2});
  CHECK_THROWS_AS(observe(a, 0.0, kBern, 1), DomainError);
  CHECK_THROWS_AS(observe(a, 1.5, kBern, 1), DomainError);
  CHECK_THROWS_AS(observe(a, 0.5, {NoiseKind::Gaussian, 1.0}, 1), DomainError);
  const Observation o = observe(a, 0.5, {NoiseKind::Gaussian, 1.0}, 1, true);
  REQUIRE(o.flags.size() == 1);
  CHECK(o.flags[0] == "outside_bounded_noise_assumption");

  ObservedMatrix bad{Matrix::Ones(3, 3), Mask::Constant(3, 3, false), std::nullopt};
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad.mask = Mask::Constant(2, 3, true);
  CHECK_THROWS_AS(validate(bad), DomainError);
  CHECK_THROWS_AS(implied_perturbation(a, Matrix::Zero(5, 6), Mask::Constant(6, 6, true), 0.5), DomainError);
}

TEST_CASE("exact recovery at p = 1 without noise") {
  testsupport::Gen g(4);
  const Matrix a = rank_r(g, 30, 20, {9, 4});
  const ObservedMatrix obs{a, Mask::Constant(30, 20, true), 1.0};
  const SpectralCompleter c(obs, 1.0, 2);
  for (Index col = 1; col <= 20; ++col) {
    const RecoveryResult r = recovery_error(a, c.recover(col));
    CHECK(*r.error_abs <= 1e-10);
  }
  CHECK_THROWS_AS(c.recover(0), DomainError);
  CHECK_THROWS_AS(c.recover(21), DomainError);
  CHECK_THROWS_AS(SpectralCompleter(obs, 1.0, 21), DomainError);
  CHECK_THROWS_AS(SpectralCompleter(obs, 0.0, 1), DomainError);
}

TEST_CASE("rank-1 recovery under light noise") {
  // build/tests/calibrate_rank1 over these seeds: median 0.1182, q95 0.1971, max 0.3624.
  int good = 0;
  std::vector<double> errs;
  for (int s = 0; s < rank1fixture::kSeeds; ++s) {
    errs.push_back(rank1fixture::error_rel(s));
    good += errs.back() <= 0.25;
  }
  CHECK(good >= 95);
  std::sort(errs.begin(), errs.end());
  CHECK(errs[49] == doctest::Approx(0.1182).epsilon(1e-3));
}

TEST_CASE("error decomposition and triangle inequality") {
  testsupport::Gen g(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Index m = g.integer(10, 40), n = g.integer(10, 40);
    const Matrix a = rank_r(g, m, n, g.spectrum(2, 10, 1));
    const double p = g.uniform(0.3, 1.0);
    const Observation o = observe(a, p, kBern, g.u64());
    const ObservedMatrix& obs = o.observed;
    const Subspace true_u = Subspace::from_orthonormal(svd(a).left.leftCols(2));
    const SpectralCompleter c(obs, p, 2);
    for (Index col = 1; col <= n; col += 3) {
      const RecoveryResult r = recovery_error(a, c.recover(col), true_u);
      REQUIRE(r.terms);
      const auto& t = *r.terms;
      CHECK(t[0] <= 1e-9);  // x lies in the column space
      CHECK(*r.error_abs <= t[0] + t[1] + t[2] + 1e-12);
      const Vector x = a.col(col - 1);
      CHECK(std::abs(t[1] - (true_u.basis().transpose() * (x - r.x_tilde)).norm()) <= 1e-10);
      // P_V is a projector: applying it again changes nothing.
      const Matrix& b = *r.basis;
      CHECK((b * (b.transpose() * r.estimate) - r.estimate).norm() <= 1e-10);
    }
  }
}

TEST_CASE("recovery commutes with rotations of the row space") {
  testsupport::Gen g(6);
  const Matrix a = rank_r(g, 25, 18, {8, 3});
  const Observation o = observe(a, 0.6, kBern, 9);
  const Matrix q = g.orthonormal(25, 25);
  const ObservedMatrix rotated{q * o.observed.values, std::nullopt, std::nullopt};
  const SpectralCompleter c1(o.observed, 0.6, 2), c2(rotated, 0.6, 2);
  for (Index col = 1; col <= 18; ++col) {
    CHECK((q * c1.recover(col).estimate - c2.recover(col).estimate).norm() <= 1e-9);
  }
  CHECK((c1.singular_values() - c2.singular_values()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("completion certificate") {
  Matrix a(2, 2);
  a << 1, -3, 2, 0.5;
  const ConcentrationParams c = completion_params(a, 0.5, 1.0);
  const double alpha = (3 + 1.0) / 0.5;
  CHECK(c.C1 == 2.0);
  CHECK(c.gamma == 2.0);
  CHECK(c.c1 == doctest::Approx(1 / (2 * alpha * alpha)).epsilon(1e-15));
  CHECK_THROWS_AS(completion_params(a, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(completion_params(a, 0.5, -1.0), DomainError);
}

TEST_CASE("recovery bound shrinks relative to the column as n grows") {
  double prev = INFINITY;
  for (Index n : {250, 500, 1000, 2000}) {
    const LowRankMatrix f = flat_low_rank_matrix(n, n, {double(n), 0.9 * n}, 3);
    const Vector x = f.a.col(0);
    RecoveryBoundInput in;
    in.j = 2;
    in.r = 2;
    in.norm_x_inf = x.cwiseAbs().maxCoeff();
    in.norm_x = x.norm();
    in.n = n;
    in.p = 0.5;
    in.K = 1;
    in.lambda = 3;
    in.params = completion_params(f.a, in.p, in.K);
    in.delta_j = 0.9 * n;
    in.sigma_j = 0.9 * n;
    in.norm_E = 3 * std::sqrt(double(n)) / in.p;
    const BoundReport b = recovery_bound(in);
    REQUIRE(b.available);
    const double ratio = b.raw_value / x.norm();
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("recovery bound limits") {
  RecoveryBoundInput in;
  in.j = 1;
  in.r = 1;
  in.norm_x = 1;
  in.n = 1;
  in.lambda = 1e-6;
  in.K = 0;
  in.sigma_j = in.delta_j = 1e12;
  in.params = {2, 0.5, 2};
  // Everything but sqrt(j) sqrt((|x|_inf^2 + 1) / p) vanishes.
  const BoundReport b = recovery_bound(in);
  CHECK(b.raw_value == doctest::Approx(1.0).epsilon(1e-5));
  in.p = 1.5;
  CHECK_THROWS_AS(recovery_bound(in), DomainError);
  in.p = 1;
  in.j = 2;
  CHECK_THROWS_AS(recovery_bound(in), DomainError);
}

TEST_CASE("flat low-rank matrices") {
  const LowRankMatrix f = flat_low_rank_matrix(40, 30, {10, 6}, 7);
  const Matrix& u = f.factors.left;
  const Matrix& v = f.factors.right;
  CHECK((u.transpose() * u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((v.transpose() * v - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((u.cwiseAbs().array() - 1 / std::sqrt(40.0)).abs().maxCoeff() <= 1e-15);
  CHECK((v.cwiseAbs().array() - 1 / std::sqrt(30.0)).abs().maxCoeff() <= 1e-15);
  CHECK(f.a.cwiseAbs().maxCoeff() <= 16 / std::sqrt(1200.0) + 1e-12);
  const Vector s = singular_values(f.a);
  CHECK(s(0) == doctest::Approx(10).epsilon(1e-12));
  CHECK(s(1) == doctest::Approx(6).epsilon(1e-12));
  CHECK_THROWS_AS(flat_low_rank_matrix(41, 30, {10, 6}, 7), DomainError);
  CHECK_THROWS_AS(flat_low_rank_matrix(40, 30, {10, 6, 1}, 7), DomainError);
  CHECK_NOTHROW(flat_low_rank_matrix(41, 31, {10}, 7));
}

TEST_CASE("projection of bounded noise onto a small subspace") {
  const ProjectionTail t = projection_lemma_check(5, 200, 0.5, {1.0, 3.0}, 10000, 4);
  CHECK(t.trials == 10000);
  CHECK(t.tail[1] <= 0.1);
  CHECK(t.tail[1] <= t.tail[0]);
  for (std::size_t i = 1; i < t.norms.size(); ++i) CHECK(t.norms[i - 1] <= t.norms[i]);

  const ProjectionTail zero = projection_lemma_check(3, 20, 0.0, {0.0, 0.5}, 100, 1);
  for (double x : zero.norms) CHECK(x == 0.0);
  CHECK(zero.tail[0] == 1.0);  // ||P_H X|| = 0 >= 0 + 0
  CHECK(zero.tail[1] == 0.0);

  // d = n: the projection is the identity, so ||X|| <= sqrt(n) for entries in [-1, 1].
  const ProjectionTail full = projection_lemma_check(10, 10, 2.0, {0.0}, 500, 2);
  for (double x : full.norms) CHECK(x <= std::sqrt(10.0) + 1e-12);

  CHECK(projection_lemma_check(5, 50, 0.5, {1.0}, 300, 8, 1).norms ==
        projection_lemma_check(5, 50, 0.5, {1.0}, 300, 8, 3).norms);
  CHECK_THROWS_AS(projection_lemma_check(6, 5, 0.5, {1.0}, 10, 1), DomainError);
  CHECK_THROWS_AS(projection_lemma_check(2, 5, -1.0, {1.0}, 10, 1), DomainError);
  CHECK_THROWS_AS(projection_lemma_check(2, 5, 0.5, {1.0}, 0, 1), DomainError);
}
