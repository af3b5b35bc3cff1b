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

#include "pertbound/experiments.hpp"
#include "pertbound/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

using namespace pertbound;

namespace {

ExperimentConfig base(Index m, Index n, std::vector<double> sv, NoiseSpec noise, std::size_t trials,
                      std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.lowrank = {m, n, std::move(sv), seed};
  cfg.noise = noise;
  cfg.trials = trials;
  cfg.master_seed = seed + 1;
  return cfg;
}

// sin of the angle between unit vectors, from the cosine.
double sin_from_cos(const Vector& a, const Vector& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::sqrt(std::max(0.0, 1 - c * c));
}

// sin of the largest principal angle as ||(I - U U^T) V||.
double sin_theta(const Matrix& u, const Matrix& v) {
  const Matrix res = v - u * (u.transpose() * v);
  return Eigen::JacobiSVD<Matrix>(res).singularValues()(0);
}

}  // namespace

TEST_CASE("zero noise gives zero angles and shifts") {
  ExperimentConfig cfg = base(30, 30, {10, 5}, {NoiseKind::Zero, 1.0}, 20, 3);
  cfg.js = {1, 2};
  cfg.subspace_js = {2};
  const ExperimentResult res = run_sine_experiment(cfg);
  REQUIRE(res.trials.size() == 20);
  for (const auto& t : res.trials) {
    REQUIRE(t.ok);
    CHECK(t.norm_E == 0.0);
    CHECK(t.sin_vj[0] == 0.0);
    CHECK(t.sin_vj[1] == 0.0);
    CHECK(t.sin_subspace_j[0] == 0.0);
    CHECK(t.max_sv_shift == 0.0);
    CHECK(t.weyl_ok);
    CHECK(t.dk_wedin_ok);
  }
  const ComparisonTable table = compare_bounds(res, cfg);
  for (const auto& row : table.rows) {
    for (double e : row.empirical) CHECK(e == 0.0);
  }
}

TEST_CASE("per-trial quantities match an independent recomputation") {
  ExperimentConfig cfg = base(5, 5, {3, 1}, {NoiseKind::Gaussian, 0.1}, 30, 11);
  cfg.js = {1, 2};
  cfg.subspace_js = {1, 2};
  const ExperimentResult res = run_sine_experiment(cfg);
  const Matrix& a = res.a.a;
  const Matrix v = res.a.factors.right;
  for (const auto& t : res.trials) {
    REQUIRE(t.ok);
    const Matrix e = sample_noise(cfg.noise, 5, 5, derive_seed(cfg.master_seed, t.trial_index));
    Eigen::JacobiSVD<Matrix> s(a + e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double norm = Eigen::JacobiSVD<Matrix>(e).singularValues()(0);
    CHECK(std::abs(t.norm_E - norm) <= 1e-8);
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(t.sin_vj[k] - sin_from_cos(v.col(k), s.matrixV().col(k))) <= 1e-8);
      CHECK(std::abs(t.sv_shifts[k] - std::abs(s.singularValues()(k) - cfg.lowrank.singular_values[k])) <= 1e-8);
      CHECK(std::abs(t.sin_subspace_j[k] - sin_theta(v.leftCols(k + 1), s.matrixV().leftCols(k + 1))) <= 1e-8);
    }
    Vector full = Vector::Zero(5);
    full.head(2) << 3, 1;
    CHECK(std::abs(t.max_sv_shift - (s.singularValues() - full).cwiseAbs().maxCoeff()) <= 1e-8);
  }
}

TEST_CASE("weyl and wedin hold on every trial") {
  ExperimentConfig cfg = base(100, 100, {60, 40, 20}, {NoiseKind::Bernoulli, 1.0}, 200, 5);
  cfg.js = {1, 2};
  const WeylSummary w = run_weyl_experiment(cfg);
  CHECK(w.trials == 200);
  CHECK(w.failed_trials == 0);
  CHECK(w.weyl_violations == 0);
  CHECK(w.dk_wedin_violations == 0);
  CHECK(w.max_shift_over_norm <= 1.0 + 1e-8);
}

TEST_CASE("top singular value moves by much less than the norm for a large spike") {
  ExperimentConfig cfg = base(200, 200, {200}, {NoiseKind::Bernoulli, 1.0}, 40, 7);
  const ExperimentResult res = run_sine_experiment(cfg);
  const auto shifts = quantity_samples(res, cfg, "sv_shift_1");
  const auto norms = quantity_samples(res, cfg, "norm_E");
  const double med_norm = quantile(norms, 0.5);
  CHECK(med_norm > 25);
  // Second-order shift: about n / sigma_1 = 1 here, against ||E|| near 2 sqrt(n).
  CHECK(quantile(shifts, 1.0) <= 0.2 * med_norm);
  for (const auto& t : res.trials) CHECK(t.prob_weyl_lower_ok);
}

TEST_CASE("lemma quantities on a hand-built instance") {
  SvdResult exact;
  exact.singular_values = Vector::Constant(1, 3.0);
  exact.left = Matrix::Zero(4, 1);
  exact.left(0, 0) = 1;
  exact.right = exact.left;

  const double a = 0.3, b = 0.5;
  SvdResult pert;
  pert.singular_values = Vector::Constant(1, 3.2);
  pert.left = Matrix::Zero(4, 1);
  pert.left(0, 0) = std::cos(a);
  pert.left(1, 0) = std::sin(a);
  pert.right = Matrix::Zero(4, 1);
  pert.right(0, 0) = std::cos(b);
  pert.right(2, 0) = std::sin(b);

  PerturbInput inp;
  inp.params = {2, 0.5, 2};
  inp.norm_E = 0.5;
  inp.t = 1.0;
  inp.r = 1;
  const LemmaChecks c = proof_lemma_checks(exact, pert, 1, inp);
  const double proj = std::sqrt((std::sin(a) * std::sin(a) + std::sin(b) * std::sin(b)) / 2);
  CHECK(c.projection == doctest::Approx(proj).epsilon(1e-14));
  CHECK(c.overlap == doctest::Approx(std::abs(std::cos(a) - std::cos(b)) / 2).epsilon(1e-12));
  CHECK(c.projection_bound.raw_value == doctest::Approx(2 * 0.5 / 3.0).epsilon(1e-14));
  // 0.46 exceeds 2 * 0.5 / 3, so this pair is not a perturbation of norm 0.5.
  CHECK_FALSE(c.projection_holds);
  inp.norm_E = 1.0;
  CHECK(proof_lemma_checks(exact, pert, 1, inp).projection_holds);
  CHECK_THROWS_AS(proof_lemma_checks(exact, pert, 2, inp), DomainError);
}

TEST_CASE("proof lemmas hold in most trials of a well-separated spectrum") {
  ExperimentConfig cfg = base(400, 400, {200, 192}, {NoiseKind::Bernoulli, 1.0}, 60, 2026);
  const WeylSummary w = run_weyl_experiment(cfg);
  CHECK(w.projection_lemma_holds >= 0.85 * w.trials);
  CHECK(w.overlap_lemma_holds >= 0.85 * w.trials);
  CHECK(w.lower_violations == 0);
}

TEST_CASE("empirical cdf and quantiles") {
  const std::vector<double> s{0.3, 0.1, 0.2, 0.2, 0.5};
  const auto cdf = empirical_cdf(s);
  REQUIRE(cdf.size() == 4);
  CHECK(cdf[0].value == 0.1);
  CHECK(cdf[0].cdf == 0.2);
  CHECK(cdf[1].value == 0.2);
  CHECK(cdf[1].cdf == 0.6);
  CHECK(cdf.back().cdf == 1.0);

  testsupport::Gen g(9);
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = static_cast<std::size_t>(g.integer(1, 60));
    std::vector<double> x(n);
    for (auto& v : x) v = std::round(g.uniform(0, 10));
    const auto c = empirical_cdf(x);
    for (std::size_t i = 1; i < c.size(); ++i) {
      CHECK(c[i].value > c[i - 1].value);
      CHECK(c[i].cdf > c[i - 1].cdf);
    }
    CHECK(c.back().cdf == 1.0);
    // Nearest-rank oracle: smallest sample whose count of samples <= it reaches qN.
    for (double q : {0.05, 0.5, 0.9, 0.95, 1.0}) {
      double want = INFINITY;
      for (double cand : x) {
        std::size_t le = 0;
        for (double y : x) le += y <= cand;
        if (le >= q * n - 1e-9) want = std::min(want, cand);
      }
      CHECK(quantile(x, q) == want);
    }
  }
  CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
  CHECK_THROWS_AS(quantile({1.0}, 0.0), DomainError);
}

TEST_CASE("cdf csv round trip") {
  std::ostringstream empty;
  emit_cdf_csv(empty, {});
  CHECK(empty.str() == "quantity,value,empirical_cdf\n");

  ExperimentConfig cfg = base(20, 20, {10, 5}, {NoiseKind::Bernoulli, 1.0}, 25, 4);
  const ExperimentResult res = run_sine_experiment(cfg);
  std::ostringstream out;
  emit_cdf_csv(out, res.cdfs);
  std::istringstream in(out.str());
  const auto back = read_cdf_csv(in);
  REQUIRE(back.size() == res.cdfs.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].quantity == res.cdfs[k].quantity);
    REQUIRE(back[k].points.size() == res.cdfs[k].points.size());
    for (std::size_t i = 0; i < back[k].points.size(); ++i) {
      CHECK(back[k].points[i].value == res.cdfs[k].points[i].value);
      CHECK(back[k].points[i].cdf == res.cdfs[k].points[i].cdf);
    }
  }
  std::istringstream bad("quantity,value\n");
  CHECK_THROWS_AS(read_cdf_csv(bad), DomainError);
  std::istringstream bad_row("quantity,value,empirical_cdf\nsin_v1,abc,0.5\n");
  CHECK_THROWS_AS(read_cdf_csv(bad_row), DomainError);
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig cfg = base(40, 30, {30, 20, 5}, {NoiseKind::Gaussian, 1.0}, 24, 8);
  cfg.js = {1, 2};
  cfg.subspace_js = {2};
  const ExperimentResult a = run_sine_experiment(cfg);
  cfg.threads = 4;
  const ExperimentResult b = run_sine_experiment(cfg);
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].norm_E == b.trials[i].norm_E);
    CHECK(a.trials[i].sin_vj == b.trials[i].sin_vj);
    CHECK(a.trials[i].sin_subspace_j == b.trials[i].sin_subspace_j);
    CHECK(a.trials[i].sv_shifts == b.trials[i].sv_shifts);
  }
}

TEST_CASE("new bounds are violated no more often than their failure probability") {
  ExperimentConfig cfg = base(60, 40, {400, 300, 100}, {NoiseKind::Gaussian, 1.0}, 200, 12);
  cfg.js = {1, 2};
  cfg.subspace_js = {2};
  const ExperimentResult res = run_sine_experiment(cfg);
  const ComparisonTable table = compare_bounds(res, cfg);
  CHECK(table.rows.size() == 6);
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.violation_rate.size(); ++k) {
      const double rate = row.violation_rate[k];
      if (std::isnan(rate)) continue;
      const double eps = 1 - table.q_levels[k];
      CHECK(rate <= eps + 3 * std::sqrt(eps * (1 - eps) / 200));
    }
  }
}

TEST_CASE("experiment validation") {
  ExperimentConfig cfg = base(10, 10, {3, 2}, {NoiseKind::Bernoulli, 1.0}, 1, 0);
  cfg.trials = 0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg.trials = 1;
  cfg.js = {3};
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg.js = {1};
  cfg.eps = 1.5;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg.eps = 0.1;
  CHECK_NOTHROW(validate(cfg));
  const ExperimentResult res = run_sine_experiment(cfg);
  CHECK_THROWS_AS(quantity_samples(res, cfg, "sin_v9"), DomainError);
}
