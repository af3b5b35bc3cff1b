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

#include "pertbound/parallel.hpp"
#include "pertbound/rng.hpp"

#include <algorithm>
#include <cmath>

namespace pertbound {

void validate(const ObservedMatrix& obs) {
  if (obs.values.size() == 0) return;
  require_finite(obs.values, "observed values");
  if (!obs.mask) return;
  const Mask& mask = *obs.mask;
  if (mask.rows() != obs.values.rows() || mask.cols() != obs.values.cols()) {
    throw DomainError("observed matrix: mask shape differs from values");
  }
  for (Index j = 0; j < mask.cols(); ++j) {
    for (Index i = 0; i < mask.rows(); ++i) {
      if (!mask(i, j) && obs.values(i, j) != 0.0) {
        throw DomainError("observed matrix: nonzero value at an unobserved position");
      }
    }
  }
}

Observation observe(const Matrix& a, double p, const NoiseSpec& z_spec, std::uint64_t seed, bool allow_unbounded) {
  require_finite(a, "observe");
  if (a.size() == 0) throw DomainError("observe: empty matrix");
  if (!(p > 0 && p <= 1)) throw DomainError("observe: p must lie in (0, 1]");
  Observation out;
  if (!is_bounded(z_spec)) {
    if (!allow_unbounded) {
      throw DomainError("observe: noise kind '" + std::string(to_string(z_spec.kind)) +
                        "' is unbounded; the completion analysis needs |z_ij| <= K");
    }
    out.flags.emplace_back("outside_bounded_noise_assumption");
  }
  const Index m = a.rows();
  const Index n = a.cols();
  out.z = sample_noise(z_spec, m, n, derive_seed(seed, 0));
  Mask mask(m, n);
  Xoshiro256 rng(derive_seed(seed, 1));
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) mask(i, j) = rng.uniform() < p;
  }
  ObservedMatrix& obs = out.observed;
  obs.values = Matrix::Zero(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (mask(i, j)) obs.values(i, j) = a(i, j) + out.z(i, j);
    }
  }
  obs.mask = std::move(mask);
  obs.p_nominal = p;
  return out;
}

Matrix implied_perturbation(const Matrix& a, const Matrix& z, const Mask& mask, double p) {
  if (a.rows() != z.rows() || a.cols() != z.cols() || a.rows() != mask.rows() || a.cols() != mask.cols()) {
    throw DomainError("implied_perturbation: shape mismatch");
  }
  if (!(p > 0 && p <= 1)) throw DomainError("implied_perturbation: p must lie in (0, 1]");
  Matrix e(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      const double chi = mask(i, j) ? 1.0 : 0.0;
      e(i, j) = (a(i, j) * (chi - p) + z(i, j) * chi) / p;
    }
  }
  return e;
}

PEstimate estimate_p(const ObservedMatrix& obs) {
  PEstimate est;
  const auto total = static_cast<double>(obs.values.size());
  if (obs.mask) {
    if (obs.mask->size() == 0) return {0.0, true};
    est.p = static_cast<double>(obs.mask->count()) / static_cast<double>(obs.mask->size());
    return est;
  }
  est.approximate = true;
  if (total == 0) return est;
  est.p = static_cast<double>((obs.values.array() != 0.0).count()) / total;
  return est;
}

SpectralCompleter::SpectralCompleter(const ObservedMatrix& obs, double p, Index j, SvdMethod method)
    : values_(obs.values), p_(p), j_(j) {
  validate(obs);
  if (!(p > 0 && p <= 1)) throw DomainError("completion: p must lie in (0, 1]");
  if (values_.size() == 0) throw DomainError("completion: empty observation");
  if (j < 1 || j > std::min(values_.rows(), values_.cols())) {
    throw DomainError("completion: j must satisfy 1 <= j <= min(m, n)");
  }
  const SvdResult s = svd(values_, method);
  sv_ = s.singular_values;
  basis_ = std::make_shared<const Matrix>(s.left.leftCols(j));
}

RecoveryResult SpectralCompleter::recover(Index column) const {
  if (column < 1 || column > values_.cols()) throw DomainError("completion: column index out of range");
  RecoveryResult r;
  r.column = column;
  r.j = j_;
  r.basis = basis_;
  r.x_tilde = values_.col(column - 1) / p_;
  r.estimate = *basis_ * (basis_->transpose() * r.x_tilde);
  return r;
}

RecoveryResult recover_column(const ObservedMatrix& obs, double p, Index j, Index column) {
  return SpectralCompleter(obs, p, j).recover(column);
}

RecoveryResult recovery_error(const Matrix& a, RecoveryResult result, const std::optional<Subspace>& true_u) {
  if (result.column < 1 || result.column > a.cols() || result.estimate.size() != a.rows()) {
    throw DomainError("recovery_error: shape mismatch");
  }
  const Vector x = a.col(result.column - 1);
  const double err = (x - result.estimate).norm();
  result.error_abs = err;
  const double nx = x.norm();
  result.error_rel = nx > 0 ? err / nx : (err == 0 ? 0.0 : INFINITY);
  if (true_u) {
    if (true_u->ambient_dim() != a.rows()) throw DomainError("recovery_error: subspace dimension mismatch");
    const Vector pu_x = project(*true_u, x);
    const Vector pu_xt = project(*true_u, result.x_tilde);
    result.terms = std::array<double, 3>{(x - pu_x).norm(), (pu_x - pu_xt).norm(), (pu_xt - result.estimate).norm()};
  }
  return result;
}

BoundReport recovery_bound(const RecoveryBoundInput& in) {
  validate(in.params);
  auto nonneg = [](double x, const char* what) {
    if (!std::isfinite(x) || x < 0) throw DomainError(std::string("recovery_bound: ") + what + " must be >= 0");
  };
  auto positive = [](double x, const char* what) {
    if (!std::isfinite(x) || !(x > 0)) throw DomainError(std::string("recovery_bound: ") + what + " must be > 0");
  };
  nonneg(in.sigma_jp1, "sigma_{j+1}");
  nonneg(in.norm_x_inf, "norm_x_inf");
  nonneg(in.norm_x, "norm_x");
  nonneg(in.norm_E, "norm_E");
  nonneg(in.K, "K");
  nonneg(in.lambda, "lambda");
  positive(in.p, "p");
  positive(in.delta_j, "delta_j");
  positive(in.sigma_j, "sigma_j");
  positive(in.C_abs, "C");
  if (in.p > 1) throw DomainError("recovery_bound: p must be <= 1");
  if (in.j < 1 || in.j > in.r) throw DomainError("recovery_bound: j must satisfy 1 <= j <= r");
  if (in.n < 1) throw DomainError("recovery_bound: n must be >= 1");

  const auto& pr = in.params;
  const double jd = static_cast<double>(in.j);
  const double rd = static_cast<double>(in.r);
  const double nd = static_cast<double>(in.n);
  const double c = in.C_abs;
  const double alpha = (in.norm_x_inf + in.K) / in.p;
  const double mu = c * std::sqrt(jd) *
                    (std::pow(in.lambda, 2.0 / pr.gamma) * std::pow(rd, 1.0 / pr.gamma) / in.delta_j +
                     in.norm_E / in.sigma_j + in.norm_E * in.norm_E / (in.sigma_j * in.delta_j));

  BoundReport b;
  b.kind = "recovery";
  b.flags.emplace_back("non_rigorous_constant");
  b.inputs = {{"sigma_jp1", in.sigma_jp1}, {"j", jd},           {"r", rd},
              {"norm_x_inf", in.norm_x_inf}, {"norm_x", in.norm_x}, {"n", nd},
              {"p", in.p},                  {"K", in.K},           {"lambda", in.lambda},
              {"C1", pr.C1},                {"c1", pr.c1},         {"gamma", pr.gamma},
              {"delta_j", in.delta_j},      {"sigma_j", in.sigma_j}, {"norm_E", in.norm_E},
              {"C", c},                     {"alpha", alpha},      {"mu", mu}};
  b.raw_value = in.sigma_jp1 + std::sqrt(jd) * std::sqrt((in.norm_x_inf * in.norm_x_inf + 1.0) / in.p) +
                mu * (std::sqrt((in.norm_x * in.norm_x + nd) / in.p) + c * in.lambda * alpha) +
                c * in.lambda * alpha;
  b.raw_prob = 1.0 - c * std::exp(-in.lambda * in.lambda) -
               failure_term(6.0 * pr.C1, jd, pr.c1 * std::pow(in.delta_j / 8.0, pr.gamma)) -
               failure_term(2.0 * pr.C1, 2.0 * rd, pr.c1 * rd * in.lambda * in.lambda / std::pow(4.0, pr.gamma));
  b.value = b.raw_value;
  b.prob_lower = std::clamp(b.raw_prob, 0.0, 1.0);
  if (!(b.raw_prob > 0)) {
    b.vacuous = true;
    b.flags.emplace_back("vacuous");
  }
  return b;
}

ConcentrationParams completion_params(const Matrix& a, double p, double K) {
  if (!(p > 0 && p <= 1)) throw DomainError("completion_params: p must lie in (0, 1]");
  if (!(K >= 0)) throw DomainError("completion_params: K must be >= 0");
  const double alpha = (a.size() ? a.cwiseAbs().maxCoeff() : 0.0) + K;
  const double bound = std::max(alpha / p, 1e-300);
  return {2.0, 1.0 / (2.0 * bound * bound), 2.0};
}

LowRankMatrix flat_low_rank_matrix(Index m, Index n, const std::vector<double>& singular_values,
                                   std::uint64_t seed) {
  validate(LowRankSpec{m, n, singular_values, seed});
  const Index r = static_cast<Index>(singular_values.size());
  if (r > 2) throw DomainError("flat_low_rank_matrix: rank must be 1 or 2");
  if (r == 2 && (m % 2 != 0 || n % 2 != 0)) throw DomainError("flat_low_rank_matrix: m and n must be even");
  auto factor = [&](Index d, std::uint64_t s) {
    Xoshiro256 rng(s);
    Matrix f(d, r);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index i = 0; i < d; ++i) f(i, 0) = rng.bit() ? scale : -scale;
    if (r == 2) {
      std::vector<double> signs(static_cast<std::size_t>(d), 1.0);
      std::fill(signs.begin() + d / 2, signs.end(), -1.0);
      std::shuffle(signs.begin(), signs.end(), rng);
      for (Index i = 0; i < d; ++i) f(i, 1) = f(i, 0) * signs[static_cast<std::size_t>(i)];
    }
    return f;
  };
  LowRankMatrix out;
  SvdResult& f = out.factors;
  f.left = factor(m, derive_seed(seed, 0));
  f.right = factor(n, derive_seed(seed, 1));
  f.singular_values = Eigen::Map<const Vector>(singular_values.data(), r);
  for (Index k = 0; k < r; ++k) {
    if (f.left(0, k) < 0) {
      f.left.col(k) *= -1.0;
      f.right.col(k) *= -1.0;
    }
  }
  out.a = f.left * f.singular_values.asDiagonal() * f.right.transpose();
  return out;
}

ProjectionTail projection_lemma_check(Index d, Index n, double sigma, const std::vector<double>& t_grid,
                                      std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (n < 1 || d < 1) throw DomainError("projection_lemma_check: d and n must be >= 1");
  if (d > n) throw DomainError("projection_lemma_check: d must not exceed n");
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw DomainError("projection_lemma_check: sigma must be >= 0");
  if (trials == 0) throw DomainError("projection_lemma_check: trials must be >= 1");
  Matrix g(n, d);
  {
    Xoshiro256 rng(derive_seed(seed, 0));
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
    }
  }
  const Matrix h = orthonormalize(g).basis();
  ProjectionTail out;
  out.t_grid = t_grid;
  out.trials = trials;
  out.norms.resize(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    Xoshiro256 rng(derive_seed(seed, k + 1));
    Vector x(n);
    for (Index i = 0; i < n; ++i) {
      double v = 0.0;
      if (sigma > 0) {
        do {
          v = sigma * rng.normal();
        } while (std::abs(v) > 1.0);
      }
      x(i) = v;
    }
    out.norms[k] = (h.transpose() * x).norm();
  });
  std::sort(out.norms.begin(), out.norms.end());
  const double centre = sigma * std::sqrt(static_cast<double>(d));
  for (double t : t_grid) {
    const auto first = std::lower_bound(out.norms.begin(), out.norms.end(), centre + t);
    out.tail.push_back(static_cast<double>(out.norms.end() - first) / static_cast<double>(trials));
  }
  return out;
}

}  // namespace pertbound
