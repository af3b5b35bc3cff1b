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

#include "pertbound/noise.hpp"

#include "pertbound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pertbound {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Zero: return "zero";
    case NoiseKind::Bernoulli: return "bernoulli";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::BoundedIID: return "bounded_iid";
    case NoiseKind::BoundedSymmetric: return "bounded_symmetric";
    case NoiseKind::SubExponential: return "subexponential";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  for (NoiseKind k : {NoiseKind::Zero, NoiseKind::Bernoulli, NoiseKind::Gaussian, NoiseKind::BoundedIID,
                      NoiseKind::BoundedSymmetric, NoiseKind::SubExponential}) {
    if (name == to_string(k)) return k;
  }
  throw DomainError("unsupported noise kind: '" + std::string(name) + "'");
}

void validate(const NoiseSpec& spec) {
  if (!std::isfinite(spec.K) || spec.K <= 0) throw DomainError("noise: K must be a positive finite number");
  switch (spec.kind) {
    case NoiseKind::BoundedIID:
    case NoiseKind::BoundedSymmetric:
      if (spec.K < 1.0) throw DomainError("noise: bounded kinds require K >= 1");
      break;
    case NoiseKind::SubExponential:
      if (spec.K < 1.0 / std::numbers::sqrt2) {
        throw DomainError("noise: subexponential requires K >= 1/sqrt(2) for the unit-variance Laplace law");
      }
      if (spec.subexp_C1 && !(*spec.subexp_C1 > 0)) throw DomainError("noise: subexp_C1 must be > 0");
      if (spec.subexp_c1 && !(*spec.subexp_c1 > 0)) throw DomainError("noise: subexp_c1 must be > 0");
      break;
    default:
      break;
  }
}

bool is_bounded(const NoiseSpec& spec) {
  switch (spec.kind) {
    case NoiseKind::Zero:
    case NoiseKind::Bernoulli:
    case NoiseKind::BoundedIID:
    case NoiseKind::BoundedSymmetric:
      return true;
    default:
      return false;
  }
}

namespace {

class EntrySampler {
 public:
  EntrySampler(const NoiseSpec& spec, std::uint64_t seed)
      : kind_(spec.kind), k_(spec.K), rng_(seed), p_half_(0.5 / (spec.K * spec.K)) {}

  double next() {
    switch (kind_) {
      case NoiseKind::Zero: return 0.0;
      case NoiseKind::Bernoulli: return rng_.bit() ? 1.0 : -1.0;
      case NoiseKind::Gaussian: return rng_.normal();
      case NoiseKind::BoundedIID:
      case NoiseKind::BoundedSymmetric: {
        const double u = rng_.uniform();
        if (u < p_half_) return k_;
        if (u < 2.0 * p_half_) return -k_;
        return 0.0;
      }
      case NoiseKind::SubExponential: return rng_.laplace(1.0 / std::numbers::sqrt2);
    }
    return 0.0;
  }

 private:
  NoiseKind kind_;
  double k_;
  Xoshiro256 rng_;
  double p_half_;
};

}  // namespace

void sample_noise_into(const NoiseSpec& spec, std::uint64_t seed, Matrix& out) {
  validate(spec);
  const Index m = out.rows();
  const Index n = out.cols();
  if (m <= 0 || n <= 0) throw DomainError("sample_noise: dimensions must be positive");
  EntrySampler sampler(spec, seed);
  if (spec.kind == NoiseKind::BoundedSymmetric) {
    if (m != n) throw DomainError("sample_noise: bounded_symmetric requires a square matrix");
    for (Index i = 0; i < m; ++i) {
      for (Index j = i; j < n; ++j) {
        const double x = sampler.next();
        out(i, j) = x;
        out(j, i) = x;
      }
    }
    return;
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = sampler.next();
  }
}

Matrix sample_noise(const NoiseSpec& spec, Index m, Index n, std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw DomainError("sample_noise: dimensions must be positive");
  Matrix out(m, n);
  sample_noise_into(spec, seed, out);
  return out;
}

bool operator==(const ConcentrationParams& a, const ConcentrationParams& b) {
  return a.C1 == b.C1 && a.c1 == b.c1 && a.gamma == b.gamma;
}

void validate(const ConcentrationParams& p) {
  auto ok = [](double x) { return std::isfinite(x) && x > 0; };
  if (!ok(p.C1) || !ok(p.c1) || !ok(p.gamma)) {
    throw DomainError("concentration params: C1, c1, gamma must all be finite and > 0");
  }
}

ConcentrationParams concentration_params(const NoiseSpec& spec) {
  validate(spec);
  const double k2 = spec.K * spec.K;
  switch (spec.kind) {
    case NoiseKind::Zero:
    case NoiseKind::Bernoulli:
    case NoiseKind::Gaussian:
      return {2.0, 0.5, 2.0};
    case NoiseKind::BoundedSymmetric:
      return {2.0, 1.0 / (8.0 * k2), 2.0};
    case NoiseKind::BoundedIID:
      return {2.0, 1.0 / (2.0 * k2), 2.0};
    case NoiseKind::SubExponential:
      return {spec.subexp_C1.value_or(std::numbers::e), spec.subexp_c1.value_or(1.0 / (4.0 * spec.K)), 1.0};
  }
  throw DomainError("concentration_params: unsupported kind");
}

bool params_are_rigorous(const NoiseSpec& spec) { return spec.kind != NoiseKind::SubExponential; }

ConcentrationParams combine_params(const ConcentrationParams& a, const ConcentrationParams& b) {
  validate(a);
  validate(b);
  if (a.gamma != b.gamma) throw DomainError("combine_params: gamma mismatch");
  return {a.C1 + b.C1, std::min(a.c1, b.c1) / std::pow(2.0, a.gamma), a.gamma};
}

double norm_bound_from_params(const ConcentrationParams& p, Index m, Index n, double eps) {
  validate(p);
  if (!(eps > 0 && eps < 1)) throw DomainError("norm_bound_from_params: eps must lie in (0, 1)");
  if (m <= 0 || n <= 0) throw DomainError("norm_bound_from_params: dimensions must be positive");
  const double log_terms = static_cast<double>(m + n) * std::log(9.0) + std::log(p.C1) - std::log(eps);
  const double half = std::pow(std::max(log_terms, 0.0) / p.c1, 1.0 / p.gamma);
  return 2.0 * half;
}

void validate(const LowRankSpec& spec) {
  if (spec.m <= 0 || spec.n <= 0) throw DomainError("lowrank: m and n must be positive");
  const auto& s = spec.singular_values;
  if (s.empty()) throw DomainError("lowrank: at least one singular value required");
  if (static_cast<Index>(s.size()) > std::min(spec.m, spec.n)) {
    throw DomainError("lowrank: rank exceeds min(m, n)");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || s[i] <= 0) throw DomainError("lowrank: singular values must be positive");
    if (i > 0 && s[i] > s[i - 1]) throw DomainError("lowrank: singular values must be descending");
  }
}

LowRankMatrix low_rank_matrix(const LowRankSpec& spec) {
  validate(spec);
  const Index r = static_cast<Index>(spec.singular_values.size());
  auto gaussian = [](Index rows, Index cols, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
    }
    return g;
  };
  LowRankMatrix out;
  SvdResult& f = out.factors;
  f.left = orthonormalize(gaussian(spec.m, r, derive_seed(spec.seed, 0))).basis();
  f.right = orthonormalize(gaussian(spec.n, r, derive_seed(spec.seed, 1))).basis();
  f.singular_values = Eigen::Map<const Vector>(spec.singular_values.data(), r);
  for (Index i = 0; i < r; ++i) {
    for (Index k = 0; k < spec.m; ++k) {
      if (std::abs(f.left(k, i)) > 1e-12) {
        if (f.left(k, i) < 0) {
          f.left.col(i) *= -1.0;
          f.right.col(i) *= -1.0;
        }
        break;
      }
    }
  }
  out.a = f.left * f.singular_values.asDiagonal() * f.right.transpose();
  return out;
}

std::vector<double> spectral_gaps(const std::vector<double>& singular_values) {
  std::vector<double> gaps(singular_values.size());
  for (std::size_t i = 0; i < singular_values.size(); ++i) {
    const double next = i + 1 < singular_values.size() ? singular_values[i + 1] : 0.0;
    gaps[i] = singular_values[i] - next;
  }
  return gaps;
}

}  // namespace pertbound
