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

// Random perturbation models E, their (C1, c1, gamma) concentration
// certificates, and the structured low-rank data matrix A.

#include "pertbound/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pertbound {

enum class NoiseKind {
  Zero,              // degenerate E = 0
  Bernoulli,         // +-1 with probability 1/2
  Gaussian,          // N(0, 1)
  BoundedIID,        // iid three-point law: +-K w.p. 1/(2K^2) each, else 0
  BoundedSymmetric,  // symmetric n x n, independent upper triangle, same law
  SubExponential     // Laplace with unit variance
};

std::string_view to_string(NoiseKind kind);
/// Accepts the snake_case names used in config files ("bounded_iid", ...).
NoiseKind parse_noise_kind(std::string_view name);

/// Entries have mean 0 and variance 1 for every kind except Zero.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Bernoulli;
  double K = 1.0;
  // Overrides for the SubExponential certificate, whose constants are
  // not pinned down (defaults: C1 = e, c1 = 1/(4K)).
  std::optional<double> subexp_C1;
  std::optional<double> subexp_c1;
};

/// Throws DomainError: K < 1 for bounded kinds, K < 1/sqrt(2) for
/// SubExponential (the unit-variance Laplace law needs it), non-finite K.
void validate(const NoiseSpec& spec);

/// True when every entry is bounded by K with probability 1.
bool is_bounded(const NoiseSpec& spec);

/// Entries iid from the named law, drawn in row-major order from
/// Xoshiro256(seed). BoundedSymmetric draws the upper triangle and mirrors;
/// it requires m == n.
Matrix sample_noise(const NoiseSpec& spec, Index m, Index n, std::uint64_t seed);
/// Same stream as sample_noise, written into a preallocated m x n matrix.
void sample_noise_into(const NoiseSpec& spec, std::uint64_t seed, Matrix& out);

/// P(|u^T E v| > t) <= C1 exp(-c1 t^gamma) for all unit u, v.
struct ConcentrationParams {
  double C1 = 2.0;
  double c1 = 0.5;
  double gamma = 2.0;
};

bool operator==(const ConcentrationParams& a, const ConcentrationParams& b);

/// Throws DomainError unless all three constants are finite and > 0.
void validate(const ConcentrationParams& p);

ConcentrationParams concentration_params(const NoiseSpec& spec);

/// False when the certificate uses placeholder constants (SubExponential).
bool params_are_rigorous(const NoiseSpec& spec);

/// Certificate for E1 + E2 by the union bound
/// P(|u^T(E1+E2)v| > t) <= P(|u^T E1 v| > t/2) + P(|u^T E2 v| > t/2):
/// (C1 + C2, min(c1, c2) / 2^gamma, gamma). Gammas must match.
ConcentrationParams combine_params(const ConcentrationParams& a, const ConcentrationParams& b);

/// B with P(||E|| > B) <= eps for an m x n (C1, c1, gamma)-concentrated E.
/// Over 1/4-nets of both spheres, ||E|| <= 2 max |x^T E y|, so
/// P(||E|| > B) <= 9^(m+n) C1 exp(-c1 (B/2)^gamma); solved for B.
double norm_bound_from_params(const ConcentrationParams& p, Index m, Index n, double eps);
inline double norm_bound_from_params(const ConcentrationParams& p, Index n, double eps) {
  return norm_bound_from_params(p, n, n, eps);
}

struct LowRankSpec {
  Index m = 0;
  Index n = 0;
  std::vector<double> singular_values;  // strictly positive, descending
  std::uint64_t seed = 0;
};

void validate(const LowRankSpec& spec);

/// A = sum_i sigma_i u_i v_i^T with u_i, v_i orthonormalized Gaussian
/// draws; `factors` holds the exact rank-r SVD (r columns).
struct LowRankMatrix {
  Matrix a;
  SvdResult factors;
};

LowRankMatrix low_rank_matrix(const LowRankSpec& spec);

/// Gaps delta_j = sigma_j - sigma_{j+1}; the last gap is sigma_r.
std::vector<double> spectral_gaps(const std::vector<double>& singular_values);

}  // namespace pertbound
