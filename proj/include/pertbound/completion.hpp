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

// Spectral completion: observe each entry of A + Z with probability p,
// rescale by 1/p and project a column onto the top-j left singular
// vectors of the observed matrix.

#include "pertbound/bounds.hpp"
#include "pertbound/concentration.hpp"
#include "pertbound/noise.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace pertbound {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct ObservedMatrix {
  Matrix values;              // zero wherever unobserved
  std::optional<Mask> mask;   // true = observed
  std::optional<double> p_nominal;
};

/// Throws DomainError when a mask has the wrong shape or values are
/// nonzero at unobserved positions.
void validate(const ObservedMatrix& obs);

struct Observation {
  ObservedMatrix observed;
  Matrix z;  // the realized noise, also at unobserved positions
  std::vector<std::string> flags;
};

/// b_ij = (a_ij + z_ij) chi_ij with P(chi_ij = 1) = p. Z comes from
/// derive_seed(seed, 0), the mask from derive_seed(seed, 1). Unbounded
/// noise kinds are rejected unless allow_unbounded, which adds the flag
/// "outside_bounded_noise_assumption".
Observation observe(const Matrix& a, double p, const NoiseSpec& z_spec, std::uint64_t seed,
                    bool allow_unbounded = false);

/// e_ij = (a_ij (chi_ij - p) + z_ij chi_ij) / p, so (1/p) B = A + E.
Matrix implied_perturbation(const Matrix& a, const Matrix& z, const Mask& mask, double p);

struct PEstimate {
  double p = 0.0;
  bool approximate = false;  // no mask: density of nonzero values
};
PEstimate estimate_p(const ObservedMatrix& obs);

struct RecoveryResult {
  Index column = 0;  // 1-based
  Index j = 0;
  Vector x_tilde;    // column of values / p
  Vector estimate;   // P_V x_tilde
  std::shared_ptr<const Matrix> basis;  // orthonormal basis of V
  std::optional<double> error_abs;
  std::optional<double> error_rel;
  std::optional<std::array<double, 3>> terms;  // ||x - P_U x||, ||P_U (x - x_tilde)||, ||P_U x_tilde - P_V x_tilde||
};

/// Holds the SVD of the observed matrix so many columns share it.
class SpectralCompleter {
 public:
  SpectralCompleter(const ObservedMatrix& obs, double p, Index j, SvdMethod method = SvdMethod::Auto);

  RecoveryResult recover(Index column) const;
  const Vector& singular_values() const { return sv_; }
  Index j() const { return j_; }

 private:
  Matrix values_;
  double p_;
  Index j_;
  Vector sv_;
  std::shared_ptr<const Matrix> basis_;
};

RecoveryResult recover_column(const ObservedMatrix& obs, double p, Index j, Index column);

/// Fills error_abs / error_rel against the truth; with the true top-j
/// left singular subspace also the three decomposition terms.
RecoveryResult recovery_error(const Matrix& a, RecoveryResult result,
                              const std::optional<Subspace>& true_u = std::nullopt);

struct RecoveryBoundInput {
  double sigma_jp1 = 0.0;  // 0 when j = r
  Index j = 1;
  Index r = 1;
  double norm_x_inf = 0.0;
  double norm_x = 0.0;
  Index n = 1;             // length of the column
  double p = 1.0;
  double K = 1.0;
  double lambda = 1.0;
  ConcentrationParams params;
  double delta_j = 1.0;
  double sigma_j = 1.0;
  double norm_E = 0.0;
  double C_abs = 1.0;      // the unspecified absolute constant
};

/// sigma_{j+1} + sqrt(j) sqrt((|x|_inf^2 + 1)/p) + mu (sqrt((|x|^2 + n)/p) + C lambda alpha) + C lambda alpha
/// with alpha = (|x|_inf + K)/p and
/// mu = C sqrt(j) (lambda^(2/gamma) r^(1/gamma)/delta_j + |E|/sigma_j + |E|^2/(sigma_j delta_j));
/// probability 1 - C exp(-lambda^2) - 6 C1 9^j exp(-c1 delta_j^gamma/8^gamma)
///             - 2 C1 9^(2r) exp(-c1 r lambda^2/4^gamma).
BoundReport recovery_bound(const RecoveryBoundInput& in);

/// Certificate of the implied perturbation: entries are independent,
/// mean zero and bounded by (|A|_inf + K)/p, giving (2, 1/(2 alpha^2), 2).
ConcentrationParams completion_params(const Matrix& a, double p, double K);

/// Rank <= 2 matrix with flat factors: u_1 has entries +-1/sqrt(m) and
/// u_2 = u_1 * s for a balanced sign vector s (likewise for v), so every
/// entry of A is O(sigma_1 / sqrt(mn)). m and n must be even.
LowRankMatrix flat_low_rank_matrix(Index m, Index n, const std::vector<double>& singular_values,
                                   std::uint64_t seed);

struct ProjectionTail {
  std::vector<double> t_grid;
  std::vector<double> tail;  // P(||P_H X|| >= sigma sqrt(d) + t)
  std::vector<double> norms; // sorted samples of ||P_H X||
  std::size_t trials = 0;
};

/// X has iid N(0, sigma^2) entries conditioned on |x_i| <= 1; H is a
/// random d-dimensional subspace of R^n fixed across trials.
ProjectionTail projection_lemma_check(Index d, Index n, double sigma, const std::vector<double>& t_grid,
                                      std::size_t trials, std::uint64_t seed, unsigned threads = 1);

}  // namespace pertbound
