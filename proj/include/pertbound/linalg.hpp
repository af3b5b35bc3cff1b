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

// Dense linear algebra used by every other module: SVD, spectral norm,
// vector and subspace angles, projections and the symmetric dilation.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace pertbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kOrthTol = 1e-10;       // orthonormality of vector sets
inline constexpr double kSvdTol = 1e-9;         // SVD reconstruction, degenerate gaps
inline constexpr double kRankTolFactor = 1e-10; // times the largest column norm

/// Invalid input: shape mismatch, non-finite entries, rank deficiency, ...
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Throws DomainError if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

enum class SvdMethod {
  Auto,       // Jacobi for small problems, Bidiagonal otherwise
  Jacobi,     // cyclic Jacobi eigensolve of the dilation
  Bidiagonal  // divide-and-conquer bidiagonal SVD (Eigen::BDCSVD)
};

/// Thin SVD: k = min(m, n) singular triplets, values descending and listed
/// with multiplicity. Sign convention: the first coordinate of each left
/// vector with magnitude above 1e-12 is positive.
struct SvdResult {
  Vector singular_values;  // k
  Matrix left;             // m x k
  Matrix right;            // n x k
};

/// Problems with rows + cols at or below this use Jacobi under SvdMethod::Auto.
inline constexpr Index kJacobiAutoLimit = 160;

SvdResult svd(const Matrix& a, SvdMethod method = SvdMethod::Auto);

/// Singular values only (descending). Cheaper than svd() on the fast path.
Vector singular_values(const Matrix& a, SvdMethod method = SvdMethod::Auto);

double spectral_norm(const Matrix& m, SvdMethod method = SvdMethod::Auto);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns, matching values
  int sweeps = 0;
  double off_norm = 0.0;
};

/// Cyclic Jacobi on a symmetric matrix. Stops once the off-diagonal
/// Frobenius norm drops to rel_tol * ||s||_F; throws ConvergenceError
/// (carrying that norm) after max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& s, int max_sweeps = 100, double rel_tol = 1e-12);

/// sin of the angle in [0, pi/2] between two unit vectors.
double vector_angle_sin(const Vector& u, const Vector& v);

/// A subspace carried by an orthonormal basis.
class Subspace {
 public:
  /// Validates basis^T basis = I within kOrthTol.
  static Subspace from_orthonormal(Matrix basis);
  static Subspace full(Index ambient_dim);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  Matrix projector() const { return basis_ * basis_.transpose(); }

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// Span of the first j columns of an orthonormal set.
Subspace leading_subspace(const Matrix& orthonormal_columns, Index j);

/// Householder QR of the columns. Throws DomainError when the columns are
/// dependent within kRankTolFactor * (max column norm).
Subspace orthonormalize(const Matrix& columns);

/// ||P_U - P_V|| for equal-dimension subspaces.
double subspace_angle_sin(const Subspace& u, const Subspace& v);

/// ||P_{U^perp} P_V||, equal to subspace_angle_sin for equal dimensions.
double subspace_angle_sin_complement(const Subspace& u, const Subspace& v);

/// [0 A; A^T 0], (m+n) x (m+n).
Matrix dilate(const Matrix& a);

/// Unit eigenvector of dilate(A) for eigenvalue +sigma built from the
/// singular pair (u, v): [u; v] / sqrt(2). With sign = -1 gives the
/// eigenvector [u; -v] / sqrt(2) of -sigma.
Vector dilation_eigenvector(const Vector& u, const Vector& v, int sign = 1);

Vector project(const Subspace& s, const Vector& x);

/// True when sigma_j is within tol * max(1, sigma_1) of a neighbour
/// (1-based j), i.e. the singular vector is not determined up to sign.
bool has_multiplicity(const Vector& singular_values, Index j, double tol = kSvdTol);

}  // namespace pertbound
