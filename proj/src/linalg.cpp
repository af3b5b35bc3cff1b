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

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pertbound {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

namespace {

void require_nonempty(const Matrix& a, std::string_view what) {
  if (a.rows() <= 0 || a.cols() <= 0) {
    throw DomainError(std::string(what) + ": matrix must have positive dimensions");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Index q = 0; q < a.cols(); ++q) {
    for (Index p = 0; p < q; ++p) sum += a(p, q) * a(p, q);
  }
  return std::sqrt(2.0 * sum);
}

// Orthonormalizes the flagged columns in place (two passes of modified
// Gram-Schmidt), then fills the remaining ones with standard basis vectors
// projected off everything accepted so far.
void complete_orthonormal(Matrix& m, const std::vector<bool>& reliable) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  std::vector<Index> accepted;
  accepted.reserve(cols);
  auto orthogonalize = [&](Vector& x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k : accepted) x -= m.col(k).dot(x) * m.col(k);
    }
  };
  std::vector<Index> pending;
  for (Index i = 0; i < cols; ++i) {
    if (!reliable[i]) {
      pending.push_back(i);
      continue;
    }
    Vector x = m.col(i);
    orthogonalize(x);
    const double nrm = x.norm();
    if (nrm < 0.5) {
      pending.push_back(i);
      continue;
    }
    m.col(i) = x / nrm;
    accepted.push_back(i);
  }
  std::sort(pending.begin(), pending.end());
  Index next_basis = 0;
  for (Index i : pending) {
    while (true) {
      if (next_basis >= rows) {
        throw ConvergenceError("svd: could not complete orthonormal basis", 0.0);
      }
      Vector x = Vector::Unit(rows, next_basis++);
      orthogonalize(x);
      const double nrm = x.norm();
      if (nrm > 1e-3) {
        m.col(i) = x / nrm;
        accepted.push_back(i);
        break;
      }
    }
  }
}

void apply_sign_convention(SvdResult& r) {
  for (Index i = 0; i < r.left.cols(); ++i) {
    for (Index k = 0; k < r.left.rows(); ++k) {
      const double x = r.left(k, i);
      if (std::abs(x) > 1e-12) {
        if (x < 0) {
          r.left.col(i) *= -1.0;
          r.right.col(i) *= -1.0;
        }
        break;
      }
    }
  }
}

SvdResult svd_jacobi(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index k = std::min(m, n);
  const SymmetricEigen eig = jacobi_eigen(dilate(a));

  SvdResult r;
  r.singular_values.resize(k);
  r.left.resize(m, k);
  r.right.resize(n, k);
  const double top = std::max(eig.values(0), 0.0);
  const double negligible = kSvdTol * std::max(1.0, top);
  std::vector<bool> reliable(k, false);
  for (Index i = 0; i < k; ++i) {
    r.singular_values(i) = std::max(eig.values(i), 0.0);
    const auto x = eig.vectors.col(i);
    const double nu = x.head(m).norm();
    const double nv = x.tail(n).norm();
    if (r.singular_values(i) > negligible && nu > 0.1 && nv > 0.1) {
      r.left.col(i) = x.head(m) / nu;
      r.right.col(i) = x.tail(n) / nv;
      reliable[i] = true;
    } else {
      r.left.col(i).setZero();
      r.right.col(i).setZero();
    }
  }
  complete_orthonormal(r.left, reliable);
  complete_orthonormal(r.right, reliable);
  return r;
}

SvdResult svd_bidiagonal(const Matrix& a) {
  Eigen::BDCSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("svd: bidiagonal divide-and-conquer failed", 0.0);
  }
  SvdResult r;
  r.singular_values = solver.singularValues();
  r.left = solver.matrixU();
  r.right = solver.matrixV();
  return r;
}

SvdMethod resolve(SvdMethod method, const Matrix& a) {
  if (method != SvdMethod::Auto) return method;
  return a.rows() + a.cols() <= kJacobiAutoLimit ? SvdMethod::Jacobi : SvdMethod::Bidiagonal;
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& s, int max_sweeps, double rel_tol) {
  if (s.rows() != s.cols()) throw DomainError("jacobi_eigen: matrix is not square");
  require_nonempty(s, "jacobi_eigen");
  require_finite(s, "jacobi_eigen");
  const double scale = s.norm();
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
    throw DomainError("jacobi_eigen: matrix is not symmetric");
  }
  const Index n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::Identity(n, n);
  const double threshold = rel_tol * scale;

  int sweeps = 0;
  double off = off_diagonal_norm(a);
  while (off > threshold) {
    if (sweeps == max_sweeps) {
      throw ConvergenceError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
                                 " sweeps",
                             off);
    }
    ++sweeps;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - sn * arq;
          a(r, q) = sn * arp + c * arq;
          a(p, r) = a(r, p);
          a(q, r) = a(r, q);
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - sn * vrq;
          v(r, q) = sn * vrp + c * vrq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  out.sweeps = sweeps;
  out.off_norm = off;
  return out;
}

SvdResult svd(const Matrix& a, SvdMethod method) {
  require_nonempty(a, "svd");
  require_finite(a, "svd");
  SvdResult r = resolve(method, a) == SvdMethod::Jacobi ? svd_jacobi(a) : svd_bidiagonal(a);
  apply_sign_convention(r);
  return r;
}

Vector singular_values(const Matrix& a, SvdMethod method) {
  require_nonempty(a, "singular_values");
  require_finite(a, "singular_values");
  if (resolve(method, a) == SvdMethod::Jacobi) {
    const Index k = std::min(a.rows(), a.cols());
    const SymmetricEigen eig = jacobi_eigen(dilate(a));
    return eig.values.head(k).cwiseMax(0.0);
  }
  Eigen::BDCSVD<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("singular_values: bidiagonal divide-and-conquer failed", 0.0);
  }
  return solver.singularValues();
}

double spectral_norm(const Matrix& m, SvdMethod method) { return singular_values(m, method)(0); }

double vector_angle_sin(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw DomainError("vector_angle_sin: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw DomainError("vector_angle_sin: zero-length vector");
  const Vector a = u / nu;
  const Vector b = v / nv;
  if (a == b || a == -b) return 0.0;
  // Residual form of sqrt(1 - (a.b)^2); keeps precision for nearly parallel vectors.
  const double s = (b - a.dot(b) * a).norm();
  return std::clamp(s, 0.0, 1.0);
}

Subspace Subspace::from_orthonormal(Matrix basis) {
  if (basis.rows() <= 0 || basis.cols() <= 0) throw DomainError("Subspace: empty basis");
  if (basis.cols() > basis.rows()) throw DomainError("Subspace: more basis vectors than dimensions");
  require_finite(basis, "Subspace");
  const Matrix gram = basis.transpose() * basis;
  const double err = (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (err > kOrthTol) {
    throw DomainError("Subspace: basis is not orthonormal (deviation " + std::to_string(err) + ")");
  }
  return Subspace(std::move(basis));
}

Subspace Subspace::full(Index ambient_dim) {
  return Subspace(Matrix::Identity(ambient_dim, ambient_dim));
}

Subspace leading_subspace(const Matrix& orthonormal_columns, Index j) {
  if (j < 1 || j > orthonormal_columns.cols()) throw DomainError("leading_subspace: j out of range");
  return Subspace::from_orthonormal(orthonormal_columns.leftCols(j));
}

Subspace orthonormalize(const Matrix& columns) {
  require_nonempty(columns, "orthonormalize");
  require_finite(columns, "orthonormalize");
  if (columns.cols() > columns.rows()) throw DomainError("orthonormalize: more columns than dimensions");
  const double tol = kRankTolFactor * columns.colwise().norm().maxCoeff();
  Matrix q(columns.rows(), columns.cols());
  for (Index i = 0; i < columns.cols(); ++i) {
    Vector x = columns.col(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < i; ++k) x -= q.col(k).dot(x) * q.col(k);
    }
    const double nrm = x.norm();
    if (!(nrm > tol)) throw DomainError("orthonormalize: columns are linearly dependent");
    q.col(i) = x / nrm;
  }
  return Subspace::from_orthonormal(std::move(q));
}

double subspace_angle_sin(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim()) throw DomainError("subspace_angle_sin: ambient dimension mismatch");
  if (u.dim() != v.dim()) throw DomainError("subspace_angle_sin: dimension mismatch");
  const Index n = u.ambient_dim();
  const Index w = u.dim() + v.dim();
  Matrix diff;
  if (w >= n) {
    diff = u.projector() - v.projector();
  } else {
    // P_U - P_V vanishes off span[U V]; restrict it to an orthonormal basis Q of that span.
    Matrix stacked(n, w);
    stacked << u.basis(), v.basis();
    const Matrix q = Eigen::HouseholderQR<Matrix>(stacked).householderQ() * Matrix::Identity(n, w);
    const Matrix qu = q.transpose() * u.basis();
    const Matrix qv = q.transpose() * v.basis();
    diff = qu * qu.transpose() - qv * qv.transpose();
  }
  return std::clamp(spectral_norm(diff), 0.0, 1.0);
}

double subspace_angle_sin_complement(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw DomainError("subspace_angle_sin_complement: ambient dimension mismatch");
  }
  if (u.dim() != v.dim()) throw DomainError("subspace_angle_sin_complement: dimension mismatch");
  const Matrix residual = v.basis() - u.basis() * (u.basis().transpose() * v.basis());
  return std::clamp(spectral_norm(residual), 0.0, 1.0);
}

Matrix dilate(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix d = Matrix::Zero(m + n, m + n);
  d.topRightCorner(m, n) = a;
  d.bottomLeftCorner(n, m) = a.transpose();
  return d;
}

Vector dilation_eigenvector(const Vector& u, const Vector& v, int sign) {
  Vector x(u.size() + v.size());
  x << u, (sign >= 0 ? 1.0 : -1.0) * v;
  return x / std::sqrt(2.0);
}

Vector project(const Subspace& s, const Vector& x) {
  if (x.size() != s.ambient_dim()) throw DomainError("project: dimension mismatch");
  return s.basis() * (s.basis().transpose() * x);
}

bool has_multiplicity(const Vector& singular_values, Index j, double tol) {
  const Index k = singular_values.size();
  if (j < 1 || j > k) throw DomainError("has_multiplicity: index out of range");
  const double scale = tol * std::max(1.0, singular_values(0));
  const Index i = j - 1;
  if (i > 0 && singular_values(i - 1) - singular_values(i) <= scale) return true;
  if (i + 1 < k && singular_values(i) - singular_values(i + 1) <= scale) return true;
  return false;
}

}  // namespace pertbound
