#pragma once

// Dense primitives shared by the solvers: the slice stack, vectorization,
// signed slice sums, dominant singular triplets, thin SVD and verge vectors.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "l1t2/errors.hpp"

namespace l1t2 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

/// N real D x M slices sharing one shape.
class MatrixStack {
public:
  MatrixStack() = default;

  explicit MatrixStack(std::vector<Matrix> slices) : slices_(std::move(slices)) {
    if (slices_.empty()) throw DimensionError("matrix stack needs at least one slice");
    rows_ = static_cast<std::size_t>(slices_.front().rows());
    cols_ = static_cast<std::size_t>(slices_.front().cols());
    if (rows_ == 0 || cols_ == 0) throw DimensionError("slices must be non-empty");
    for (std::size_t i = 0; i < slices_.size(); ++i) {
      const auto& s = slices_[i];
      if (static_cast<std::size_t>(s.rows()) != rows_ ||
          static_cast<std::size_t>(s.cols()) != cols_)
        throw DimensionError("slice " + std::to_string(i) + " has shape " +
                             std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                             ", expected " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
      if (!all_finite(s))
        throw InputError("slice " + std::to_string(i) + " has non-finite entries");
    }
  }

  std::size_t rows() const { return rows_; }  // D
  std::size_t cols() const { return cols_; }  // M
  std::size_t size() const { return slices_.size(); }  // N
  bool empty() const { return slices_.empty(); }

  const Matrix& operator[](std::size_t i) const { return slices_[i]; }
  const std::vector<Matrix>& slices() const { return slices_; }
  auto begin() const { return slices_.begin(); }
  auto end() const { return slices_.end(); }

  MatrixStack scaled(double alpha) const {
    std::vector<Matrix> out;
    out.reserve(slices_.size());
    for (const auto& s : slices_) out.emplace_back(alpha * s);
    return MatrixStack(std::move(out));
  }

  friend bool operator==(const MatrixStack& a, const MatrixStack& b) {
    if (a.size() != b.size() || a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

private:
  std::vector<Matrix> slices_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Dominant singular value with unit singular vectors, u's largest-magnitude
/// entry positive.
struct SingularTriplet {
  double sigma = 0.0;
  Vector u;
  Vector v;
};

/// Y = Q * diag(S) * W with rank rho.
struct ThinSvd {
  Matrix Q;  // rows(Y) x rho, orthonormal columns
  Vector S;  // rho positive, nonincreasing
  Matrix W;  // rho x cols(Y), orthonormal rows
  std::size_t rho = 0;
};

// Column-major stacking, so that u' X v == vectorize(X)' kron(v, u).
inline Vector vectorize(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix matricize(const Vector& x, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(x.size()) != rows * cols)
    throw DimensionError("cannot reshape length " + std::to_string(x.size()) + " into " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  return Eigen::Map<const Matrix>(x.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

/// Y = [vec(X_1), ..., vec(X_N)], DM x N.
inline Matrix vectorized_stack(const MatrixStack& stack) {
  Matrix y(static_cast<Eigen::Index>(stack.rows() * stack.cols()),
           static_cast<Eigen::Index>(stack.size()));
  for (std::size_t i = 0; i < stack.size(); ++i)
    y.col(static_cast<Eigen::Index>(i)) = vectorize(stack[i]);
  return y;
}

/// sum_i signs[i] * X_i. Entries of signs are +1 or -1.
template <typename Sign>
Matrix signed_sum(const MatrixStack& stack, std::span<const Sign> signs) {
  if (signs.size() != stack.size())
    throw DimensionError("sign vector has length " + std::to_string(signs.size()) +
                         ", stack has " + std::to_string(stack.size()) + " slices");
  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(stack.rows()),
                            static_cast<Eigen::Index>(stack.cols()));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] > 0)
      acc += stack[i];
    else
      acc -= stack[i];
  }
  return acc;
}

namespace detail {

// +1 unless the largest-magnitude entry (lowest index on ties) is negative.
inline double canonical_sign(const Vector& x) {
  Eigen::Index best = 0;
  double mag = -1.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (std::abs(x[k]) > mag) {
      mag = std::abs(x[k]);
      best = k;
    }
  }
  return x.size() > 0 && x[best] < 0.0 ? -1.0 : 1.0;
}

// Sign of the first nonzero entry in column-major order; +1 for all-zero.
inline double leading_sign(const Matrix& a) {
  const double* p = a.data();
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (p[k] != 0.0) return p[k] > 0.0 ? 1.0 : -1.0;
  return 1.0;
}

}  // namespace detail

/// Largest singular value only. Computed from the eigenvalues of the smaller
/// Gram matrix, which is bitwise identical for A and -A.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.cols() == 1) return a.col(0).norm();
  if (a.rows() == 1) return a.row(0).norm();
  Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues()[eig.eigenvalues().size() - 1]));
}

/// Dominant singular triplet of A. The all-zero matrix yields sigma = 0
/// with u = e1, v = e1.
inline SingularTriplet top_singular_triplet(const Matrix& a) {
  if (a.size() == 0) throw DimensionError("top_singular_triplet of an empty matrix");
  if (!all_finite(a)) throw InputError("top_singular_triplet: non-finite entries");

  SingularTriplet t;
  t.u = Vector::Zero(a.rows());
  t.v = Vector::Zero(a.cols());
  if (a.isZero(0.0)) {
    t.u[0] = 1.0;
    t.v[0] = 1.0;
    return t;
  }

  // Factor the sign-normalized matrix so that A and -A share sigma bit for bit.
  const double s = detail::leading_sign(a);
  Eigen::JacobiSVD<Matrix> svd(s * a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  t.sigma = svd.singularValues()[0];
  t.u = svd.matrixU().col(0);
  t.v = s * svd.matrixV().col(0);
  t.u.normalize();
  t.v.normalize();
  const double c = detail::canonical_sign(t.u);
  t.u *= c;
  t.v *= c;
  return t;
}

/// Thin SVD of Y keeping singular values above rank_tol * sigma_1.
inline ThinSvd thin_svd(const Matrix& y, double rank_tol = 1e-10) {
  if (y.size() == 0) throw DimensionError("thin_svd of an empty matrix");
  if (!all_finite(y)) throw InputError("thin_svd: non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  std::size_t rho = 0;
  if (sv.size() > 0 && sv[0] > 0.0) {
    const double cutoff = rank_tol * sv[0];
    while (rho < static_cast<std::size_t>(sv.size()) && sv[static_cast<Eigen::Index>(rho)] > cutoff)
      ++rho;
  }
  const auto r = static_cast<Eigen::Index>(rho);
  ThinSvd out;
  out.rho = rho;
  out.Q = svd.matrixU().leftCols(r);
  out.S = sv.head(r);
  out.W = svd.matrixV().leftCols(r).transpose();
  return out;
}

/// Unit vector orthogonal to every given column of length `dim`.
///
/// The columns are orthonormalized first; the complement direction is then
/// the first standard basis vector e_1, e_2, ... whose residual after
/// projection has norm above 1e-8. With `dim - 1` independent columns this is
/// the unique (up to sign) spanning vector of their orthogonal complement.
inline Vector orthonormal_complement_vector(std::span<const Vector> columns, std::size_t dim) {
  constexpr double kResidualFloor = 1e-8;
  const auto n = static_cast<Eigen::Index>(dim);
  std::vector<Vector> basis;
  basis.reserve(columns.size());

  auto project_out = [&basis](Vector x) {
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) x -= q.dot(x) * q;
    return x;
  };

  for (const auto& c : columns) {
    if (c.size() != n) throw DimensionError("complement: column length mismatch");
    Vector r = project_out(c);
    const double norm = r.norm();
    if (norm <= kResidualFloor * std::max(1.0, c.norm()))
      throw GeneralPositionError("complement: input columns are linearly dependent");
    basis.push_back(r / norm);
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    Vector r = project_out(Vector::Unit(n, k));
    const double norm = r.norm();
    if (norm > kResidualFloor) {
      // Re-project the normalized residual; a small residual loses digits.
      Vector v = project_out(r / norm);
      return v / v.norm();
    }
  }
  throw GeneralPositionError("complement: no direction outside the span of the columns");
}

inline Vector orthonormal_complement_vector(const std::vector<Vector>& columns, std::size_t dim) {
  return orthonormal_complement_vector(std::span<const Vector>(columns), dim);
}

}  // namespace l1t2
