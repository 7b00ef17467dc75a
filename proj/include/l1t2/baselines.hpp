#pragma once

// Comparison methods: L2 TUCKER2 (HOSVD, HOOI, GLRAM), PCA and exact L1-PCA
// of the vectorized slices, and an alternating L1 heuristic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "l1t2/errors.hpp"
#include "l1t2/linalg.hpp"
#include "l1t2/solvers.hpp"

namespace l1t2 {

struct FactorPair {
  Vector u;
  Vector v;
};

/// sum_i (u' X_i v)^2
inline double l2_objective(const MatrixStack& stack, const Vector& u, const Vector& v) {
  return projections(stack, u, v).squaredNorm();
}

namespace detail {

inline Vector dominant_left(const Matrix& a) { return top_singular_triplet(a).u; }

// [X_1 v, ..., X_N v]
inline Matrix right_images(const MatrixStack& stack, const Vector& v) {
  Matrix z(static_cast<Eigen::Index>(stack.rows()), static_cast<Eigen::Index>(stack.size()));
  for (std::size_t i = 0; i < stack.size(); ++i) z.col(static_cast<Eigen::Index>(i)) = stack[i] * v;
  return z;
}

// [X_1' u, ..., X_N' u]
inline Matrix left_images(const MatrixStack& stack, const Vector& u) {
  Matrix z(static_cast<Eigen::Index>(stack.cols()), static_cast<Eigen::Index>(stack.size()));
  for (std::size_t i = 0; i < stack.size(); ++i)
    z.col(static_cast<Eigen::Index>(i)) = stack[i].transpose() * u;
  return z;
}

}  // namespace detail

/// Dominant left singular vectors of the mode-1 unfolding [X_1, ..., X_N]
/// and the mode-2 unfolding [X_1', ..., X_N'].
inline FactorPair hosvd_rank1(const MatrixStack& stack) {
  if (stack.empty()) throw DimensionError("hosvd_rank1: empty stack");
  const auto d = static_cast<Eigen::Index>(stack.rows());
  const auto m = static_cast<Eigen::Index>(stack.cols());
  const auto n = static_cast<Eigen::Index>(stack.size());
  Matrix mode1(d, m * n);
  Matrix mode2(m, d * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mode1.middleCols(i * m, m) = stack[static_cast<std::size_t>(i)];
    mode2.middleCols(i * d, d) = stack[static_cast<std::size_t>(i)].transpose();
  }
  return {detail::dominant_left(mode1), detail::dominant_left(mode2)};
}

struct AlternationOptions {
  std::size_t max_iters = 100;
  double tol = 1e-10;  // stop when the L2 objective gains <= tol * objective
};

struct AlternationResult {
  Vector u;
  Vector v;
  std::vector<double> l2_history;  // entry 0 is the objective at the start point
  std::size_t iterations = 0;
};

namespace detail {

// Each iteration updates u given v, then v given u (or the reverse when
// v_first is set), each step maximizing the L2 objective exactly.
inline AlternationResult alternate_l2(const MatrixStack& stack, Vector u, Vector v,
                                      const AlternationOptions& opts, bool v_first) {
  AlternationResult r;
  double prev = l2_objective(stack, u, v);
  r.l2_history.push_back(prev);
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    if (v_first) {
      v = dominant_left(left_images(stack, u));
      u = dominant_left(right_images(stack, v));
    } else {
      u = dominant_left(right_images(stack, v));
      v = dominant_left(left_images(stack, u));
    }
    const double cur = l2_objective(stack, u, v);
    r.l2_history.push_back(cur);
    ++r.iterations;
    if (cur - prev <= opts.tol * std::max(prev, std::numeric_limits<double>::min())) break;
    prev = cur;
  }
  r.u = std::move(u);
  r.v = std::move(v);
  return r;
}

}  // namespace detail

/// Alternating L2 TUCKER2 from (init.u, init.v); HOSVD start by default.
inline AlternationResult hooi_rank1(const MatrixStack& stack, const AlternationOptions& opts = {},
                                    std::optional<FactorPair> init = std::nullopt) {
  if (stack.empty()) throw DimensionError("hooi_rank1: empty stack");
  FactorPair start = init ? *init : hosvd_rank1(stack);
  detail::check_pair(stack, start.u, start.v);
  return detail::alternate_l2(stack, detail::unit(start.u), detail::unit(start.v), opts, false);
}

/// Power iteration on sum_i X_i X_i' seeded with the first standard basis
/// vector not in its nullspace.
inline Vector glram_initial_left(const MatrixStack& stack, std::size_t max_iters = 1000,
                                 double tol = 1e-13) {
  const auto d = static_cast<Eigen::Index>(stack.rows());
  Matrix g = Matrix::Zero(d, d);
  for (const auto& x : stack) g.noalias() += x * x.transpose();

  Vector u = Vector::Unit(d, 0);
  for (Eigen::Index k = 0; k < d; ++k) {
    if ((g * Vector::Unit(d, k)).norm() > 0.0) {
      u = Vector::Unit(d, k);
      break;
    }
  }
  for (std::size_t it = 0; it < max_iters; ++it) {
    Vector next = g * u;
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double change = (next - u).norm();
    u = std::move(next);
    if (change < tol) break;
  }
  return u * detail::canonical_sign(u);
}

/// Same alternation as HOOI, started from the power-iteration left factor
/// and updating v first.
inline AlternationResult glram_rank1(const MatrixStack& stack,
                                     const AlternationOptions& opts = {}) {
  if (stack.empty()) throw DimensionError("glram_rank1: empty stack");
  const Vector u0 = glram_initial_left(stack);
  const Vector v0 = detail::dominant_left(detail::left_images(stack, u0));
  return detail::alternate_l2(stack, u0, v0, opts, true);
}

/// First principal component (no centering) of [vec(X_1), ..., vec(X_N)].
inline Vector pca_rank1_vectorized(const MatrixStack& stack) {
  if (stack.empty()) throw DimensionError("pca_rank1_vectorized: empty stack");
  return detail::dominant_left(vectorized_stack(stack));
}

struct L1PcaResult {
  Vector u;
  double objective = 0.0;  // ||X b*||_2 = sum_i |u' x_i|
  SignVector b;
  std::uint64_t candidates_evaluated = 0;
};

/// Exact rank-1 L1-PCA of the D x N matrix X: the M = 1 case of the L1
/// TUCKER2 problem, solved by the cheaper exact search.
inline L1PcaResult l1pca_rank1_exact(const Matrix& x, const SolverOptions& opts = {}) {
  if (x.size() == 0) throw DimensionError("l1pca_rank1_exact: empty matrix");
  std::vector<Matrix> cols;
  cols.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.cols(); ++i) cols.emplace_back(x.col(i));
  const Rank1Solution sol = solve_auto(MatrixStack(std::move(cols)), opts);
  return {sol.u, sol.objective, sol.b, sol.candidates_evaluated};
}

struct AltHeuristicOptions {
  std::size_t max_iters = 100;
  double zero_tol = 1e-12;
};

struct AltHeuristicResult {
  Rank1Solution solution;
  std::vector<double> l1_history;  // entry 0 is the objective at the start point
  std::size_t iterations = 0;
  bool converged = false;  // a sign vector repeated before max_iters
};

/// Stand-in L1 heuristic (not TPCA-L1 itself): alternate
///   b <- sgn(u' X_i v),  (u, v) <- dominant pair of sum_i b_i X_i
/// until b repeats. Both half-steps are exact maximizations with the other
/// variable fixed, so the L1 objective never decreases.
inline AltHeuristicResult alt_heuristic(const MatrixStack& stack,
                                        const AltHeuristicOptions& opts = {},
                                        std::optional<FactorPair> init = std::nullopt) {
  if (stack.empty()) throw DimensionError("alt_heuristic: empty stack");
  FactorPair start = init ? *init : hosvd_rank1(stack);
  detail::check_pair(stack, start.u, start.v);
  Vector u = detail::unit(start.u);
  Vector v = detail::unit(start.v);

  AltHeuristicResult r;
  SignVector b = sign_pattern(stack, u, v, opts.zero_tol);
  std::vector<SignVector> seen{b};
  r.l1_history.push_back(objective(stack, u, v));
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    const SingularTriplet t = top_singular_triplet(signed_sum(stack, b));
    u = t.u;
    v = t.v;
    r.l1_history.push_back(objective(stack, u, v));
    ++r.iterations;
    b = sign_pattern(stack, u, v, opts.zero_tol);
    if (std::find(seen.begin(), seen.end(), b) != seen.end()) {
      r.converged = true;
      break;
    }
    seen.push_back(b);
  }

  r.solution.u = u;
  r.solution.v = v;
  r.solution.b = b;
  r.solution.objective = r.l1_history.back();
  r.solution.method = Method::alt_heuristic;
  r.solution.candidates_evaluated = r.iterations;
  return r;
}

/// TUCKER2-type reconstruction: A_i ~ u u' X_i v v' = (u' X_i v) u v'.
inline MatrixStack reconstruct(const MatrixStack& stack, const FactorPair& f) {
  detail::check_pair(stack, f.u, f.v);
  const Vector p = projections(stack, f.u, f.v);
  const Vector u = detail::unit(f.u);
  const Vector v = detail::unit(f.v);
  std::vector<Matrix> out;
  out.reserve(stack.size());
  for (std::size_t i = 0; i < stack.size(); ++i)
    out.emplace_back(p[static_cast<Eigen::Index>(i)] * u * v.transpose());
  return MatrixStack(std::move(out));
}

/// PCA-type reconstruction: A_i ~ mat(q q' vec(X_i)).
inline MatrixStack reconstruct(const MatrixStack& stack, const Vector& q) {
  if (static_cast<std::size_t>(q.size()) != stack.rows() * stack.cols())
    throw DimensionError("reconstruct: q has length " + std::to_string(q.size()) + ", expected " +
                         std::to_string(stack.rows() * stack.cols()));
  const Vector qq = detail::unit(q);
  std::vector<Matrix> out;
  out.reserve(stack.size());
  for (const auto& x : stack)
    out.emplace_back(matricize(Vector(qq * qq.dot(vectorize(x))), stack.rows(), stack.cols()));
  return MatrixStack(std::move(out));
}

}  // namespace l1t2
