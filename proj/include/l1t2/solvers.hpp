#pragma once

// Exact rank-1 L1-TUCKER2:
//
//   maximize  sum_i |u' X_i v|  over unit u, v
//
// equals max over b in {+1,-1}^N of sigma_max(sum_i b_i X_i); the optimal
// (u, v) is the dominant singular pair of the optimal signed sum and the
// optimal b is sgn(u' X_i v). The solvers below search b either over the
// whole half-cube or over the arrangement candidate set built from the row
// space of [vec(X_1), ..., vec(X_N)].

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l1t2/arrangement.hpp"
#include "l1t2/errors.hpp"
#include "l1t2/linalg.hpp"
#include "l1t2/parallel.hpp"
#include "l1t2/sign_vector.hpp"

namespace l1t2 {

enum class Method { exhaustive, polynomial, auto_select, hosvd, hooi, glram, pca, l1pca, alt_heuristic };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::exhaustive: return "exhaustive";
    case Method::polynomial: return "polynomial";
    case Method::auto_select: return "auto";
    case Method::hosvd: return "hosvd";
    case Method::hooi: return "hooi";
    case Method::glram: return "glram";
    case Method::pca: return "pca";
    case Method::l1pca: return "l1pca";
    case Method::alt_heuristic: return "alt";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (auto m : {Method::exhaustive, Method::polynomial, Method::auto_select, Method::hosvd,
                 Method::hooi, Method::glram, Method::pca, Method::l1pca, Method::alt_heuristic})
    if (s == to_string(m)) return m;
  if (s == "alt-heuristic") return Method::alt_heuristic;
  return std::nullopt;
}

struct SolverOptions {
  std::size_t exhaustive_capacity = kDefaultExhaustiveCapacity;
  unsigned threads = 0;  // 0: hardware concurrency
  double tie_tol = 1e-12;
  double zero_tol = 1e-12;
  double general_position_tol = kGeneralPositionTol;
  double rank_tol = 1e-10;
};

struct Rank1Solution {
  Vector u;
  Vector v;
  SignVector b;
  double objective = 0.0;
  Method method = Method::exhaustive;
  std::uint64_t candidates_evaluated = 0;
  bool fallback_exhaustive = false;  // polynomial search fell back on degenerate W
};

namespace detail {

inline void check_pair(const MatrixStack& stack, const Vector& u, const Vector& v) {
  if (static_cast<std::size_t>(u.size()) != stack.rows() ||
      static_cast<std::size_t>(v.size()) != stack.cols())
    throw DimensionError("(u, v) of lengths " + std::to_string(u.size()) + ", " +
                         std::to_string(v.size()) + " do not match " +
                         std::to_string(stack.rows()) + "x" + std::to_string(stack.cols()) +
                         " slices");
}

inline Vector unit(const Vector& x) {
  const double n = x.norm();
  if (n == 0.0) throw DomainError("cannot normalize a zero vector");
  return std::abs(n - 1.0) <= 1e-9 ? x : Vector(x / n);
}

}  // namespace detail

/// [u' X_1 v, ..., u' X_N v] with u and v normalized if needed.
inline Vector projections(const MatrixStack& stack, const Vector& u, const Vector& v) {
  detail::check_pair(stack, u, v);
  const Vector uu = detail::unit(u);
  const Vector vv = detail::unit(v);
  Vector p(static_cast<Eigen::Index>(stack.size()));
  for (std::size_t i = 0; i < stack.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = uu.dot(stack[i] * vv);
  return p;
}

/// sum_i |u' X_i v|.
inline double objective(const MatrixStack& stack, const Vector& u, const Vector& v) {
  return projections(stack, u, v).cwiseAbs().sum();
}

/// sgn(u' X_i v), with |u' X_i v| <= zero_tol mapped to +1.
inline SignVector sign_pattern(const MatrixStack& stack, const Vector& u, const Vector& v,
                               double zero_tol = 1e-12) {
  return SignVector::from_signs(projections(stack, u, v), zero_tol);
}

inline Matrix signed_sum(const MatrixStack& stack, const SignVector& b) {
  return signed_sum(stack, b.span());
}

namespace detail {

/// Scores candidates 0..count-1 by sigma_max of their signed sum and keeps
/// the best. A candidate replaces the incumbent when it is larger by more
/// than tie_tol, or within tie_tol and lexicographically earlier. Scores are
/// pure functions of the candidate and the reduction is sequential in
/// candidate order, so the result does not depend on the thread count.
template <typename CandidateAt>
Rank1Solution search_candidates(const MatrixStack& stack, std::uint64_t count,
                                CandidateAt&& candidate_at, Method method,
                                const SolverOptions& opts) {
  constexpr std::uint64_t kBlock = std::uint64_t{1} << 14;
  std::vector<double> scores;
  std::optional<SignVector> best;
  double best_score = -std::numeric_limits<double>::infinity();

  for (std::uint64_t start = 0; start < count; start += kBlock) {
    const std::uint64_t len = std::min(kBlock, count - start);
    scores.assign(len, 0.0);
    parallel_for(len, opts.threads, [&](std::size_t k) {
      const SignVector b = candidate_at(start + k);
      scores[k] = spectral_norm(signed_sum(stack, b));
    });
    for (std::uint64_t k = 0; k < len; ++k) {
      const double s = scores[k];
      if (!best || s > best_score + opts.tie_tol) {
        best = candidate_at(start + k);
        best_score = s;
      } else if (std::abs(s - best_score) <= opts.tie_tol) {
        SignVector b = candidate_at(start + k);
        if (b < *best) {
          best = std::move(b);
          best_score = std::max(best_score, s);
        }
      }
    }
  }
  if (!best) throw DomainError("empty candidate set");

  const SingularTriplet t = top_singular_triplet(signed_sum(stack, *best));
  Rank1Solution sol;
  sol.u = t.u;
  sol.v = t.v;
  sol.b = sign_pattern(stack, t.u, t.v, opts.zero_tol);
  sol.objective = best_score;
  sol.method = method;
  sol.candidates_evaluated = count;
  return sol;
}

inline std::uint64_t exhaustive_count(std::size_t n) {
  return n >= 65 ? std::numeric_limits<std::uint64_t>::max() : std::uint64_t{1} << (n - 1);
}

}  // namespace detail

/// Exact solver over the 2^(N-1) sign vectors with b_1 = +1.
inline Rank1Solution solve_exhaustive(const MatrixStack& stack, const SolverOptions& opts = {}) {
  if (stack.empty()) throw DimensionError("solve_exhaustive: empty stack");
  const std::size_t n = stack.size();
  if (n > opts.exhaustive_capacity)
    throw CapacityError("exhaustive search over N=" + std::to_string(n) +
                        " exceeds the capacity bound N <= " +
                        std::to_string(opts.exhaustive_capacity));
  return detail::search_candidates(
      stack, detail::exhaustive_count(n),
      [n](std::uint64_t k) { return exhaustive_candidate(n, k); }, Method::exhaustive, opts);
}

namespace detail {

inline Rank1Solution solve_polynomial_from(const MatrixStack& stack, const ThinSvd& svd,
                                           const SolverOptions& opts) {
  if (svd.rho == 0) {
    // All-zero stack: every b attains sigma = 0.
    const SignVector ones(stack.size());
    return search_candidates(
        stack, 1, [&](std::uint64_t) { return ones; }, Method::polynomial, opts);
  }
  if (!check_general_position(svd.W, opts.general_position_tol).ok) {
    Rank1Solution sol = solve_exhaustive(stack, opts);
    sol.method = Method::polynomial;
    sol.fallback_exhaustive = true;
    return sol;
  }
  const CandidateSet set = build_candidate_set(svd.W, opts.threads);
  return search_candidates(
      stack, set.size(), [&](std::uint64_t k) { return set.candidates[k]; }, Method::polynomial,
      opts);
}

}  // namespace detail

/// Exact solver over the arrangement candidate set, polynomial in N for a
/// fixed rank of [vec(X_1), ..., vec(X_N)]. Falls back to the exhaustive
/// search (flagged) when the row space is not in general position.
inline Rank1Solution solve_polynomial(const MatrixStack& stack, const SolverOptions& opts = {}) {
  if (stack.empty()) throw DimensionError("solve_polynomial: empty stack");
  return detail::solve_polynomial_from(stack, thin_svd(vectorized_stack(stack), opts.rank_tol),
                                       opts);
}

struct AutoPlan {
  Method chosen = Method::exhaustive;
  std::size_t rho = 0;
  bool rank_computed = false;
  std::uint64_t exhaustive_candidates = 0;
  std::uint64_t arrangement_bound = 0;
};

/// Picks the solver with the smaller candidate count. The rank comes from a
/// thin SVD when D*M*N is small enough, otherwise min(D*M, N) is assumed.
inline AutoPlan plan_auto(const MatrixStack& stack, const SolverOptions& opts = {},
                          std::optional<ThinSvd>* svd_out = nullptr) {
  if (stack.empty()) throw DimensionError("solve_auto: empty stack");
  constexpr std::size_t kRankProbeLimit = 1'000'000;
  AutoPlan plan;
  const std::size_t dm = stack.rows() * stack.cols();
  const std::size_t n = stack.size();
  if (dm * n <= kRankProbeLimit) {
    ThinSvd svd = thin_svd(vectorized_stack(stack), opts.rank_tol);
    plan.rho = svd.rho;
    plan.rank_computed = true;
    if (svd_out) *svd_out = std::move(svd);
  } else {
    plan.rho = std::min(dm, n);
  }
  plan.exhaustive_candidates = detail::exhaustive_count(n);
  plan.arrangement_bound = plan.rho == 0 ? 1 : arrangement_candidate_bound(plan.rho, n);
  plan.chosen = plan.arrangement_bound < plan.exhaustive_candidates ? Method::polynomial
                                                                    : Method::exhaustive;
  return plan;
}

/// Dispatches to the cheaper exact solver; the result is that solver's.
inline Rank1Solution solve_auto(const MatrixStack& stack, const SolverOptions& opts = {}) {
  std::optional<ThinSvd> svd;
  const AutoPlan plan = plan_auto(stack, opts, &svd);
  if (plan.chosen == Method::exhaustive) return solve_exhaustive(stack, opts);
  if (svd) return detail::solve_polynomial_from(stack, *svd, opts);
  return solve_polynomial(stack, opts);
}

struct CertificateReport {
  bool ok = false;
  double objective_residual = 0.0;  // objective vs sum_i |u' X_i v|
  double bilinear_residual = 0.0;   // objective vs u' (sum_i b_i X_i) v
  double spectral_residual = 0.0;   // objective vs sigma_max(sum_i b_i X_i)
  std::size_t sign_mismatches = 0;  // entries where b != sgn(u' X_i v)
};

/// Checks the optimality identities
///   sum_i |u' X_i v| = u' (sum_i b_i X_i) v = sigma_max(sum_i b_i X_i)
/// together with b = sgn(u' X_i v). Residuals are relative to the objective.
inline CertificateReport verify_certificate(const MatrixStack& stack, const Rank1Solution& sol,
                                            double tol = 1e-8) {
  detail::check_pair(stack, sol.u, sol.v);
  if (sol.b.size() != stack.size()) throw DimensionError("certificate: b has wrong length");
  const double scale = std::max(std::abs(sol.objective), std::numeric_limits<double>::min());
  auto rel = [&](double x) { return std::abs(sol.objective - x) / scale; };

  const Matrix sum = signed_sum(stack, sol.b);
  const Vector u = detail::unit(sol.u);
  const Vector v = detail::unit(sol.v);

  CertificateReport r;
  r.objective_residual = rel(objective(stack, u, v));
  r.bilinear_residual = rel(u.dot(sum * v));
  r.spectral_residual = rel(spectral_norm(sum));
  const SignVector expected = sign_pattern(stack, u, v);
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (expected[i] != sol.b[i]) ++r.sign_mismatches;
  if (sol.objective == 0.0) {
    r.objective_residual = std::abs(objective(stack, u, v));
    r.bilinear_residual = std::abs(u.dot(sum * v));
    r.spectral_residual = spectral_norm(sum);
  }
  r.ok = r.objective_residual < tol && r.bilinear_residual < tol && r.spectral_residual < tol &&
         r.sign_mismatches == 0;
  return r;
}

}  // namespace l1t2
