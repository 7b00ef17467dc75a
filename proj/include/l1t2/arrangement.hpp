#pragma once

// Candidate sign-vector sets: the exhaustive half-cube and the signatures of
// the cells cut out of R^rho by the nullspaces of the columns of W.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "l1t2/errors.hpp"
#include "l1t2/linalg.hpp"
#include "l1t2/parallel.hpp"
#include "l1t2/sign_vector.hpp"

namespace l1t2 {

enum class CandidateSource { exhaustive_half, arrangement };

struct CandidateSet {
  std::vector<SignVector> candidates;
  CandidateSource source = CandidateSource::arrangement;

  std::size_t size() const { return candidates.size(); }
};

inline constexpr std::size_t kDefaultExhaustiveCapacity = 30;
inline constexpr double kGeneralPositionTol = 1e-9;

/// C(n, k), throwing CapacityError when it does not fit in 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw CapacityError("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

/// Number of cells of a general-position central arrangement of N
/// hyperplanes in R^rho: 2 * sum_{j < rho} C(N-1, j).
inline std::uint64_t cell_count(std::uint64_t rho, std::uint64_t n) {
  if (rho < 1 || n < 1) throw DomainError("cell_count requires rho >= 1 and N >= 1");
  if (rho > n)
    throw DomainError("cell_count requires rho <= N (rho=" + std::to_string(rho) +
                      ", N=" + std::to_string(n) + ")");
  unsigned __int128 sum = 0;
  for (std::uint64_t j = 0; j < rho; ++j) sum += binomial(n - 1, j);
  sum *= 2;
  if (sum > std::numeric_limits<std::uint64_t>::max())
    throw CapacityError("cell count overflows 64 bits");
  return static_cast<std::uint64_t>(sum);
}

/// Upper bound 2^rho * C(N, rho-1) on the arrangement candidate set,
/// saturating at the 64-bit maximum.
inline std::uint64_t arrangement_candidate_bound(std::uint64_t rho, std::uint64_t n) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (rho == 0) return 0;
  if (rho >= 64) return kMax;
  std::uint64_t c = 0;
  try {
    c = binomial(n, rho - 1);
  } catch (const CapacityError&) {
    return kMax;
  }
  const unsigned __int128 total = static_cast<unsigned __int128>(c) << rho;
  return total > kMax ? kMax : static_cast<std::uint64_t>(total);
}

/// All k-subsets of {0, ..., n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    if (k == 0) break;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

struct GeneralPositionReport {
  bool ok = true;
  std::vector<std::size_t> offending;  // first failing column subset, if any
  double min_singular_value = std::numeric_limits<double>::infinity();
};

/// True iff every (rho-1)-subset of the columns of W has smallest singular
/// value above `tol`.
inline GeneralPositionReport check_general_position(const Matrix& w,
                                                    double tol = kGeneralPositionTol) {
  GeneralPositionReport report;
  const auto rho = static_cast<std::size_t>(w.rows());
  const auto n = static_cast<std::size_t>(w.cols());
  if (rho == 0) {
    report.ok = false;
    return report;
  }
  if (rho - 1 > n) {
    report.ok = false;
    return report;
  }
  if (rho == 1) return report;

  Matrix sub(w.rows(), static_cast<Eigen::Index>(rho - 1));
  for (const auto& subset : combinations(n, rho - 1)) {
    for (std::size_t j = 0; j < subset.size(); ++j)
      sub.col(static_cast<Eigen::Index>(j)) = w.col(static_cast<Eigen::Index>(subset[j]));
    Eigen::JacobiSVD<Matrix> svd(sub);
    const double smin = svd.singularValues()[svd.singularValues().size() - 1];
    report.min_singular_value = std::min(report.min_singular_value, smin);
    if (!(smin > tol)) {
      report.ok = false;
      report.offending = subset;
      return report;
    }
  }
  return report;
}

/// k-th member (0-based) of the exhaustive half-cube {b : b_1 = +1} in
/// lexicographic order, +1 before -1.
inline SignVector exhaustive_candidate(std::size_t n, std::uint64_t k) {
  SignVector b(n);
  for (std::size_t j = 1; j < n; ++j)
    if ((k >> (n - 1 - j)) & 1u) b.set(j, -1);
  return b;
}

inline CandidateSet build_exhaustive_set(std::size_t n,
                                         std::size_t capacity = kDefaultExhaustiveCapacity) {
  if (n == 0) throw DomainError("exhaustive set needs N >= 1");
  if (n > capacity)
    throw CapacityError("exhaustive search over N=" + std::to_string(n) +
                        " exceeds the capacity bound N <= " + std::to_string(capacity));
  CandidateSet set;
  set.source = CandidateSource::exhaustive_half;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  set.candidates.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) set.candidates.push_back(exhaustive_candidate(n, k));
  return set;
}

/// Signatures bounded by every verge of the arrangement of W's column
/// nullspaces. For each (rho-1)-subset I, the verge direction v fixes the
/// entries outside I to sgn(W' v) (zero -> +1) and the entries in I range
/// over all sign combinations; both v and -v are used. The result is
/// deduplicated and sorted lexicographically, independent of `threads`.
inline CandidateSet build_candidate_set(const Matrix& w, unsigned threads = 1) {
  const auto rho = static_cast<std::size_t>(w.rows());
  const auto n = static_cast<std::size_t>(w.cols());
  if (rho == 0 || n == 0) throw DimensionError("build_candidate_set: empty W");
  if (rho > n) throw DimensionError("build_candidate_set: W has more rows than columns");
  if (rho - 1 >= 63) throw CapacityError("build_candidate_set: rho too large");

  const auto subsets = combinations(n, rho - 1);
  const std::uint64_t free_patterns = std::uint64_t{1} << (rho - 1);
  std::vector<std::vector<SignVector>> per_subset(subsets.size());

  parallel_for(subsets.size(), threads, [&](std::size_t s) {
    const auto& subset = subsets[s];
    std::vector<Vector> cols;
    cols.reserve(subset.size());
    for (auto j : subset) cols.emplace_back(w.col(static_cast<Eigen::Index>(j)));
    const Vector verge = orthonormal_complement_vector(cols, rho);
    const Vector proj = w.transpose() * verge;

    auto& out = per_subset[s];
    out.reserve(2 * free_patterns);
    for (double side : {1.0, -1.0}) {
      SignVector base = SignVector::from_signs(Vector(side * proj));
      for (std::uint64_t mask = 0; mask < free_patterns; ++mask) {
        SignVector b = base;
        for (std::size_t j = 0; j < subset.size(); ++j)
          b.set(subset[j], ((mask >> (subset.size() - 1 - j)) & 1u) ? -1 : 1);
        out.push_back(std::move(b));
      }
    }
  });

  CandidateSet set;
  set.source = CandidateSource::arrangement;
  for (auto& group : per_subset)
    for (auto& b : group) set.candidates.push_back(std::move(b));
  std::sort(set.candidates.begin(), set.candidates.end());
  set.candidates.erase(std::unique(set.candidates.begin(), set.candidates.end()),
                       set.candidates.end());
  return set;
}

}  // namespace l1t2
