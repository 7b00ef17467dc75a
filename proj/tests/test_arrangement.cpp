#include <gtest/gtest.h>

#include <random>
#include <set>

#include "l1t2/arrangement.hpp"
#include "oracles.hpp"

using namespace l1t2;
using l1t2::testing::random_matrix;
using l1t2::testing::random_orthonormal_rows;

namespace {

// Distinct sgn(W' c) patterns (zero -> +1) over `samples` Gaussian c.
std::set<SignVector> sampled_patterns(const Matrix& w, std::mt19937_64& rng, int samples) {
  std::set<SignVector> out;
  std::normal_distribution<double> z;
  Vector c(w.rows());
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = z(rng);
    out.insert(SignVector::from_signs(Vector(w.transpose() * c)));
  }
  return out;
}

bool contains(const CandidateSet& set, const SignVector& b) {
  return std::binary_search(set.candidates.begin(), set.candidates.end(), b);
}

}  // namespace

TEST(CellCount, ThreeByFourValue) { EXPECT_EQ(cell_count(3, 4), 14u); }

TEST(CellCount, FullRankGivesWholeCube) {
  for (std::uint64_t n = 1; n <= 40; ++n) EXPECT_EQ(cell_count(n, n), std::uint64_t{1} << n);
}

TEST(CellCount, RankOneGivesTwo) {
  for (std::uint64_t n = 1; n <= 50; ++n) EXPECT_EQ(cell_count(1, n), 2u);
}

TEST(CellCount, BoundedByCubeWithEqualityOnlyAtFullRank) {
  for (std::uint64_t n = 1; n <= 30; ++n)
    for (std::uint64_t rho = 1; rho <= n; ++rho) {
      const auto k = cell_count(rho, n);
      EXPECT_LE(k, std::uint64_t{1} << n);
      EXPECT_EQ(k == (std::uint64_t{1} << n), rho == n);
    }
}

TEST(CellCount, RejectsRankAboveN) {
  EXPECT_THROW(cell_count(5, 4), DomainError);
  EXPECT_THROW(cell_count(0, 4), DomainError);
}

TEST(Combinations, LexicographicAndComplete) {
  const auto c = combinations(5, 2);
  ASSERT_EQ(c.size(), 10u);
  EXPECT_EQ(c.front(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(c[1], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(c.back(), (std::vector<std::size_t>{3, 4}));
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_EQ(combinations(4, 0).size(), 1u);
  EXPECT_EQ(combinations(7, 3).size(), binomial(7, 3));
}

TEST(GeneralPosition, PaddedIdentityPasses) {
  Matrix w(2, 3);
  w << 1, 0, 1, 0, 1, 0;
  EXPECT_TRUE(check_general_position(w).ok);
}

TEST(GeneralPosition, ZeroColumnFails) {
  Matrix w(2, 4);
  w << 1, 0, 0, 0.3, 0, 1, 0, 0.7;
  const auto r = check_general_position(w);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.offending, (std::vector<std::size_t>{2}));
}

TEST(GeneralPosition, DuplicatedColumnFails) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix w = random_orthonormal_rows(rng, 3, 6);
    w.col(4) = w.col(1);
    const auto r = check_general_position(w);
    ASSERT_FALSE(r.ok);
    ASSERT_EQ(r.offending.size(), 2u);
    Matrix sub(3, 2);
    sub.col(0) = w.col(static_cast<Eigen::Index>(r.offending[0]));
    sub.col(1) = w.col(static_cast<Eigen::Index>(r.offending[1]));
    EXPECT_LT(l1t2::testing::numeric_rank(sub), 2);
    EXPECT_EQ(r.offending, (std::vector<std::size_t>{1, 4}));
  }
}

TEST(GeneralPosition, RandomRowsPass) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial)
    EXPECT_TRUE(check_general_position(random_orthonormal_rows(rng, 4, 9)).ok);
}

TEST(ExhaustiveSet, SmallCases) {
  const auto one = build_exhaustive_set(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.candidates[0], (SignVector{1}));
  EXPECT_EQ(one.source, CandidateSource::exhaustive_half);

  const auto two = build_exhaustive_set(2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.candidates[0], (SignVector{1, 1}));
  EXPECT_EQ(two.candidates[1], (SignVector{1, -1}));
}

TEST(ExhaustiveSet, SizeOrderAndLeadingEntry) {
  EXPECT_EQ(build_exhaustive_set(14).size(), 8192u);
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto set = build_exhaustive_set(n);
    EXPECT_EQ(set.size(), std::size_t{1} << (n - 1));
    EXPECT_TRUE(std::is_sorted(set.candidates.begin(), set.candidates.end()));
    EXPECT_TRUE(std::adjacent_find(set.candidates.begin(), set.candidates.end()) ==
                set.candidates.end());
    for (const auto& b : set.candidates) EXPECT_EQ(b[0], 1);
  }
}

TEST(ExhaustiveSet, CapacityGuard) {
  EXPECT_THROW(build_exhaustive_set(31), CapacityError);
  EXPECT_THROW(build_exhaustive_set(5, 4), CapacityError);
}

TEST(CandidateSet, RankOneIsSignAndNegation) {
  Matrix w(1, 5);
  w << 0.5, -0.1, 0.3, -0.7, 0.2;
  const auto set = build_candidate_set(w);
  ASSERT_EQ(set.size(), 2u);
  const SignVector s{1, -1, 1, -1, 1};
  EXPECT_TRUE(contains(set, s));
  EXPECT_TRUE(contains(set, s.negated()));
}

TEST(CandidateSet, ThreeByFourArrangementHasFourteenCells) {
  std::mt19937_64 rng(33);
  const Matrix w = random_orthonormal_rows(rng, 3, 4);
  ASSERT_TRUE(check_general_position(w).ok);
  const auto set = build_candidate_set(w);
  const auto seen = sampled_patterns(w, rng, 200'000);
  EXPECT_EQ(seen.size(), 14u);
  for (const auto& b : seen) EXPECT_TRUE(contains(set, b)) << b.to_string();
}

TEST(CandidateSet, FullRankCoversWholeCube) {
  std::mt19937_64 rng(34);
  const Matrix w = random_orthonormal_rows(rng, 3, 3);
  const auto set = build_candidate_set(w);
  const auto seen = sampled_patterns(w, rng, 100'000);
  EXPECT_EQ(seen.size(), 8u);
  for (const auto& b : seen) EXPECT_TRUE(contains(set, b));
  EXPECT_EQ(set.size(), 8u);
}

TEST(CandidateSet, ContainsEverySampledSignatureAndRespectsBound) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 25; ++trial) {
    const auto rho = static_cast<Eigen::Index>(1 + rng() % 4);
    const auto n = rho + static_cast<Eigen::Index>(rng() % 6);
    const Matrix w = random_matrix(rng, rho, n);
    ASSERT_TRUE(check_general_position(w).ok);
    const auto set = build_candidate_set(w);
    EXPECT_LE(set.size(), arrangement_candidate_bound(static_cast<std::uint64_t>(rho),
                                                      static_cast<std::uint64_t>(n)));
    EXPECT_GE(set.size(), cell_count(static_cast<std::uint64_t>(rho), static_cast<std::uint64_t>(n)));
    for (const auto& b : sampled_patterns(w, rng, 20'000))
      EXPECT_TRUE(contains(set, b)) << "rho=" << rho << " N=" << n << " " << b.to_string();
  }
}

TEST(CandidateSet, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(36);
  const Matrix w = random_matrix(rng, 4, 10);
  const auto a = build_candidate_set(w, 1);
  const auto b = build_candidate_set(w, 4);
  const auto c = build_candidate_set(w, 1);
  EXPECT_EQ(a.candidates, b.candidates);
  EXPECT_EQ(a.candidates, c.candidates);
  EXPECT_TRUE(std::is_sorted(a.candidates.begin(), a.candidates.end()));
}

TEST(CandidateSet, DegenerateColumnsRaise) {
  Matrix w(3, 4);
  w << 1, 1, 0, 0.2, 0, 0, 1, 0.5, 0, 0, 0, 0.9;
  EXPECT_THROW(build_candidate_set(w), GeneralPositionError);
}

TEST(SignVectorEncoding, OrderMatchesBytes) {
  const SignVector a{1, 1, -1};
  const SignVector b{1, -1, 1};
  EXPECT_LT(a, b);
  EXPECT_LT(a.encode(), b.encode());
  EXPECT_EQ(b.encode(), (std::vector<std::uint8_t>{0x40}));
  EXPECT_THROW((SignVector{1, 0}), DomainError);
}
