#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "l1t2/harness.hpp"
#include "oracles.hpp"

using namespace l1t2;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.D = 4;
  c.M = 3;
  c.N = 6;
  c.corrupt_entries = 3;
  c.corrupt_matrices = 2;
  c.corruption_db_list = {6, 22};
  c.realizations = 4;
  c.seed = 99;
  c.threads = 1;
  return c;
}

std::size_t differing_entries(const MatrixStack& a, const MatrixStack& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    n += static_cast<std::size_t>((a[i].array() != b[i].array()).count());
  return n;
}

}  // namespace

TEST(GenerateDataset, NoiselessIsRankOne) {
  ExperimentConfig c = small_config();
  c.noise_variance = 0.0;
  const auto data = generate_dataset(c, 3);
  EXPECT_TRUE(data.noisy == data.clean);
  EXPECT_EQ(thin_svd(vectorized_stack(data.noisy)).rho, 1u);
  EXPECT_NEAR(data.u.norm(), 1.0, 1e-14);
  EXPECT_NEAR(data.v.norm(), 1.0, 1e-14);
}

TEST(GenerateDataset, ZeroSignal) {
  ExperimentConfig c = small_config();
  c.signal_variance = 0.0;
  const auto data = generate_dataset(c, 0);
  for (const auto& a : data.clean) EXPECT_TRUE(a.isZero(0.0));
}

TEST(GenerateDataset, ReproducibleAndDistinctPerRealization) {
  const auto c = small_config();
  EXPECT_TRUE(generate_dataset(c, 5).noisy == generate_dataset(c, 5).noisy);
  EXPECT_FALSE(generate_dataset(c, 5).noisy == generate_dataset(c, 6).noisy);
  ExperimentConfig other = c;
  other.seed = 100;
  EXPECT_FALSE(generate_dataset(c, 5).noisy == generate_dataset(other, 5).noisy);
}

TEST(GenerateDataset, SignalVarianceMatchesConfiguration) {
  ExperimentConfig c;  // D = M = 20, N = 14, signal variance 49
  c.noise_variance = 0.0;
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t r = 0; r < 10'000; ++r) {
    const auto data = generate_dataset(c, r);
    for (Eigen::Index i = 0; i < data.weights.size(); ++i) {
      sum += data.weights[i];
      sq += data.weights[i] * data.weights[i];
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sq / static_cast<double>(count) - mean * mean;
  EXPECT_NEAR(var, 49.0, 0.05 * 49.0);
}

TEST(Corrupt, DefaultsTouchSixtyEntries) {
  ExperimentConfig c;
  const auto data = generate_dataset(c, 0);
  const auto x = corrupt(data.noisy, c, 0, 14.0);
  EXPECT_EQ(differing_entries(x, data.noisy), 60u);
  std::size_t slices = 0;
  for (std::size_t i = 0; i < x.size(); ++i) slices += (x[i] != data.noisy[i]);
  EXPECT_EQ(slices, 2u);
}

TEST(Corrupt, IdentityCases) {
  auto c = small_config();
  const auto data = generate_dataset(c, 1);
  EXPECT_TRUE(corrupt(data.noisy, c, 1, -std::numeric_limits<double>::infinity()) == data.noisy);
  c.corrupt_matrices = 0;
  EXPECT_TRUE(corrupt(data.noisy, c, 1, 22.0) == data.noisy);
}

TEST(Corrupt, DeterministicAndScalesWithDb) {
  const auto c = small_config();
  const auto data = generate_dataset(c, 2);
  const auto a = corrupt(data.noisy, c, 2, 10.0);
  EXPECT_TRUE(a == corrupt(data.noisy, c, 2, 10.0));
  const auto b = corrupt(data.noisy, c, 2, 20.0);
  // Same outlier positions and draws; 10 dB more variance scales them by sqrt(10).
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Matrix da = a[i] - data.noisy[i];
    const Matrix db = b[i] - data.noisy[i];
    EXPECT_LT((db - std::sqrt(10.0) * da).norm(), 1e-10 * (1.0 + db.norm()));
  }
}

TEST(Corrupt, RejectsTooManyEntries) {
  auto c = small_config();
  const auto data = generate_dataset(c, 0);
  c.corrupt_entries = c.D * c.M + 1;
  EXPECT_THROW(corrupt(data.noisy, c, 0, 6.0), ConfigError);
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Mse, Arithmetic) {
  const auto c = small_config();
  const auto data = generate_dataset(c, 0);
  EXPECT_EQ(mse(data.clean, data.clean), 0.0);

  std::vector<Matrix> zeros(data.clean.size(), Matrix::Zero(4, 3));
  double energy = 0.0;
  for (const auto& a : data.clean) energy += a.squaredNorm();
  EXPECT_NEAR(mse(data.clean, MatrixStack(zeros)), energy, 1e-12 * energy);

  EXPECT_DOUBLE_EQ(mse(MatrixStack({Matrix::Constant(1, 1, 2.0)}),
                       MatrixStack({Matrix::Constant(1, 1, 0.5)})),
                   2.25);
  EXPECT_THROW(mse(data.clean, MatrixStack({Matrix::Zero(4, 3)})), DimensionError);
}

TEST(Mse, PermutationEquivariant) {
  std::mt19937_64 rng(81);
  const auto a = l1t2::testing::random_stack(rng, 3, 3, 5);
  const auto b = l1t2::testing::random_stack(rng, 3, 3, 5);
  std::vector<Matrix> pa(a.slices().rbegin(), a.slices().rend());
  std::vector<Matrix> pb(b.slices().rbegin(), b.slices().rend());
  EXPECT_NEAR(mse(a, b), mse(MatrixStack(pa), MatrixStack(pb)), 1e-12 * mse(a, b));
}

TEST(Sweep, SingleRecord) {
  auto c = small_config();
  c.methods = {Method::exhaustive};
  c.realizations = 1;
  c.corruption_db_list = {6};
  const auto records = run_sweep(c);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].method, Method::exhaustive);
  EXPECT_EQ(records[0].sigma_c_db, 6.0);
  EXPECT_GE(records[0].mean_mse, 0.0);
  EXPECT_EQ(records[0].realizations, 1u);
}

TEST(Sweep, NoiselessRecoveryIsExact) {
  auto c = small_config();
  c.noise_variance = 0.0;
  c.corrupt_matrices = 0;
  c.methods = {Method::exhaustive, Method::polynomial, Method::hosvd, Method::hooi,
               Method::glram,      Method::pca,        Method::l1pca, Method::alt_heuristic};
  for (const auto& r : run_sweep(c)) EXPECT_LT(r.mean_mse, 1e-18) << to_string(r.method);
}

TEST(Sweep, CsvIsReproducibleAndSorted) {
  auto c = small_config();
  c.methods = {Method::pca, Method::exhaustive, Method::hosvd};
  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(c));
  c.threads = 3;
  write_sweep_csv(b, run_sweep(c));
  EXPECT_EQ(a.str(), b.str());

  std::istringstream lines(a.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "method,sigma_c_db,mean_mse,realizations");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].rfind("exhaustive,6,", 0), 0u);
  EXPECT_EQ(rows[1].rfind("exhaustive,22,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("hosvd,6,", 0), 0u);
  EXPECT_EQ(rows[5].rfind("pca,22,", 0), 0u);
}

TEST(Sweep, CapacityErrorsCarryContext) {
  auto c = small_config();
  c.methods = {Method::exhaustive};
  c.exhaustive_capacity = 3;
  try {
    run_sweep(c);
    FAIL() << "expected a capacity error";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("exhaustive"), std::string::npos);
  }
}

TEST(Config, ParsesKeyValueText) {
  std::istringstream is(
      "# desk-scale sweep\n"
      "D = 5\n"
      "M=4\n"
      "N=7\n"
      "signal_variance=25\n"
      "noise_variance=0.5\n"
      "corrupt_entries=2\n"
      "corrupt_matrices=1\n"
      "corruption_db_list=6, 14,22\n"
      "realizations=3\n"
      "seed=42\n"
      "methods=exhaustive,pca,alt\n");
  const auto c = parse_config(is);
  EXPECT_EQ(c.D, 5u);
  EXPECT_EQ(c.M, 4u);
  EXPECT_EQ(c.N, 7u);
  EXPECT_EQ(c.signal_variance, 25.0);
  EXPECT_EQ(c.noise_variance, 0.5);
  EXPECT_EQ(c.corruption_db_list, (std::vector<double>{6, 14, 22}));
  EXPECT_EQ(c.realizations, 3u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::exhaustive, Method::pca, Method::alt_heuristic}));
}

TEST(Config, RejectsBadInput) {
  std::istringstream unknown("colour=blue\n");
  EXPECT_THROW(parse_config(unknown), ConfigError);
  std::istringstream method("methods=magic\n");
  EXPECT_THROW(parse_config(method), ConfigError);
  std::istringstream number("D=abc\n");
  EXPECT_THROW(parse_config(number), ConfigError);
  std::istringstream invariant("N=3\ncorrupt_matrices=4\n");
  EXPECT_THROW(parse_config(invariant), ConfigError);
  std::istringstream zero("realizations=0\n");
  EXPECT_THROW(parse_config(zero), ConfigError);
}

TEST(SignTest, KnownValues) {
  EXPECT_NEAR(sign_test_greater({2, 2, 2, 2, 2}, {1, 1, 1, 1, 1}), 1.0 / 32.0, 1e-15);
  EXPECT_NEAR(sign_test_greater({2, 0}, {1, 1}), 0.75, 1e-15);
  EXPECT_EQ(sign_test_greater({1, 1}, {1, 1}), 1.0);
}
