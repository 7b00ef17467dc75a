#pragma once

// Seeded rank-1-plus-noise data, sparse outlier corruption, reconstruction
// error and the corruption-variance sweep over all methods.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "l1t2/baselines.hpp"
#include "l1t2/errors.hpp"
#include "l1t2/io.hpp"
#include "l1t2/linalg.hpp"
#include "l1t2/parallel.hpp"
#include "l1t2/solvers.hpp"

namespace l1t2 {

struct ExperimentConfig {
  std::size_t D = 20;
  std::size_t M = 20;
  std::size_t N = 14;
  double signal_variance = 49.0;
  double noise_variance = 1.0;
  std::size_t corrupt_entries = 30;  // per corrupted slice
  std::size_t corrupt_matrices = 2;
  std::vector<double> corruption_db_list = {6, 8, 10, 12, 14, 16, 18, 20, 22};
  std::size_t realizations = 100;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::exhaustive, Method::hosvd, Method::hooi, Method::glram,
                                 Method::pca,        Method::l1pca, Method::alt_heuristic};
  unsigned threads = 0;
  std::size_t exhaustive_capacity = kDefaultExhaustiveCapacity;
};

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (c.D == 0 || c.M == 0 || c.N == 0) fail("D, M and N must be positive");
  if (!(c.signal_variance >= 0.0) || !std::isfinite(c.signal_variance))
    fail("signal_variance must be finite and >= 0");
  if (!(c.noise_variance >= 0.0) || !std::isfinite(c.noise_variance))
    fail("noise_variance must be finite and >= 0");
  if (c.corrupt_matrices > c.N) fail("corrupt_matrices exceeds N");
  if (c.corrupt_entries > c.D * c.M) fail("corrupt_entries exceeds D*M");
  if (c.realizations == 0) fail("realizations must be >= 1");
  if (c.methods.empty()) fail("no methods selected");
  for (double db : c.corruption_db_list)
    if (std::isnan(db) || db == std::numeric_limits<double>::infinity())
      fail("corruption dB values must be finite or -inf");
}

namespace detail {

enum class Stream : std::uint32_t { data = 1, corruption = 2 };

// Independent generator per (seed, realization, stream).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t realization, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(realization),
                    static_cast<std::uint32_t>(realization >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

inline Vector gaussian_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Vector x(static_cast<Eigen::Index>(n));
  do {
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = z(rng);
  } while (x.norm() == 0.0);
  return x / x.norm();
}

}  // namespace detail

struct Dataset {
  MatrixStack clean;  // A_i = b_i u v'
  MatrixStack noisy;  // X_i = A_i + N_i
  Vector u;
  Vector v;
  Vector weights;  // b_i
};

inline Dataset generate_dataset(const ExperimentConfig& c, std::uint64_t realization) {
  validate(c);
  auto rng = detail::make_rng(c.seed, realization, detail::Stream::data);
  std::normal_distribution<double> z;

  Dataset out;
  out.u = detail::gaussian_unit(c.D, rng);
  out.v = detail::gaussian_unit(c.M, rng);
  out.weights.resize(static_cast<Eigen::Index>(c.N));
  const double signal_sd = std::sqrt(c.signal_variance);
  const double noise_sd = std::sqrt(c.noise_variance);
  for (Eigen::Index i = 0; i < out.weights.size(); ++i) out.weights[i] = signal_sd * z(rng);

  const Matrix outer = out.u * out.v.transpose();
  std::vector<Matrix> clean, noisy;
  clean.reserve(c.N);
  noisy.reserve(c.N);
  for (std::size_t i = 0; i < c.N; ++i) {
    Matrix a = out.weights[static_cast<Eigen::Index>(i)] * outer;
    Matrix x = a;
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] += noise_sd * z(rng);
    clean.push_back(std::move(a));
    noisy.push_back(std::move(x));
  }
  out.clean = MatrixStack(std::move(clean));
  out.noisy = MatrixStack(std::move(noisy));
  return out;
}

/// 10^(dB/10); -inf maps to 0.
inline double db_to_variance(double db) { return std::pow(10.0, db / 10.0); }

/// Adds N(0, sigma_c^2) to `corrupt_entries` distinct entries of each of
/// `corrupt_matrices` distinct slices. Slice and entry choices and the unit
/// Gaussian draws depend only on (seed, realization), so sweeping the dB
/// value rescales the same outliers.
inline MatrixStack corrupt(const MatrixStack& noisy, const ExperimentConfig& c,
                           std::uint64_t realization, double sigma_c_db) {
  if (c.corrupt_entries > noisy.rows() * noisy.cols())
    throw ConfigError("corrupt_entries exceeds D*M");
  if (c.corrupt_matrices > noisy.size()) throw ConfigError("corrupt_matrices exceeds N");
  if (std::isnan(sigma_c_db) || sigma_c_db == std::numeric_limits<double>::infinity())
    throw ConfigError("corruption dB must be finite or -inf");

  auto rng = detail::make_rng(c.seed, realization, detail::Stream::corruption);
  std::normal_distribution<double> z;
  const double sd = std::sqrt(db_to_variance(sigma_c_db));

  std::vector<Matrix> out = noisy.slices();
  std::vector<std::size_t> slice_ids(noisy.size());
  std::iota(slice_ids.begin(), slice_ids.end(), 0);
  std::shuffle(slice_ids.begin(), slice_ids.end(), rng);

  std::vector<std::size_t> entry_ids(noisy.rows() * noisy.cols());
  for (std::size_t s = 0; s < c.corrupt_matrices; ++s) {
    Matrix& x = out[slice_ids[s]];
    std::iota(entry_ids.begin(), entry_ids.end(), 0);
    std::shuffle(entry_ids.begin(), entry_ids.end(), rng);
    for (std::size_t e = 0; e < c.corrupt_entries; ++e) {
      const double draw = z(rng);
      if (sd > 0.0) x.data()[entry_ids[e]] += sd * draw;
    }
  }
  return MatrixStack(std::move(out));
}

/// sum_i ||A_i - B_i||_F^2
inline double mse(const MatrixStack& clean, const MatrixStack& reconstructed) {
  if (clean.size() != reconstructed.size() || clean.rows() != reconstructed.rows() ||
      clean.cols() != reconstructed.cols())
    throw DimensionError("mse: stacks differ in shape");
  double total = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i)
    total += (clean[i] - reconstructed[i]).squaredNorm();
  return total;
}

/// Runs one method on `noisy` and returns its rank-1 reconstruction.
inline MatrixStack reconstruct_with(Method method, const MatrixStack& noisy,
                                    const SolverOptions& opts = {}) {
  switch (method) {
    case Method::exhaustive: {
      const auto s = solve_exhaustive(noisy, opts);
      return reconstruct(noisy, FactorPair{s.u, s.v});
    }
    case Method::polynomial: {
      const auto s = solve_polynomial(noisy, opts);
      return reconstruct(noisy, FactorPair{s.u, s.v});
    }
    case Method::auto_select: {
      const auto s = solve_auto(noisy, opts);
      return reconstruct(noisy, FactorPair{s.u, s.v});
    }
    case Method::hosvd: return reconstruct(noisy, hosvd_rank1(noisy));
    case Method::hooi: {
      const auto r = hooi_rank1(noisy);
      return reconstruct(noisy, FactorPair{r.u, r.v});
    }
    case Method::glram: {
      const auto r = glram_rank1(noisy);
      return reconstruct(noisy, FactorPair{r.u, r.v});
    }
    case Method::pca: return reconstruct(noisy, pca_rank1_vectorized(noisy));
    case Method::l1pca:
      return reconstruct(noisy, l1pca_rank1_exact(vectorized_stack(noisy), opts).u);
    case Method::alt_heuristic: {
      const auto r = alt_heuristic(noisy);
      return reconstruct(noisy, FactorPair{r.solution.u, r.solution.v});
    }
  }
  throw DomainError("unknown method");
}

struct SweepRecord {
  Method method = Method::exhaustive;
  double sigma_c_db = 0.0;
  double mean_mse = 0.0;
  std::size_t realizations = 0;
};

/// Per-realization reconstruction errors, indexed [method][dB][realization].
struct SweepSamples {
  std::vector<Method> methods;
  std::vector<double> db_list;
  std::vector<std::vector<std::vector<double>>> mse;

  const std::vector<double>& at(Method m, std::size_t db_index) const {
    const auto it = std::find(methods.begin(), methods.end(), m);
    if (it == methods.end()) throw DomainError("method not in sweep");
    return mse[static_cast<std::size_t>(it - methods.begin())][db_index];
  }
};

/// Every method sees the same corrupted stack for a given (realization, dB).
/// Realizations run in parallel; each result lands in its own slot.
inline SweepSamples run_sweep_samples(const ExperimentConfig& c) {
  validate(c);
  SweepSamples s;
  s.methods = c.methods;
  s.db_list = c.corruption_db_list;
  s.mse.assign(c.methods.size(),
               std::vector<std::vector<double>>(c.corruption_db_list.size(),
                                                std::vector<double>(c.realizations, 0.0)));
  SolverOptions opts;
  opts.threads = 1;
  opts.exhaustive_capacity = c.exhaustive_capacity;

  parallel_for(c.realizations, c.threads, [&](std::size_t r) {
    const Dataset data = generate_dataset(c, r);
    for (std::size_t d = 0; d < c.corruption_db_list.size(); ++d) {
      const MatrixStack x = corrupt(data.noisy, c, r, c.corruption_db_list[d]);
      for (std::size_t m = 0; m < c.methods.size(); ++m) {
        try {
          s.mse[m][d][r] = mse(data.clean, reconstruct_with(c.methods[m], x, opts));
        } catch (const CapacityError& e) {
          throw CapacityError(std::string(to_string(c.methods[m])) + " (realization " +
                              std::to_string(r) + "): " + e.what());
        }
      }
    }
  });
  return s;
}

/// Mean errors sorted by (method name, dB). Sums run in realization order.
inline std::vector<SweepRecord> summarize(const SweepSamples& s) {
  std::vector<SweepRecord> out;
  for (std::size_t m = 0; m < s.methods.size(); ++m) {
    for (std::size_t d = 0; d < s.db_list.size(); ++d) {
      const auto& v = s.mse[m][d];
      double sum = 0.0;
      for (double x : v) sum += x;
      out.push_back({s.methods[m], s.db_list[d], sum / static_cast<double>(v.size()), v.size()});
    }
  }
  std::sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) {
    const auto ma = to_string(a.method), mb = to_string(b.method);
    if (ma != mb) return ma < mb;
    return a.sigma_c_db < b.sigma_c_db;
  });
  return out;
}

inline std::vector<SweepRecord> run_sweep(const ExperimentConfig& c) {
  return summarize(run_sweep_samples(c));
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "method,sigma_c_db,mean_mse,realizations\n";
  for (const auto& r : records)
    os << to_string(r.method) << ',' << format_shortest(r.sigma_c_db) << ','
       << format_shortest(r.mean_mse) << ',' << r.realizations << '\n';
}

/// gnuplot script plotting every method's curve from the CSV at `csv_path`.
inline void write_gnuplot_script(std::ostream& os, const std::vector<SweepRecord>& records,
                                 const std::string& csv_path) {
  std::vector<std::string> names;
  for (const auto& r : records) {
    std::string n(to_string(r.method));
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }
  os << "set datafile separator ','\n"
     << "set xlabel 'corruption variance (dB)'\n"
     << "set ylabel 'reconstruction MSE'\n"
     << "set logscale y\n"
     << "set key top left\n"
     << "plot ";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) os << ", \\\n     ";
    os << "'" << csv_path << "' using (strcol(1) eq '" << names[i]
       << "' ? $2 : NaN):3 with linespoints title '" << names[i] << "'";
  }
  os << '\n';
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double parse_real(const std::string& key, const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw ConfigError("'" + key + "': not a number: '" + tok + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& tok) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ConfigError("'" + key + "': not a nonnegative integer: '" + tok + "'");
  return v;
}

}  // namespace detail

/// Flat key=value text; '#' starts a comment. Keys mirror ExperimentConfig
/// (D, M, N may also be lowercase); lists are comma- or space-separated.
inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));

    if (key == "D" || key == "d") {
      c.D = detail::parse_unsigned(key, val);
    } else if (key == "M" || key == "m") {
      c.M = detail::parse_unsigned(key, val);
    } else if (key == "N" || key == "n") {
      c.N = detail::parse_unsigned(key, val);
    } else if (key == "signal_variance") {
      c.signal_variance = detail::parse_real(key, val);
    } else if (key == "noise_variance") {
      c.noise_variance = detail::parse_real(key, val);
    } else if (key == "corrupt_entries") {
      c.corrupt_entries = detail::parse_unsigned(key, val);
    } else if (key == "corrupt_matrices") {
      c.corrupt_matrices = detail::parse_unsigned(key, val);
    } else if (key == "corruption_db_list" || key == "corruption_db") {
      c.corruption_db_list.clear();
      for (const auto& tok : detail::split_list(val))
        c.corruption_db_list.push_back(detail::parse_real(key, tok));
    } else if (key == "realizations") {
      c.realizations = detail::parse_unsigned(key, val);
    } else if (key == "seed") {
      c.seed = detail::parse_unsigned(key, val);
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& tok : detail::split_list(val)) {
        const auto m = parse_method(tok);
        if (!m) throw ConfigError("unknown method '" + tok + "'");
        c.methods.push_back(*m);
      }
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(detail::parse_unsigned(key, val));
    } else if (key == "exhaustive_capacity") {
      c.exhaustive_capacity = detail::parse_unsigned(key, val);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

/// One-sided sign test of "a > b" on paired samples; ties are dropped.
/// Returns P(X >= #{a_r > b_r}) for X ~ Binomial(#non-ties, 1/2).
inline double sign_test_greater(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("sign test: unpaired samples");
  std::size_t wins = 0, trials = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++trials;
    if (a[i] > b[i]) ++wins;
  }
  if (trials == 0) return 1.0;
  double p = 0.0;
  for (std::size_t k = wins; k <= trials; ++k) {
    const double log_term = std::lgamma(static_cast<double>(trials) + 1) -
                            std::lgamma(static_cast<double>(k) + 1) -
                            std::lgamma(static_cast<double>(trials - k) + 1) -
                            static_cast<double>(trials) * std::log(2.0);
    p += std::exp(log_term);
  }
  return std::min(1.0, p);
}

}  // namespace l1t2
