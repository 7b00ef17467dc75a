// l1t2: exact rank-1 L1-TUCKER2 from the command line.
//
//   l1t2 solve   --input stack.l1t2 --method exhaustive [--json]
//   l1t2 gen     --d 20 --m 20 --n 14 --signal-var 49 --noise-var 1 --seed 7 --out x.l1t2
//   l1t2 corrupt --input x.l1t2 --entries 30 --matrices 2 --db 22 --seed 7 --out y.l1t2
//   l1t2 sweep   --config sweep.cfg --out sweep.csv
//   l1t2 verify  --trials 50 --seed 1
//
// Exit codes: 0 success, 1 validation/config error, 2 capacity error,
// 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "l1t2/l1t2.hpp"

namespace {

using namespace l1t2;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCapacity = 2;
constexpr int kExitVerifyFailed = 3;

std::vector<double> to_std(const Vector& x) { return {x.data(), x.data() + x.size()}; }

struct SolveReport {
  Rank1Solution solution;
  bool vectorized = false;  // u holds a length-DM principal direction; v unused
  std::optional<CertificateReport> certificate;
  double seconds = 0.0;
};

SolveReport run_solve(const MatrixStack& stack, Method method, const SolverOptions& opts) {
  SolveReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  auto from_pair = [&](const Vector& u, const Vector& v) {
    Rank1Solution s;
    s.u = u;
    s.v = v;
    s.b = sign_pattern(stack, u, v);
    s.objective = objective(stack, u, v);
    s.method = method;
    return s;
  };
  switch (method) {
    case Method::exhaustive: rep.solution = solve_exhaustive(stack, opts); break;
    case Method::polynomial: rep.solution = solve_polynomial(stack, opts); break;
    case Method::auto_select: rep.solution = solve_auto(stack, opts); break;
    case Method::hosvd: {
      const auto f = hosvd_rank1(stack);
      rep.solution = from_pair(f.u, f.v);
      break;
    }
    case Method::hooi: {
      const auto r = hooi_rank1(stack);
      rep.solution = from_pair(r.u, r.v);
      rep.solution.candidates_evaluated = r.iterations;
      break;
    }
    case Method::glram: {
      const auto r = glram_rank1(stack);
      rep.solution = from_pair(r.u, r.v);
      rep.solution.candidates_evaluated = r.iterations;
      break;
    }
    case Method::alt_heuristic: rep.solution = alt_heuristic(stack).solution; break;
    case Method::pca:
    case Method::l1pca: {
      const Matrix y = vectorized_stack(stack);
      Vector q;
      if (method == Method::pca) {
        q = pca_rank1_vectorized(stack);
      } else {
        const auto r = l1pca_rank1_exact(y, opts);
        q = r.u;
        rep.solution.candidates_evaluated = r.candidates_evaluated;
      }
      const Vector proj = y.transpose() * q;
      rep.solution.u = q;
      rep.solution.v = Vector::Ones(1);
      rep.solution.b = SignVector::from_signs(proj, opts.zero_tol);
      rep.solution.objective = proj.cwiseAbs().sum();
      rep.solution.method = method;
      rep.vectorized = true;
      break;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!rep.vectorized) rep.certificate = verify_certificate(stack, rep.solution);
  return rep;
}

void print_solve(const SolveReport& rep, bool as_json) {
  const auto& s = rep.solution;
  if (as_json) {
    json j;
    j["method"] = std::string(to_string(s.method));
    j["objective"] = s.objective;
    j["b"] = std::vector<int>(s.b.entries().begin(), s.b.entries().end());
    if (rep.vectorized) {
      j["q"] = to_std(s.u);
    } else {
      j["u"] = to_std(s.u);
      j["v"] = to_std(s.v);
    }
    j["candidates_evaluated"] = s.candidates_evaluated;
    j["fallback_exhaustive"] = s.fallback_exhaustive;
    j["seconds"] = rep.seconds;
    if (rep.certificate) {
      const auto& c = *rep.certificate;
      j["certificate"] = {{"ok", c.ok},
                          {"objective_residual", c.objective_residual},
                          {"bilinear_residual", c.bilinear_residual},
                          {"spectral_residual", c.spectral_residual},
                          {"sign_mismatches", c.sign_mismatches}};
    }
    std::cout << j.dump(2) << '\n';
    return;
  }
  auto vec = [](const Vector& x) {
    std::string out;
    for (Eigen::Index k = 0; k < x.size(); ++k) out += (k ? " " : "") + format_17g(x[k]);
    return out;
  };
  std::cout << "method: " << to_string(s.method)
            << (s.fallback_exhaustive ? " (fell back to exhaustive)" : "") << '\n'
            << "objective: " << format_17g(s.objective) << '\n'
            << "b: " << s.b.to_string() << '\n';
  if (rep.vectorized) {
    std::cout << "q: " << vec(s.u) << '\n';
  } else {
    std::cout << "u: " << vec(s.u) << '\n' << "v: " << vec(s.v) << '\n';
  }
  std::cout << "candidates_evaluated: " << s.candidates_evaluated << '\n';
  if (rep.certificate) {
    const auto& c = *rep.certificate;
    std::cout << "certificate: " << (c.ok ? "ok" : "not satisfied")
              << " objective_residual=" << c.objective_residual
              << " bilinear_residual=" << c.bilinear_residual
              << " spectral_residual=" << c.spectral_residual
              << " sign_mismatches=" << c.sign_mismatches << '\n';
  }
}

// Brute force over all 2^N sign vectors using a different SVD routine.
double brute_force_objective(const MatrixStack& stack) {
  double best = 0.0;
  const std::size_t n = stack.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(stack.rows()),
                              static_cast<Eigen::Index>(stack.cols()));
    for (std::size_t i = 0; i < n; ++i) sum += (((mask >> i) & 1u) ? -1.0 : 1.0) * stack[i];
    Eigen::BDCSVD<Matrix> svd(sum);
    best = std::max(best, svd.singularValues()[0]);
  }
  return best;
}

int run_verify(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = 1 + rng() % 3, m = 1 + rng() % 3, n = 2 + rng() % 7;
    std::vector<Matrix> slices;
    for (std::size_t i = 0; i < n; ++i) {
      Matrix x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
      for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = z(rng);
      slices.push_back(std::move(x));
    }
    const MatrixStack stack(std::move(slices));
    const auto ex = solve_exhaustive(stack);
    const auto pol = solve_polynomial(stack);
    const double brute = brute_force_objective(stack);
    const double scale = std::max(brute, 1e-300);

    std::vector<std::string> problems;
    if (std::abs(ex.objective - brute) > 1e-9 * scale) problems.push_back("exhaustive != brute force");
    if (std::abs(pol.objective - ex.objective) > 1e-9 * scale)
      problems.push_back("polynomial != exhaustive");
    if (!pol.b.equal_up_to_negation(ex.b)) problems.push_back("sign vectors differ");
    if (!verify_certificate(stack, ex).ok) problems.push_back("exhaustive certificate");
    if (!verify_certificate(stack, pol).ok) problems.push_back("polynomial certificate");

    std::cout << "trial " << t << " D=" << d << " M=" << m << " N=" << n
              << " objective=" << format_17g(ex.objective);
    if (problems.empty()) {
      std::cout << " ok\n";
    } else {
      ++failures;
      std::cout << " FAIL:";
      for (const auto& p : problems) std::cout << ' ' << p << ';';
      std::cout << '\n';
    }
  }
  std::cout << (trials - failures) << "/" << trials << " trials passed\n";
  return failures == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact rank-1 L1-norm TUCKER2 decomposition"};
  app.require_subcommand(1);

  std::string input, output, method_name = "auto", config_path, gnuplot_path;
  bool as_json = false, full = false;
  unsigned threads = 0;
  std::size_t d = 20, m = 20, n = 14, entries = 30, matrices = 2, trials = 20;
  double signal_var = 49.0, noise_var = 1.0, db = 6.0;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "Solve a stack file");
  solve->add_option("--input", input, "Stack file")->required();
  solve->add_option("--method", method_name,
                    "exhaustive|polynomial|auto|hosvd|hooi|glram|pca|l1pca|alt");
  solve->add_flag("--json", as_json, "Print JSON");
  solve->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* gen = app.add_subcommand("gen", "Generate a rank-1-plus-noise stack");
  gen->add_option("--d", d)->required();
  gen->add_option("--m", m)->required();
  gen->add_option("--n", n)->required();
  gen->add_option("--signal-var", signal_var)->required();
  gen->add_option("--noise-var", noise_var)->required();
  gen->add_option("--seed", seed)->required();
  gen->add_option("--out", output, "Noisy stack; the clean stack goes to <out>.clean")->required();

  auto* corr = app.add_subcommand("corrupt", "Add sparse Gaussian outliers to a stack");
  corr->add_option("--input", input)->required();
  corr->add_option("--entries", entries, "Entries per corrupted slice")->required();
  corr->add_option("--matrices", matrices, "Number of corrupted slices")->required();
  corr->add_option("--db", db, "Outlier variance in dB")->required();
  corr->add_option("--seed", seed)->required();
  corr->add_option("--out", output)->required();

  auto* sweep = app.add_subcommand("sweep", "Reconstruction MSE versus outlier variance");
  sweep->add_option("--config", config_path, "key=value config file")->required();
  sweep->add_option("--out", output, "CSV output")->required();
  sweep->add_option("--gnuplot", gnuplot_path, "Also write a gnuplot script");
  sweep->add_flag("--full", full, "Use 1000 realizations");

  auto* verify = app.add_subcommand("verify", "Cross-check the exact solvers on random stacks");
  verify->add_option("--trials", trials);
  verify->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*solve) {
      const auto method = parse_method(method_name);
      if (!method) throw ConfigError("unknown method '" + method_name + "'");
      SolverOptions opts;
      opts.threads = threads;
      print_solve(run_solve(load_stack(input), *method, opts), as_json);
    } else if (*gen) {
      ExperimentConfig c;
      c.D = d;
      c.M = m;
      c.N = n;
      c.signal_variance = signal_var;
      c.noise_variance = noise_var;
      c.seed = seed;
      c.corrupt_entries = 0;
      c.corrupt_matrices = 0;
      const Dataset data = generate_dataset(c, 0);
      save_stack(output, data.noisy);
      save_stack(output + ".clean", data.clean);
    } else if (*corr) {
      const MatrixStack x = load_stack(input);
      ExperimentConfig c;
      c.D = x.rows();
      c.M = x.cols();
      c.N = x.size();
      c.corrupt_entries = entries;
      c.corrupt_matrices = matrices;
      c.seed = seed;
      validate(c);
      save_stack(output, corrupt(x, c, 0, db));
    } else if (*sweep) {
      std::ifstream cfg(config_path);
      if (!cfg) throw ConfigError("cannot open config '" + config_path + "'");
      ExperimentConfig c = parse_config(cfg);
      if (full) c.realizations = 1000;
      const auto records = run_sweep(c);
      std::ofstream csv(output);
      if (!csv) throw InputError("cannot open '" + output + "' for writing");
      write_sweep_csv(csv, records);
      if (!gnuplot_path.empty()) {
        std::ofstream gp(gnuplot_path);
        if (!gp) throw InputError("cannot open '" + gnuplot_path + "' for writing");
        write_gnuplot_script(gp, records, output);
      }
    } else if (*verify) {
      return run_verify(trials, seed);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
