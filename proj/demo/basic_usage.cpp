// Solve a small noisy rank-1 stack both ways and compare the results.

#include <iostream>

#include "l1t2/l1t2.hpp"

int main() {
  l1t2::ExperimentConfig config;
  config.D = 3;
  config.M = 2;
  config.N = 12;
  config.corrupt_entries = 2;
  config.corrupt_matrices = 1;
  config.seed = 2024;

  const auto data = l1t2::generate_dataset(config, 0);
  const auto stack = l1t2::corrupt(data.noisy, config, 0, 20.0);

  const auto exhaustive = l1t2::solve_exhaustive(stack);
  const auto polynomial = l1t2::solve_polynomial(stack);

  std::cout << "exhaustive: objective " << exhaustive.objective << " after "
            << exhaustive.candidates_evaluated << " candidates\n"
            << "polynomial: objective " << polynomial.objective << " after "
            << polynomial.candidates_evaluated << " candidates\n"
            << "b = " << exhaustive.b.to_string() << '\n'
            << "certificate "
            << (l1t2::verify_certificate(stack, exhaustive).ok ? "holds" : "FAILED") << '\n';

  const auto rec = l1t2::reconstruct(stack, l1t2::FactorPair{exhaustive.u, exhaustive.v});
  std::cout << "reconstruction error " << l1t2::mse(data.clean, rec) << '\n';
}
