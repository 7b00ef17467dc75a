#pragma once

// Text formats: the slice-stack file and the sweep CSV.
//
// Stack file: a header line "D M N", then N blocks of D lines with M numbers
// each (row-major within a slice). Blank lines between blocks are ignored.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "l1t2/errors.hpp"
#include "l1t2/linalg.hpp"

namespace l1t2 {

inline std::string format_17g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Shortest decimal string that parses back to exactly x.
inline std::string format_shortest(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void write_stack(std::ostream& os, const MatrixStack& stack) {
  os << stack.rows() << ' ' << stack.cols() << ' ' << stack.size() << '\n';
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (i > 0) os << '\n';
    const Matrix& x = stack[i];
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        if (c > 0) os << ' ';
        os << format_17g(x(r, c));
      }
      os << '\n';
    }
  }
}

inline MatrixStack read_stack(std::istream& is) {
  auto next_token = [&is](const char* what) {
    std::string tok;
    if (!(is >> tok)) throw InputError(std::string("stack file: missing ") + what);
    return tok;
  };
  auto parse_dim = [](const std::string& tok) {
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v <= 0)
      throw InputError("stack file: bad dimension '" + tok + "'");
    return static_cast<std::size_t>(v);
  };

  const std::size_t d = parse_dim(next_token("D"));
  const std::size_t m = parse_dim(next_token("M"));
  const std::size_t n = parse_dim(next_token("N"));

  std::vector<Matrix> slices;
  slices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        const std::string tok = next_token("matrix entry");
        char* end = nullptr;
        const double val = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
          throw InputError("stack file: bad number '" + tok + "'");
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = val;
      }
    }
    slices.push_back(std::move(x));
  }
  std::string extra;
  if (is >> extra) throw InputError("stack file: trailing data '" + extra + "'");
  return MatrixStack(std::move(slices));
}

inline void save_stack(const std::string& path, const MatrixStack& stack) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  write_stack(os, stack);
  if (!os) throw InputError("failed writing '" + path + "'");
}

inline MatrixStack load_stack(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open '" + path + "'");
  return read_stack(is);
}

}  // namespace l1t2
