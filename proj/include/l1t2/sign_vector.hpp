#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "l1t2/errors.hpp"

namespace l1t2 {

/// Antipodal binary vector b in {+1, -1}^N.
///
/// Ordering is lexicographic with +1 ranked before -1, which is also the
/// order of the canonical bit encoding (+1 -> 0, -1 -> 1, first entry most
/// significant).
class SignVector {
public:
  SignVector() = default;

  explicit SignVector(std::size_t n, std::int8_t fill = 1) : entries_(n, fill) {
    check(fill);
  }

  SignVector(std::initializer_list<int> values) {
    entries_.reserve(values.size());
    for (int v : values) {
      check(v);
      entries_.push_back(static_cast<std::int8_t>(v));
    }
  }

  explicit SignVector(std::vector<std::int8_t> values) : entries_(std::move(values)) {
    for (auto v : entries_) check(v);
  }

  /// sgn(x_i), mapping |x_i| <= zero_tol to +1.
  template <typename Vec>
  static SignVector from_signs(const Vec& x, double zero_tol = 0.0) {
    SignVector b(static_cast<std::size_t>(x.size()));
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double xi = x[static_cast<decltype(x.size())>(i)];
      b.entries_[i] = (xi < 0.0 && -xi > zero_tol) ? std::int8_t{-1} : std::int8_t{1};
    }
    return b;
  }

  std::size_t size() const { return entries_.size(); }
  std::int8_t operator[](std::size_t i) const { return entries_[i]; }
  void set(std::size_t i, std::int8_t v) {
    check(v);
    entries_[i] = v;
  }
  std::span<const std::int8_t> span() const { return entries_; }
  const std::vector<std::int8_t>& entries() const { return entries_; }

  SignVector negated() const {
    SignVector out(*this);
    for (auto& e : out.entries_) e = static_cast<std::int8_t>(-e);
    return out;
  }

  /// Canonical byte encoding, one bit per entry, first entry in the MSB of
  /// byte 0.
  std::vector<std::uint8_t> encode() const {
    std::vector<std::uint8_t> bytes((entries_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i] < 0) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return bytes;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(entries_.size());
    for (auto e : entries_) s.push_back(e > 0 ? '+' : '-');
    return s;
  }

  friend bool operator==(const SignVector&, const SignVector&) = default;

  friend std::strong_ordering operator<=>(const SignVector& a, const SignVector& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (a.entries_[i] != b.entries_[i])
        return a.entries_[i] > b.entries_[i] ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
    return a.size() <=> b.size();
  }

  bool equal_up_to_negation(const SignVector& other) const {
    return *this == other || *this == other.negated();
  }

private:
  static void check(int v) {
    if (v != 1 && v != -1) throw DomainError("sign vector entries must be +1 or -1");
  }

  std::vector<std::int8_t> entries_;
};

}  // namespace l1t2
