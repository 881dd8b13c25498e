#pragma once

#include <compare>
#include <string>

#include "polyspace/wide.hpp"

namespace polyspace {

/// Exact rational number in canonical form (den > 0, gcd(num, den) == 1).
///
/// Comparisons never lose precision: they cross-multiply in 128 bits and
/// promote to an unbounded integer when the products would overflow.
class Rational {
 public:
  Rational() = default;
  Rational(Wide integer) : num_(integer), den_(1) {}  // NOLINT(implicit)
  Rational(Wide num, Wide den);

  Wide num() const { return num_; }
  Wide den() const { return den_; }

  /// Largest integer <= value.
  Wide floor() const { return floor_div(num_, den_); }
  /// Smallest integer >= value.
  Wide ceil() const { return ceil_div(num_, den_); }
  /// Smallest integer z with z > value.
  Wide next_int_above() const { return floor() + 1; }
  /// Largest integer z with z < value.
  Wide next_int_below() const { return ceil() - 1; }

  Rational scaled_pow2(int k) const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  std::string str() const;

 private:
  Wide num_ = 0;
  Wide den_ = 1;
};

/// Three-way comparison of n1/d1 against n2/d2 (d1, d2 > 0), exact for any
/// 128-bit inputs.
std::strong_ordering compare_fractions(Wide n1, Wide d1, Wide n2, Wide d2);

}  // namespace polyspace
