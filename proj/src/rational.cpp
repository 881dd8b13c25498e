#include "polyspace/rational.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>

namespace polyspace {

namespace {

using BigInt = boost::multiprecision::cpp_int;

BigInt to_big(Wide v) {
  const bool neg = v < 0;
  UWide mag = neg ? UWide(0) - UWide(v) : UWide(v);
  BigInt out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return neg ? BigInt(-out) : out;
}

}  // namespace

std::string to_string(Wide v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  UWide mag = neg ? UWide(0) - UWide(v) : UWide(v);
  std::string digits;
  while (mag != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  if (neg) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Wide parse_wide(std::string_view text) {
  if (text.empty()) throw FormatError("empty integer");
  std::size_t pos = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) throw FormatError("bad integer '" + std::string(text) + "'");
  UWide mag = 0;
  const UWide limit = UWide(1) << 127;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch < '0' || ch > '9') throw FormatError("bad integer '" + std::string(text) + "'");
    mag = mag * 10 + static_cast<UWide>(ch - '0');
    if (mag > limit) throw FormatError("integer out of range '" + std::string(text) + "'");
  }
  if (!neg && mag == limit) throw FormatError("integer out of range '" + std::string(text) + "'");
  return neg ? Wide(UWide(0) - mag) : Wide(mag);
}

std::strong_ordering compare_fractions(Wide n1, Wide d1, Wide n2, Wide d2) {
  Wide lhs, rhs;
  if (!__builtin_mul_overflow(n1, d2, &lhs) && !__builtin_mul_overflow(n2, d1, &rhs)) {
    return lhs <=> rhs;
  }
  const BigInt bl = to_big(n1) * to_big(d2);
  const BigInt br = to_big(n2) * to_big(d1);
  if (bl < br) return std::strong_ordering::less;
  if (bl > br) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational::Rational(Wide num, Wide den) {
  if (den == 0) throw ContractViolation("rational with zero denominator");
  if (den < 0) {
    num = checked_sub(0, num);
    den = checked_sub(0, den);
  }
  const Wide g = gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::scaled_pow2(int k) const {
  // num and den are coprime, so cancel powers of two from den first.
  Wide n = num_, d = den_;
  while (k > 0 && (d & 1) == 0) {
    d >>= 1;
    --k;
  }
  return Rational(checked_shl(n, k), d);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                  checked_mul(a.den_, b.den_));
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(checked_sub(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                  checked_mul(a.den_, b.den_));
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw ContractViolation("rational division by zero");
  return Rational(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return compare_fractions(a.num_, a.den_, b.num_, b.den_);
}

std::string Rational::str() const {
  if (den_ == 1) return to_string(num_);
  return to_string(num_) + "/" + to_string(den_);
}

}  // namespace polyspace
