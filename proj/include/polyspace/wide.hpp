#pragma once

// 128-bit integer helpers. All coefficient, bound and chord arithmetic in the
// library runs on `Wide`; operations that could leave its range are checked
// and throw ResourceLimitError.

#include <cstdint>
#include <string>
#include <string_view>

#include "polyspace/error.hpp"

namespace polyspace {

__extension__ using Wide = __int128;
__extension__ using UWide = unsigned __int128;

inline Wide checked_mul(Wide a, Wide b) {
  Wide r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceLimitError("128-bit overflow in multiply");
  return r;
}

inline Wide checked_add(Wide a, Wide b) {
  Wide r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceLimitError("128-bit overflow in add");
  return r;
}

inline Wide checked_sub(Wide a, Wide b) {
  Wide r;
  if (__builtin_sub_overflow(a, b, &r)) throw ResourceLimitError("128-bit overflow in subtract");
  return r;
}

/// a * 2^s, checked.
inline Wide checked_shl(Wide a, int s) {
  if (s < 0) throw ContractViolation("negative shift");
  if (a == 0) return 0;
  if (s >= 127) throw ResourceLimitError("128-bit overflow in shift");
  Wide r = a * (Wide(1) << s);
  if ((r >> s) != a) throw ResourceLimitError("128-bit overflow in shift");
  return r;
}

inline Wide wide_abs(Wide a) { return a < 0 ? -a : a; }

/// Round toward -inf. d > 0.
inline Wide floor_div(Wide n, Wide d) {
  Wide q = n / d;
  if ((n % d != 0) && (n < 0)) --q;
  return q;
}

/// Round toward +inf. d > 0.
inline Wide ceil_div(Wide n, Wide d) {
  Wide q = n / d;
  if ((n % d != 0) && (n > 0)) ++q;
  return q;
}

/// Number of bits in the binary representation of a non-negative value;
/// bit_length(0) == 0, i.e. ceil(log2(v + 1)).
inline int bit_length(UWide v) {
  int n = 0;
  while (v != 0) {
    v >>= 1;
    ++n;
  }
  return n;
}

/// Trailing zero count, `cap` for zero.
inline int trailing_zeros(UWide v, int cap) {
  if (v == 0) return cap;
  int n = 0;
  while ((v & 1) == 0) {
    v >>= 1;
    ++n;
  }
  return n;
}

inline Wide gcd(Wide a, Wide b) {
  a = wide_abs(a);
  b = wide_abs(b);
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::string to_string(Wide v);
/// Parses an optionally signed decimal integer; throws FormatError.
Wide parse_wide(std::string_view text);

inline std::int64_t narrow64(Wide v) {
  if (v > INT64_MAX || v < INT64_MIN) throw ResourceLimitError("value exceeds 64 bits");
  return static_cast<std::int64_t>(v);
}

}  // namespace polyspace
