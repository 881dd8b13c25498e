#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "polyspace/error.hpp"
#include "polyspace/rational.hpp"

using namespace polyspace;

TEST_CASE("canonical form") {
  Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(Rational(0, 5) == Rational(0));
  CHECK_THROWS_AS(Rational(1, 0), ContractViolation);
}

TEST_CASE("floor, ceil and strict integerization") {
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(Rational(7, 2).next_int_above() == 4);
  CHECK(Rational(7, 2).next_int_below() == 3);
  // Integer values are excluded by strict bounds.
  CHECK(Rational(3).next_int_above() == 4);
  CHECK(Rational(3).next_int_below() == 2);
  CHECK(Rational(-3).next_int_below() == -4);
  CHECK(Rational(-1, 2).next_int_below() == -1);
  CHECK(Rational(-1, 2).next_int_above() == 0);
}

TEST_CASE("strict integerization matches a direct scan") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(-60, 60), den(1, 9);
  for (int it = 0; it < 500; ++it) {
    Rational r(num(rng), den(rng));
    Wide above = -100, below = 100;
    for (Wide z = -100; z <= 100; ++z)
      if (Rational(z) > r) {
        above = z;
        break;
      }
    for (Wide z = 100; z >= -100; --z)
      if (Rational(z) < r) {
        below = z;
        break;
      }
    CHECK(r.next_int_above() == above);
    CHECK(r.next_int_below() == below);
  }
}

TEST_CASE("arithmetic") {
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 3) - Rational(1, 2) == Rational(-1, 6));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(2, 3) / Rational(-4, 9) == Rational(-3, 2));
  CHECK(Rational(5, 12).scaled_pow2(3) == Rational(10, 3));
  CHECK(Rational(5, 3).scaled_pow2(0) == Rational(5, 3));
  CHECK(Rational(1, 3).str() == "1/3");
  CHECK(Rational(-4).str() == "-4");
}

TEST_CASE("overflow is reported") {
  const Wide big = Wide{1} << 120;
  CHECK_THROWS_AS(Rational(big) * Rational(big), ResourceLimitError);
}

TEST_CASE("comparison is exact beyond 128-bit products") {
  using boost::multiprecision::cpp_int;
  std::mt19937_64 rng(11);
  auto draw = [&] {
    Wide v = (Wide(rng()) << 60) ^ Wide(rng() >> 4);
    return v;
  };
  for (int it = 0; it < 2000; ++it) {
    Wide n1 = draw(), n2 = draw();
    if (rng() & 1) n1 = -n1;
    if (rng() & 1) n2 = -n2;
    Wide d1 = draw() | 1, d2 = draw() | 1;
    if (d1 < 0) d1 = -d1;
    if (d2 < 0) d2 = -d2;
    auto big = [](Wide v) {
      const bool neg = v < 0;
      UWide u = neg ? UWide(0) - UWide(v) : UWide(v);
      cpp_int r = cpp_int(std::uint64_t(u >> 64));
      r <<= 64;
      r += cpp_int(std::uint64_t(u));
      return neg ? cpp_int(-r) : r;
    };
    const cpp_int lhs = big(n1) * big(d2), rhs = big(n2) * big(d1);
    const auto expect = lhs < rhs   ? std::strong_ordering::less
                        : lhs > rhs ? std::strong_ordering::greater
                                    : std::strong_ordering::equal;
    CHECK(compare_fractions(n1, d1, n2, d2) == expect);
  }
}

TEST_CASE("wide text round-trip") {
  const Wide v = -((Wide{1} << 100) + 12345);
  CHECK(parse_wide(to_string(v)) == v);
  CHECK(to_string(Wide{0}) == "0");
  CHECK_THROWS(parse_wide("12x"));
}

TEST_CASE("bit helpers") {
  CHECK(bit_length(0) == 0);
  CHECK(bit_length(1) == 1);
  CHECK(bit_length(8) == 4);
  CHECK(trailing_zeros(12, 50) == 2);
  CHECK(trailing_zeros(0, 50) == 50);
  CHECK(floor_div(-7, 2) == -4);
  CHECK(ceil_div(-7, 2) == -3);
  CHECK(ceil_div(7, 2) == 4);
}
