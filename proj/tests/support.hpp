#pragma once

// Small bound tables and random generators shared by the test suites.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "polyspace/bounds.hpp"
#include "polyspace/rational.hpp"

namespace polyspace::testing {

inline BoundTable exact_table(FixedFormat in, FixedFormat out, const std::vector<std::int64_t>& v) {
  return BoundTable(in, out, v, v);
}

/// l = u = 2x over a 2-bit input.
inline BoundTable toy_linear() { return exact_table({0, 2}, {3, 0}, {0, 2, 4, 6}); }

/// l = u = 0, 2, 0, 2.
inline BoundTable toy_oscillating() { return exact_table({0, 2}, {2, 0}, {0, 2, 0, 2}); }

/// l = u = x^2 over a 2-bit input.
inline BoundTable toy_square() { return exact_table({0, 2}, {4, 0}, {0, 1, 4, 9}); }

inline std::shared_ptr<const BoundTable> share(BoundTable t) {
  return std::make_shared<const BoundTable>(std::move(t));
}

/// Bounds around a random quadratic with random slack. Roughly half of the
/// tables produced are feasible for small R.
inline BoundTable random_table(std::mt19937_64& rng, int in_bits, int out_bits) {
  const std::int64_t top = (std::int64_t{1} << out_bits) - 1;
  const std::uint64_t n = std::uint64_t{1} << in_bits;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> slack(0, 2);
  std::uniform_int_distribution<int> noise(-1, 1);
  const double a = coef(rng) * top / double(n * n);
  const double b = coef(rng) * top / double(n);
  const double c = top / 2.0;
  std::vector<std::int64_t> lo(n), hi(n);
  for (std::uint64_t z = 0; z < n; ++z) {
    const double x = double(z);
    auto v = static_cast<std::int64_t>(a * x * x + b * x + c) + noise(rng);
    std::int64_t l = v - slack(rng);
    std::int64_t u = v + slack(rng);
    lo[z] = std::clamp<std::int64_t>(l, 0, top);
    hi[z] = std::clamp<std::int64_t>(u, 0, top);
  }
  return BoundTable({0, in_bits}, {out_bits, 0}, lo, hi);
}

inline std::vector<Rational> random_rationals(std::mt19937_64& rng, std::size_t n, int range,
                                              int max_den) {
  std::uniform_int_distribution<int> num(-range, range);
  std::uniform_int_distribution<int> den(1, max_den);
  std::vector<Rational> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(num(rng), den(rng));
  return out;
}

}  // namespace polyspace::testing
