#include <doctest.h>

#include <random>
#include <sstream>

#include "catalog_triples.hpp"
#include "fourier_motzkin.hpp"
#include "polyspace/designspace.hpp"
#include "polyspace/error.hpp"
#include "polyspace/verify.hpp"
#include "support.hpp"

using namespace polyspace;
using namespace polyspace::testing;

namespace {

SpaceOptions small_opts() {
  SpaceOptions o;
  o.window_bits = 8;
  o.k_max = 8;
  return o;
}

bool fits(const RegionBounds& rb, const Triple& t, int k) {
  for (std::size_t x = 0; x < rb.size(); ++x) {
    const Wide v = floor_div(t.a * Wide(x * x) + t.b * Wide(x) + t.c, Wide{1} << k);
    if (v < rb.lower[x] || v > rb.upper[x]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("region feasibility on toy data") {
  CHECK(region_feasible(chord_tables(toy_linear().region(0, 0))));
  CHECK_FALSE(region_feasible(chord_tables(toy_oscillating().region(0, 0))));
  auto loose = BoundTable({0, 3}, {4, 0}, {0, 3, 1, 0, 2, 0, 3, 1}, {12, 15, 13, 12, 14, 12, 15, 13});
  CHECK(region_feasible(chord_tables(loose.region(0, 0))));

  auto osc = toy_oscillating();
  CHECK(oracle_space(osc, 0, 0, {})[0].empty());
  CHECK_THROWS_AS(generate_space(share(osc), 0, 0, small_opts()), GenerationError);
}

TEST_CASE("region feasibility equals real Fourier-Motzkin feasibility") {
  std::mt19937_64 rng(99);
  int feasible = 0, infeasible = 0;
  for (int it = 0; it < 300; ++it) {
    const int bits = 2 + it % 2;
    auto t = random_table(rng, bits, 4 + it % 3);
    const int R = it % 4 == 0 ? 1 : 0;
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << R); ++r) {
      auto rb = t.region(R, r);
      const bool expect = real_quadratic_fits(rb);
      auto tables = chord_tables(rb);
      CHECK(region_feasible(tables, true) == expect);
      CHECK(region_feasible(tables, false) == expect);
      (expect ? feasible : infeasible)++;
    }
  }
  CHECK(feasible > 20);
  CHECK(infeasible > 20);
}

TEST_CASE("minimum feasible lookup bits") {
  auto o = small_opts();
  CHECK(min_feasible_R(toy_linear(), 2, o).min_lookup_bits == 0);
  CHECK(min_feasible_R(toy_oscillating(), 2, o).min_lookup_bits == 1);
  CHECK_THROWS_AS(min_feasible_R(toy_linear(), 3, o), ConfigError);

  std::mt19937_64 rng(8);
  for (int it = 0; it < 30; ++it) {
    auto t = random_table(rng, 4, 5);
    auto sweep = min_feasible_R(t, 4, o, 0, true);
    REQUIRE(sweep.rows.size() == 5);
    CHECK(sweep.rows.back().infeasible == 0);
    bool seen = false;
    for (const auto& row : sweep.rows) {
      if (seen) CHECK(row.infeasible == 0);
      if (row.infeasible == 0) seen = true;
    }
  }
}

TEST_CASE("feasibility is monotone in R for the reciprocal") {
  auto t = make_bound_table(builtin_spec(FunctionId::Reciprocal, 10));
  auto sweep = min_feasible_R(t, 10, {}, 0, true);
  bool seen = false;
  for (const auto& row : sweep.rows) {
    if (seen) CHECK(row.infeasible == 0);
    if (row.infeasible == 0) seen = true;
  }
  CHECK(seen);
}

TEST_CASE("coefficient intervals of exact linear data") {
  auto t = toy_linear();
  auto rb = t.region(0, 0);
  auto ra = analyze_region(rb, 0);
  REQUIRE(ra.curvature.lower);
  REQUIRE(ra.curvature.upper);
  CHECK(ra.curvature.lower->value == Rational(-1, 2));
  CHECK(ra.curvature.upper->value == Rational(1, 2));
  CHECK(a_interval(ra, 0, 8) == IntRange{0, 0});
  CHECK(a_interval(ra, 1, 8) == IntRange{0, 0});
  CHECK(a_interval(ra, 2, 8) == IntRange{-1, 1});
  CHECK(b_interval(ra.tables, 0, 0, 8) == IntRange{2, 2});
  CHECK(c_interval(rb, 0, 2, 0) == HalfOpenRange{0, 1});
  CHECK(c_interval(rb, 0, 3, 0).empty());

  auto single = t.region(2, 3);
  auto st = chord_tables(single);
  CHECK(b_interval(st, 5, 3, 6) == IntRange{-64, 64});
  CHECK(a_interval(st, 3, 6) == IntRange{-64, 64});

  auto flat = exact_table({0, 2}, {3, 0}, {5, 5, 5, 5});
  CHECK(c_interval(flat.region(0, 0), 0, 0, 0) == HalfOpenRange{5, 6});
}

TEST_CASE("b interval equals a direct pair scan") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 100; ++it) {
    auto t = random_table(rng, 3, 6);
    auto rb = t.region(0, 0);
    auto tables = chord_tables(rb);
    for (Wide a = -4; a <= 4; ++a)
      for (int k = 0; k <= 3; ++k) {
        // b / 2^k + a t / 2^k must lie strictly inside every pair chord.
        Wide lo = -(Wide{1} << 8), hi = Wide{1} << 8;
        for (std::size_t x = 0; x < rb.size(); ++x)
          for (std::size_t y = x + 1; y < rb.size(); ++y) {
            const Wide d = Wide(y - x), s = Wide(x + y);
            Rational low = Rational((rb.lower[y] - rb.upper[x] - 1) * (Wide{1} << k), d) - Rational(a * s);
            Rational up = Rational((rb.upper[y] + 1 - rb.lower[x]) * (Wide{1} << k), d) - Rational(a * s);
            lo = std::max(lo, low.next_int_above());
            hi = std::min(hi, up.next_int_below());
          }
        auto b = b_interval(tables, a, k, 8);
        if (lo > hi)
          CHECK(b.empty());
        else
          CHECK(b == IntRange{lo, hi});
      }
  }
}

TEST_CASE("minimum shift") {
  auto o = small_opts();
  CHECK(generate_space(share(toy_linear()), 0, -1, o).shift.k == 0);
  auto flat = exact_table({0, 2}, {3, 0}, {5, 5, 5, 5});
  CHECK(generate_space(share(flat), 0, -1, o).shift.k == 0);

  // floor(3x/2) needs b = 3/2.
  auto half = exact_table({0, 2}, {3, 0}, {0, 1, 3, 4});
  CHECK(oracle_space(half, 0, 0, {})[0].empty());
  CHECK_FALSE(oracle_space(half, 0, 1, {})[0].empty());
  CHECK(generate_space(share(half), 0, -1, o).shift.k == 1);

  auto tight = small_opts();
  tight.k_max = 0;
  CHECK_THROWS_AS(generate_space(share(half), 0, -1, tight), ResourceLimitError);
}

TEST_CASE("catalog of the toy") {
  auto res = generate_space(share(toy_linear()), 0, 0, small_opts());
  const auto& cat = res.catalog;
  REQUIRE(cat.regions().size() == 1);
  CHECK(cat.region(0).a == IntRange{0, 0});
  REQUIRE(cat.region(0).b_ranges.size() == 1);
  CHECK(cat.region(0).b_ranges[0].b == IntRange{2, 2});
  CHECK(cat.c_range(0, 0, 2) == HalfOpenRange{0, 1});
  CHECK(cat.linear_sufficient());
  CHECK(cat.complete());
  CHECK(cat.contains(0, 0, 2, 0));
  CHECK_FALSE(cat.contains(0, 0, 2, 1));
  CHECK(oracle_space(toy_linear(), 0, 0, {}) == std::vector<std::vector<Triple>>{{{0, 2, 0}}});
}

TEST_CASE("catalog equals brute-force enumeration") {
  std::mt19937_64 rng(17);
  OracleWindows w{16, 32, 512};
  int compared = 0;
  for (int it = 0; it < 40; ++it) {
    const int bits = 2 + it % 4;
    auto t = share(random_table(rng, bits, 4));
    auto sweep = min_feasible_R(*t, bits, small_opts());
    if (!sweep.min_lookup_bits) continue;
    const int R = *sweep.min_lookup_bits;
    auto res = generate_space(t, R, -1, small_opts());
    for (int k = res.shift.k; k <= res.shift.k + 1; ++k) {
      auto cat = generate_space(t, R, k, small_opts()).catalog;
      CHECK(catalog_triples(cat, w) == sorted(oracle_space(*t, R, k, w)));
      ++compared;
    }
  }
  CHECK(compared >= 20);
}

TEST_CASE("feasible triples survive doubling into k + 1") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 40; ++it) {
    auto t = share(random_table(rng, 4, 5));
    auto sweep = min_feasible_R(*t, 4, small_opts());
    const int R = *sweep.min_lookup_bits;
    if (R > 2) continue;
    auto res = generate_space(t, R, -1, small_opts());
    auto next = generate_space(t, R, res.shift.k + 1, small_opts()).catalog;
    for (std::size_t r = 0; r < res.catalog.regions().size(); ++r)
      for (const auto& ab : res.catalog.region(r).b_ranges)
        for (Wide b = ab.b.lo; b <= std::min(ab.b.hi, ab.b.lo + 3); ++b) {
          auto c = res.catalog.c_range(r, ab.a, b);
          REQUIRE_FALSE(c.empty());
          Triple tr{ab.a, b, c.lo};
          CHECK(fits(res.catalog.bounds(r), tr, res.shift.k));
          if (wide_abs(2 * tr.a) < 256 && wide_abs(2 * tr.b) < 256)
            CHECK(next.contains(r, 2 * tr.a, 2 * tr.b, 2 * tr.c));
        }
  }
}

TEST_CASE("enumeration cap flags the catalog") {
  CHECK(enumeration_window({-10, 10}, 5) == IntRange{-2, 2});
  CHECK(enumeration_window({3, 100}, 4) == IntRange{3, 6});
  CHECK(enumeration_window({-100, -7}, 2) == IntRange{-8, -7});
  auto o = small_opts();
  o.enum_cap = 2;
  auto res = generate_space(share(toy_linear()), 1, 2, o);
  CHECK_FALSE(res.catalog.complete());
}

TEST_CASE("catalog file round-trip") {
  auto t = share(make_bound_table(builtin_spec(FunctionId::Exp2, 8)));
  auto cat = generate_space(t, 3, -1, {}).catalog;
  std::stringstream ss;
  write_catalog(ss, cat);
  auto back = read_catalog(ss, t);
  CHECK(back.k() == cat.k());
  CHECK(back.lookup_bits() == cat.lookup_bits());
  CHECK(back.linear_sufficient() == cat.linear_sufficient());
  REQUIRE(back.regions().size() == cat.regions().size());
  for (std::size_t r = 0; r < cat.regions().size(); ++r) {
    CHECK(back.region(r).a == cat.region(r).a);
    REQUIRE(back.region(r).b_ranges.size() == cat.region(r).b_ranges.size());
    for (std::size_t i = 0; i < cat.region(r).b_ranges.size(); ++i) {
      CHECK(back.region(r).b_ranges[i].a == cat.region(r).b_ranges[i].a);
      CHECK(back.region(r).b_ranges[i].b == cat.region(r).b_ranges[i].b);
    }
  }
  std::istringstream bad("catalog v2\n");
  CHECK_THROWS_AS(read_catalog(bad, t), FormatError);
}
