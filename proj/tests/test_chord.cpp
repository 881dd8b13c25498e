#include <doctest.h>

#include <random>

#include "polyspace/chord.hpp"
#include "polyspace/verify.hpp"
#include "support.hpp"

using namespace polyspace;
using namespace polyspace::testing;

namespace {

std::vector<Rational> ints(std::initializer_list<int> v) {
  std::vector<Rational> out;
  for (int x : v) out.emplace_back(x);
  return out;
}

void same(const std::optional<ChordExtremum>& a, const std::optional<ChordExtremum>& b) {
  REQUIRE(a.has_value() == b.has_value());
  if (!a) return;
  CHECK(a->value == b->value);
  CHECK(a->x == b->x);
  CHECK(a->y == b->y);
}

}  // namespace

TEST_CASE("chord tables of exact linear data") {
  auto t = toy_linear();
  auto ct = chord_tables(t.region(0, 0));
  REQUIRE(ct.size() == 5);
  CHECK(ct.M(3) == Rational(5, 3));
  CHECK(ct.m(3) == Rational(7, 3));
  CHECK(ct.M(1) == Rational(1));
  CHECK(ct.m(1) == Rational(3));
  CHECK(chord_tables(t.region(2, 1)).empty());
}

TEST_CASE("chord tables match a pair scan") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    auto t = random_table(rng, 4, 6);
    auto rb = t.region(0, 0);
    auto ct = chord_tables(rb);
    const std::size_t n = rb.size();
    for (std::size_t s = 1; s + 2 < 2 * n; ++s) {
      std::optional<Rational> lo, hi;
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t y = s - x;
        if (s < x || y <= x || y >= n) continue;
        Rational dl(rb.lower[y] - rb.upper[x] - 1, Wide(y - x));
        Rational du(rb.upper[y] + 1 - rb.lower[x], Wide(y - x));
        if (!lo || dl > *lo) lo = dl;
        if (!hi || du < *hi) hi = du;
      }
      REQUIRE(lo.has_value());
      CHECK(ct.M(s) == *lo);
      CHECK(ct.m(s) == *hi);
    }
  }
}

TEST_CASE("extremal search on small arrays") {
  auto sq = ints({0, 1, 4, 9});
  for (bool skip : {true, false}) {
    auto r = extremal_chord_search(sq, sq, SearchMode::Max, skip);
    REQUIRE(r);
    CHECK(r->value == Rational(5));
    CHECK(r->x == 2);
    CHECK(r->y == 3);
    same(r, naive_chord_search(sq, sq, SearchMode::Max));

    auto lin = ints({0, 1, 2, 3});
    auto l = extremal_chord_search(lin, lin, SearchMode::Max, skip);
    REQUIRE(l);
    CHECK(l->value == Rational(1));
    CHECK(l->x == 0);
    CHECK(l->y == 1);
    same(l, naive_chord_search(lin, lin, SearchMode::Max));

    auto mn = extremal_chord_search(sq, sq, SearchMode::Min, skip);
    REQUIRE(mn);
    CHECK(mn->value == Rational(1));
    CHECK(mn->x == 0);
    CHECK(mn->y == 1);
  }
  auto one = ints({4});
  CHECK_FALSE(extremal_chord_search(one, one, SearchMode::Max));
  CHECK_FALSE(naive_chord_search(one, one, SearchMode::Min));
}

TEST_CASE("skip search equals the naive scan on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(2, 40);
  SearchStats stats;
  for (int it = 0; it < 1000; ++it) {
    const std::size_t n = len(rng);
    // Narrow ranges produce many ties.
    const int range = it % 3 == 0 ? 3 : 1000;
    auto g = random_rationals(rng, n, range, it % 2 ? 1 : 7);
    auto h = random_rationals(rng, n, range, it % 2 ? 1 : 7);
    for (auto mode : {SearchMode::Max, SearchMode::Min}) {
      auto naive = naive_chord_search(g, h, mode);
      same(extremal_chord_search(g, h, mode, true, &stats), naive);
      same(extremal_chord_search(g, h, mode, false), naive);
    }
  }
  CHECK(stats.rows_skipped > 0);
}

TEST_CASE("skip search with large magnitudes") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> big(-(std::int64_t{1} << 60), std::int64_t{1} << 60);
  std::uniform_int_distribution<std::int64_t> den(1, std::int64_t{1} << 40);
  for (int it = 0; it < 100; ++it) {
    std::vector<Rational> g, h;
    for (int i = 0; i < 12; ++i) {
      g.emplace_back(big(rng), den(rng));
      h.emplace_back(big(rng), den(rng));
    }
    for (auto mode : {SearchMode::Max, SearchMode::Min})
      same(extremal_chord_search(g, h, mode), naive_chord_search(g, h, mode));
  }
}
