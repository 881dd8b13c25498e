#include "polyspace/chord.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#include "polyspace/error.hpp"

namespace polyspace {

namespace {

template <class T>
void fill_tables(const RegionBounds& bounds, ChordTables& out) {
  const std::size_t n = bounds.size();
  const std::size_t span = 2 * n - 3;
  out.lower.reserve(span);
  out.upper.reserve(span);
  const auto& l = bounds.lower;
  const auto& u = bounds.upper;
  for (std::size_t t = 1; t <= span; ++t) {
    const std::size_t x_lo = t > n - 1 ? t - (n - 1) : 0;
    const std::size_t x_hi = (t - 1) / 2;
    // running extrema kept as unreduced fractions with positive denominators
    std::int64_t lo_num = 0, lo_den = 0, hi_num = 0, hi_den = 0;
    for (std::size_t x = x_lo; x <= x_hi; ++x) {
      const std::size_t y = t - x;
      const auto gap = static_cast<std::int64_t>(y - x);
      const std::int64_t down = l[y] - u[x] - 1;
      const std::int64_t up = u[y] + 1 - l[x];
      if (lo_den == 0 || T(down) * lo_den > T(lo_num) * gap) {
        lo_num = down;
        lo_den = gap;
      }
      if (hi_den == 0 || T(up) * hi_den < T(hi_num) * gap) {
        hi_num = up;
        hi_den = gap;
      }
    }
    out.lower.emplace_back(lo_num, lo_den);
    out.upper.emplace_back(hi_num, hi_den);
  }
}

}  // namespace

ChordTables chord_tables(const RegionBounds& bounds, std::uint64_t region) {
  ChordTables out;
  out.region = region;
  const std::size_t n = bounds.size();
  if (n < 2) return out;
  std::int64_t top = 0;
  for (std::size_t x = 0; x < n; ++x) top = std::max({top, bounds.lower[x], bounds.upper[x]});
  // |numerator| <= top + 1 and gap < n, so products stay below 2^62
  if (std::bit_width(static_cast<std::uint64_t>(top) + 1) + std::bit_width(n) <= 61) {
    fill_tables<std::int64_t>(bounds, out);
  } else {
    fill_tables<Wide>(bounds, out);
  }
  return out;
}

namespace {

int bits_of(Wide v) { return bit_length(static_cast<UWide>(wide_abs(v))); }

// Unchecked paths: every product formed below provably fits in T.
template <class T, bool Checked>
std::optional<ChordExtremum> search_impl(std::span<const Rational> g, std::span<const Rational> h,
                                         SearchMode mode, bool skip, SearchStats* stats) {
  const std::size_t n = g.size();
  const bool maximize = mode == SearchMode::Max;
  auto mul = [](T a, T b) -> T {
    if constexpr (Checked) return checked_mul(a, b);
    return a * b;
  };
  auto sub = [](T a, T b) -> T {
    if constexpr (Checked) return checked_sub(a, b);
    return a - b;
  };
  // a/b beats c/d under the current mode
  auto better = [&](T a, T b, T c, T d) {
    if constexpr (Checked) {
      const auto ord = compare_fractions(a, b, c, d);
      return maximize ? ord > 0 : ord < 0;
    } else {
      const T lhs = a * d, rhs = c * b;
      return maximize ? lhs > rhs : lhs < rhs;
    }
  };
  std::vector<T> gn(n), gd(n), hn_(n), hd_(n);
  for (std::size_t i = 0; i < n; ++i) {
    gn[i] = static_cast<T>(g[i].num());
    gd[i] = static_cast<T>(g[i].den());
    hn_[i] = static_cast<T>(h[i].num());
    hd_[i] = static_cast<T>(h[i].den());
  }

  T best_num = 0, best_den = 0;
  std::size_t bx = 0, by = 0;
  std::uint64_t pairs = 0, skipped = 0, scanned = 0;
  for (std::size_t x = 0; x + 1 < n; ++x) {
    const T hn = hn_[x], hd = hd_[x];
    if (skip && best_den != 0 && x > bx) {
      // slope of H between the witness row and this row
      const T sn = sub(mul(hn, hd_[bx]), mul(hn_[bx], hd));
      const T sd = mul(mul(hd, hd_[bx]), static_cast<T>(x - bx));
      // Max: skip when slope >= best; Min: skip when slope <= best
      if (!better(best_num, best_den, sn, sd)) {
        ++skipped;
        continue;
      }
    }
    ++scanned;
    for (std::size_t y = x + 1; y < n; ++y) {
      const T num = sub(mul(gn[y], hd), mul(hn, gd[y]));
      const T den = mul(mul(gd[y], hd), static_cast<T>(y - x));
      ++pairs;
      if (best_den == 0 || better(num, den, best_num, best_den)) {
        best_num = num;
        best_den = den;
        bx = x;
        by = y;
      }
    }
  }
  if (stats) {
    stats->pairs += pairs;
    stats->rows_skipped += skipped;
    stats->rows_scanned += scanned;
  }
  return ChordExtremum{Rational(best_num, best_den), bx, by};
}

}  // namespace

std::optional<ChordExtremum> extremal_chord_search(std::span<const Rational> g,
                                                   std::span<const Rational> h, SearchMode mode,
                                                   bool skip, SearchStats* stats) {
  if (g.size() != h.size()) throw ContractViolation("chord search over mismatched arrays");
  if (g.size() < 2) return std::nullopt;
  int num_bits = 0, den_bits = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num_bits = std::max({num_bits, bits_of(g[i].num()), bits_of(h[i].num())});
    den_bits = std::max({den_bits, bits_of(g[i].den()), bits_of(h[i].den())});
  }
  const int gap_bits = std::bit_width(g.size());
  // |D num| < 2^(num+den+1), D den < 2^(2 den + gap); cross products add both
  const int worst = (num_bits + den_bits + 1) + (2 * den_bits + gap_bits);
  if (worst <= 61) return search_impl<std::int64_t, false>(g, h, mode, skip, stats);
  if (worst <= 125) return search_impl<Wide, false>(g, h, mode, skip, stats);
  return search_impl<Wide, true>(g, h, mode, skip, stats);
}

}  // namespace polyspace
