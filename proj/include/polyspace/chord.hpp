#pragma once

// Chord tables and extremal chord searches.
//
// For a region with offsets x in [0, N) and bounds l, u, write U = u + 1.
// For every t in [1, 2N - 3]:
//   M(t) = max over x < y, x + y = t of (l(y) - U(x)) / (y - x)
//   m(t) = min over x < y, x + y = t of (U(y) - l(x)) / (y - x)
// M bounds the linear coefficient from below and m from above.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polyspace/bounds.hpp"
#include "polyspace/rational.hpp"

namespace polyspace {

struct ChordTables {
  std::uint64_t region = 0;
  /// M(t) at index t - 1.
  std::vector<Rational> lower;
  /// m(t) at index t - 1.
  std::vector<Rational> upper;

  std::size_t size() const { return lower.size(); }
  bool empty() const { return lower.empty(); }
  const Rational& M(std::size_t t) const { return lower.at(t - 1); }
  const Rational& m(std::size_t t) const { return upper.at(t - 1); }
};

ChordTables chord_tables(const RegionBounds& bounds, std::uint64_t region = 0);

enum class SearchMode { Max, Min };

/// Extremum of D(x, y) = (G[y] - H[x]) / (y - x) over index pairs x < y.
/// Ties keep the smallest x, then the smallest y.
struct ChordExtremum {
  Rational value;
  std::size_t x = 0;
  std::size_t y = 0;
};

struct SearchStats {
  std::uint64_t rows_scanned = 0;
  std::uint64_t rows_skipped = 0;
  std::uint64_t pairs = 0;
};

/// Returns nullopt for fewer than two indices. With `skip` set, a row x
/// beyond the current witness x' is dropped whenever the slope of H between
/// x' and x cannot be beaten: (H[x] - H[x']) / (x - x') >= D(x', y') for Max,
/// <= for Min. The result is identical with and without skipping.
std::optional<ChordExtremum> extremal_chord_search(std::span<const Rational> g,
                                                   std::span<const Rational> h, SearchMode mode,
                                                   bool skip = true, SearchStats* stats = nullptr);

}  // namespace polyspace
