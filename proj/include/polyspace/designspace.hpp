#pragma once

// Complete design space of piecewise quadratics.
//
// A triple (a, b, c) is feasible for region r at shift k when
//   l(x) <= floor((a x^2 + b x + c) / 2^k) <= u(x)   for every offset x.
// All decisions are made in exact integer/rational arithmetic. Strict bounds
// are integerized once: z < p/q  <=>  z <= ceil(p/q) - 1 and
// z > p/q  <=>  z >= floor(p/q) + 1.

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polyspace/bounds.hpp"
#include "polyspace/chord.hpp"
#include "polyspace/rational.hpp"

namespace polyspace {

/// Inclusive integer range; empty when lo > hi.
struct IntRange {
  Wide lo = 0;
  Wide hi = -1;
  bool empty() const { return lo > hi; }
  bool contains(Wide v) const { return lo <= v && v <= hi; }
  Wide size() const { return empty() ? 0 : hi - lo + 1; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Half-open integer range [lo, hi); empty when lo >= hi.
struct HalfOpenRange {
  Wide lo = 0;
  Wide hi = 0;
  bool empty() const { return lo >= hi; }
  bool contains(Wide v) const { return lo <= v && v < hi; }
  friend bool operator==(const HalfOpenRange&, const HalfOpenRange&) = default;
};

struct SpaceOptions {
  /// Largest shift tried by min_global_k; < 0 selects 2 (p + q).
  int k_max = -1;
  /// Unconstrained coefficients are clamped to [-2^w, 2^w]; < 0 selects 2 (p + q).
  int window_bits = -1;
  /// Budget of a-values enumerated over all regions, split evenly. A region
  /// whose a-range exceeds its share is cut to the values nearest zero and
  /// the catalog is flagged incomplete.
  std::uint64_t enum_cap = std::uint64_t{1} << 20;
  bool use_skip = true;
  int threads = 1;

  std::uint64_t region_cap(std::size_t regions) const {
    return std::max<std::uint64_t>(1, enum_cap / std::max<std::size_t>(regions, 1));
  }
  int resolved_k_max(const FixedFormat& out) const { return k_max >= 0 ? k_max : 2 * out.width(); }
  int resolved_window(const FixedFormat& out) const {
    return window_bits >= 0 ? window_bits : 2 * out.width();
  }
};

/// Strict real bounds on a / 2^k from the second-difference searches.
/// Missing bounds mean the region has no pair t < s (fewer than three offsets).
struct SecondDifferenceBounds {
  std::optional<ChordExtremum> lower;  // max_{t<s} (M(s) - m(t)) / (s - t)
  std::optional<ChordExtremum> upper;  // min_{t<s} (m(s) - M(t)) / (s - t)
};

SecondDifferenceBounds second_difference_bounds(const ChordTables& tables, bool use_skip = true,
                                                SearchStats* stats = nullptr);

/// Everything about one region that does not depend on k.
struct RegionAnalysis {
  std::uint64_t region = 0;
  std::size_t points = 0;
  ChordTables tables;
  /// M(t) < m(t) for every t.
  bool pointwise = true;
  SecondDifferenceBounds curvature;
  bool feasible = false;
  /// First t with M(t) >= m(t), when pointwise fails.
  std::optional<std::size_t> failing_t;
};

RegionAnalysis analyze_region(const RegionBounds& bounds, std::uint64_t region, bool use_skip = true,
                              SearchStats* stats = nullptr);
std::vector<RegionAnalysis> analyze_regions(const BoundTable& table, int lookup_bits,
                                            const SpaceOptions& opts, SearchStats* stats = nullptr);

/// True iff some real quadratic fits strictly inside the region's bounds:
/// M(t) < m(t) for all t and max_{t<s} (M(s)-m(t))/(s-t) < min_{t<s} (m(s)-M(t))/(s-t).
bool region_feasible(const ChordTables& tables, bool use_skip = true);

IntRange a_interval(const RegionAnalysis& region, int k, int window_bits);
IntRange a_interval(const ChordTables& tables, int k, int window_bits);
IntRange b_interval(const ChordTables& tables, Wide a, int k, int window_bits);
HalfOpenRange c_interval(const RegionBounds& bounds, Wide a, Wide b, int k);

/// The part of an a-range that gets enumerated: all of it when it holds at
/// most `cap` values, else the `cap` values nearest zero.
IntRange enumeration_window(const IntRange& a, std::uint64_t cap);

/// Whether the region admits an integer triple at shift k (a-values taken
/// from enumeration_window).
bool region_feasible_at(const RegionAnalysis& region, int k, int window_bits, std::uint64_t cap);

struct FeasibilityRow {
  int lookup_bits = 0;
  std::uint64_t regions = 0;
  std::uint64_t infeasible = 0;
  std::optional<std::uint64_t> first_failure;
};

struct FeasibilitySweep {
  std::vector<FeasibilityRow> rows;
  std::optional<int> min_lookup_bits;
};

/// Smallest R in [r_min, r_max] with every region feasible; stops at the
/// first feasible R unless `full` is set.
FeasibilitySweep min_feasible_R(const BoundTable& table, int r_max, const SpaceOptions& opts,
                                int r_min = 0, bool full = false);

struct ShiftResult {
  int k = 0;
  /// Per-region minimum shift.
  std::vector<int> region_k;
};

/// Smallest k in [0, k_max] at which every region admits an integer triple.
/// Throws ResourceLimitError naming the first failing region.
ShiftResult min_global_k(const std::vector<RegionAnalysis>& regions, const FixedFormat& out,
                         const SpaceOptions& opts);

struct ARange {
  Wide a = 0;
  IntRange b;
};

struct RegionCatalog {
  std::uint64_t region = 0;
  IntRange a;
  /// One entry per admitted a with a nonempty b-range, a ascending.
  std::vector<ARange> b_ranges;
  /// The a-range exceeded the enumeration cap.
  bool truncated = false;
};

/// Feasible (a, b, c) triples per region at a fixed shift k. c-ranges are
/// recomputed on demand from the bound table.
class CoefficientCatalog {
 public:
  CoefficientCatalog() = default;
  CoefficientCatalog(std::shared_ptr<const BoundTable> table, int lookup_bits, int k,
                     std::vector<RegionCatalog> regions, bool linear_sufficient);

  const BoundTable& table() const { return *table_; }
  std::shared_ptr<const BoundTable> table_ptr() const { return table_; }
  int lookup_bits() const { return lookup_bits_; }
  int k() const { return k_; }
  bool linear_sufficient() const { return linear_; }
  bool complete() const;
  const std::vector<RegionCatalog>& regions() const { return regions_; }
  const RegionCatalog& region(std::uint64_t r) const { return regions_.at(r); }
  RegionBounds bounds(std::uint64_t r) const { return table_->region(lookup_bits_, r); }

  HalfOpenRange c_range(std::uint64_t r, Wide a, Wide b) const;
  /// Number of (a, b) pairs stored for region r.
  std::uint64_t pair_count(std::uint64_t r) const;
  /// Membership of an explicit triple.
  bool contains(std::uint64_t r, Wide a, Wide b, Wide c) const;

 private:
  std::shared_ptr<const BoundTable> table_;
  int lookup_bits_ = 0;
  int k_ = 0;
  bool linear_ = false;
  std::vector<RegionCatalog> regions_;
};

struct SpaceResult {
  CoefficientCatalog catalog;
  ShiftResult shift;
  SearchStats stats;
};

/// Builds the catalog at shift k (or the minimum shift when k < 0).
/// Throws GenerationError naming the first infeasible region.
SpaceResult generate_space(std::shared_ptr<const BoundTable> table, int lookup_bits, int k,
                           const SpaceOptions& opts);
CoefficientCatalog generate_space(std::shared_ptr<const BoundTable> table,
                                  const std::vector<RegionAnalysis>& regions, int lookup_bits,
                                  int k, const SpaceOptions& opts);

/// Text format:
///   catalog v1
///   format n <n> m <m> p <p> q <q>
///   space R <R> k <k> linear <0|1> complete <0|1>
///   region <r> a <a0> <a1> truncated <0|1>
///   ab <a> <b0> <b1>
///   c <a> <b> <c_lo> <c_hi>          half-open
///   end
void write_catalog(std::ostream& os, const CoefficientCatalog& catalog);
/// Reads a catalog and checks every c record against `table`.
CoefficientCatalog read_catalog(std::istream& is, std::shared_ptr<const BoundTable> table);

}  // namespace polyspace
