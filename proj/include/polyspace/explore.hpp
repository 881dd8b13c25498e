#pragma once

// Decision procedure over a coefficient catalog:
//   1. k is fixed by the catalog (minimum shift)
//   2. maximize the square-input truncation i
//   3. maximize the linear-input truncation j
//   4. minimize the a, then b, then c storage widths
// then pick the first surviving triple (a, b, c ascending) per region.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polyspace/designspace.hpp"

namespace polyspace {

/// Inclusive [lo, hi] intervals, sorted and disjoint.
using IntervalSet = std::vector<std::pair<Wide, Wide>>;

IntervalSet normalize(IntervalSet set);

struct WidthResult {
  /// Shared trailing-zero shift t*.
  int shift = 0;
  /// Stored width P (bits), never negative.
  int width = 0;
  /// min over regions of the best trailing-zero count, T.
  int max_truncation = 0;
};

/// Precision minimization over per-region sets of non-negative values:
///   T_{r,s} = trailing zeros of s (zero_cap for s = 0)
///   T       = min_r max_{s in S_r} T_{r,s}
///   P_{t,r} = min_{s in S_r, T_{r,s} >= t} (ceil(log2(s + 1)) - t)
///   P       = min_{t <= T} max_r P_{t,r},  t* = smallest t attaining P
/// The reported width is max(P, 0). Throws ContractViolation on an empty set.
WidthResult minimize_width(std::span<const IntervalSet> sets, int zero_cap);
WidthResult minimize_width(const std::vector<std::vector<std::uint64_t>>& sets, int zero_cap);

enum class SignClass { NonNegative, NonPositive, Mixed };
std::string to_string(SignClass s);
SignClass parse_sign_class(const std::string& s);

/// Storage of one coefficient across all LUT rows: v = sign * (stored << shift).
struct WidthPlan {
  SignClass sign = SignClass::NonNegative;
  int shift = 0;
  /// Magnitude bits; the stored field has one more bit for Mixed.
  int width = 0;

  int field_bits() const { return width + (sign == SignClass::Mixed ? 1 : 0); }
  bool representable(Wide v) const;
  /// Smallest representable value in [lo, hi), if any.
  std::optional<Wide> first_in(Wide lo, Wide hi) const;
  friend bool operator==(const WidthPlan&, const WidthPlan&) = default;
};

struct Triple {
  Wide a = 0, b = 0, c = 0;
  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// One (a, b) pair of a region with its admissible c values [c_lo, c_hi).
struct Candidate {
  Wide a = 0, b = 0;
  HalfOpenRange c;
};

enum class Step { SquareTruncation, LinearTruncation, WidthA, WidthB, WidthC };

/// Default order "ijabc"; any permutation of those letters is accepted.
std::vector<Step> parse_order(const std::string& order);

struct ExploreOptions {
  std::string order = "ijabc";
  /// Budget of candidates taken from the catalog over all regions, split
  /// evenly. A region over its share keeps the pairs nearest (0, 0).
  std::uint64_t candidate_cap = std::uint64_t{1} << 21;
  int threads = 1;
};

/// Working set of the decision procedure.
class Exploration {
 public:
  Exploration(const CoefficientCatalog& catalog, const ExploreOptions& opts = {});

  int offset_bits() const { return offset_bits_; }
  int k() const { return catalog_->k(); }
  int i() const { return i_; }
  int j() const { return j_; }
  const std::vector<std::vector<Candidate>>& candidates() const { return cands_; }
  bool truncated() const { return truncated_; }
  std::uint64_t candidate_count() const;

  /// Maximal i with every region keeping a candidate under x_t = x & ~(2^i - 1)
  /// in the square; prunes to the survivors.
  int max_square_truncation();
  /// Same for j in the linear term, with i fixed.
  int max_linear_truncation();
  /// Width pass for coefficient 0 (a), 1 (b) or 2 (c).
  WidthPlan coefficient_width_pass(int which);

  /// Survivors of truncation (i, j) without committing; empty vector when a
  /// region runs dry.
  std::vector<std::vector<Candidate>> survivors(int i, int j) const;
  const WidthPlan& plan(int which) const { return plans_[which]; }
  bool has_plan(int which) const { return have_plan_[which]; }

  /// First triple per region under (a, b, c) ascending.
  std::vector<Triple> select() const;

  /// Sets of values of coefficient `which` per region over the candidates.
  std::vector<IntervalSet> value_sets(int which) const;

 private:
  bool c_ok(const Candidate& c) const;
  void assert_nonempty(const char* pass) const;

  const CoefficientCatalog* catalog_;
  ExploreOptions opts_;
  int offset_bits_ = 0;
  int i_ = 0, j_ = 0;
  bool truncated_ = false;
  std::vector<std::vector<Candidate>> cands_;
  WidthPlan plans_[3];
  bool have_plan_[3] = {false, false, false};
};

/// Evaluates floor((a x_t^2 + b x_j + c) / 2^k) with x_t, x_j the offset with
/// its low i resp. j bits cleared.
Wide evaluate_polynomial(const Triple& t, std::uint64_t x, int k, int i, int j);

/// c-range of (a, b) under truncation (i, j).
HalfOpenRange c_interval_truncated(const RegionBounds& bounds, Wide a, Wide b, int k, int i, int j);

struct SelectedDesign {
  FixedFormat input;
  FixedFormat output;
  int lookup_bits = 0;
  int k = 0;
  int i = 0;
  int j = 0;
  WidthPlan a, b, c;
  std::vector<Triple> coefficients;
  /// Width pass fell back to the mixed sign class for some coefficient.
  bool mixed_fallback = false;
  /// Candidate enumeration was capped; the choice may not be optimal.
  bool incomplete = false;
};

struct ExploreLog {
  std::vector<std::string> lines;
};

/// Runs the full decision procedure in the configured order.
SelectedDesign explore(const CoefficientCatalog& catalog, const ExploreOptions& opts = {},
                       ExploreLog* log = nullptr);

}  // namespace polyspace
