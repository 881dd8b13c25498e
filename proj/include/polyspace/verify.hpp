#pragma once

// Bit-exact reference evaluator and brute-force oracles.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyspace/bounds.hpp"
#include "polyspace/chord.hpp"
#include "polyspace/emit.hpp"

namespace polyspace {

/// floor((a x_t^2 + b x_j + c) / 2^k) using the coefficients unpacked from
/// the LUT, saturated to the output format only when hw.clamp is set.
Wide evaluate(const HardwareDesign& hw, std::uint64_t z);

struct Counterexample {
  std::uint64_t z = 0;
  Wide output = 0;
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

struct CheckReport {
  bool passed = false;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  /// min over checked inputs of min(out - l, u - out); negative on failure.
  Wide worst_slack = 0;
  std::optional<Counterexample> first_failure;
  /// slack value -> number of inputs
  std::map<std::int64_t, std::uint64_t> slack_histogram;

  std::string text() const;
  std::string json() const;
};

struct CheckOptions {
  /// 0 checks every input; otherwise this many inputs drawn with `seed`.
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  int threads = 1;
};

CheckReport check_design(const HardwareDesign& hw, const BoundTable& table,
                         const CheckOptions& opts = {});

/// Coefficient windows for oracle_space: a in [-a_max, a_max], etc.
struct OracleWindows {
  std::int64_t a_max = 64;
  std::int64_t b_max = 64;
  std::int64_t c_max = 4096;
};

/// Every triple inside the windows satisfying l <= floor(p(x) / 2^k) <= u
/// for all offsets, found by direct enumeration. Inputs limited to 8 bits.
std::vector<std::vector<Triple>> oracle_space(const BoundTable& table, int lookup_bits, int k,
                                              const OracleWindows& windows);

/// O(N^2) scan of D(x, y) = (G[y] - H[x]) / (y - x), x < y, in plain
/// rational arithmetic. Ties keep the smallest x, then the smallest y.
std::optional<ChordExtremum> naive_chord_search(std::span<const Rational> g,
                                                std::span<const Rational> h, SearchMode mode);

}  // namespace polyspace
