#pragma once

// Timing of design-space generation.

#include <memory>
#include <utility>
#include <vector>

#include "polyspace/designspace.hpp"

namespace polyspace {

struct GenerationTiming {
  int lookup_bits = 0;
  /// Fastest wall-clock time over the repeats.
  double seconds = 0;
  int k = 0;
  bool linear = false;
  SearchStats stats;
};

/// Times generate_space (analysis, shift search and catalog) at the minimum k.
GenerationTiming time_generation(std::shared_ptr<const BoundTable> table, int lookup_bits,
                                 const SpaceOptions& opts, int repeats = 1);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace polyspace
