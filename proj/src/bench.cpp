#include "polyspace/bench.hpp"

#include <chrono>
#include <cmath>

#include "polyspace/error.hpp"

namespace polyspace {

GenerationTiming time_generation(std::shared_ptr<const BoundTable> table, int lookup_bits,
                                 const SpaceOptions& opts, int repeats) {
  GenerationTiming out;
  out.lookup_bits = lookup_bits;
  for (int rep = 0; rep < std::max(repeats, 1); ++rep) {
    const auto start = std::chrono::steady_clock::now();
    const SpaceResult res = generate_space(table, lookup_bits, -1, opts);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (rep == 0 || s < out.seconds) out.seconds = s;
    out.k = res.shift.k;
    out.linear = res.catalog.linear_sufficient();
    out.stats = res.stats;
  }
  return out;
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ConfigError("slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    if (x <= 0 || y <= 0) throw ConfigError("log-log slope needs positive values");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  if (den == 0) throw ConfigError("slope needs distinct x values");
  return (n * sxy - sx * sy) / den;
}

}  // namespace polyspace
