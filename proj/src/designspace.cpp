#include "polyspace/designspace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "polyspace/error.hpp"
#include "polyspace/parallel.hpp"

namespace polyspace {

namespace {

Wide window_limit(int window_bits) { return checked_shl(1, window_bits); }

int bits_of(Wide v) { return bit_length(static_cast<UWide>(wide_abs(v))); }

}  // namespace

SecondDifferenceBounds second_difference_bounds(const ChordTables& tables, bool use_skip,
                                                SearchStats* stats) {
  SecondDifferenceBounds out;
  out.lower = extremal_chord_search(tables.lower, tables.upper, SearchMode::Max, use_skip, stats);
  out.upper = extremal_chord_search(tables.upper, tables.lower, SearchMode::Min, use_skip, stats);
  return out;
}

RegionAnalysis analyze_region(const RegionBounds& bounds, std::uint64_t region, bool use_skip,
                              SearchStats* stats) {
  RegionAnalysis out;
  out.region = region;
  out.points = bounds.size();
  out.tables = chord_tables(bounds, region);
  for (std::size_t i = 0; i < out.tables.size(); ++i) {
    if (out.tables.lower[i] >= out.tables.upper[i]) {
      out.pointwise = false;
      out.failing_t = i + 1;
      break;
    }
  }
  if (!out.pointwise) return out;
  out.curvature = second_difference_bounds(out.tables, use_skip, stats);
  out.feasible = !out.curvature.lower || out.curvature.lower->value < out.curvature.upper->value;
  return out;
}

std::vector<RegionAnalysis> analyze_regions(const BoundTable& table, int lookup_bits,
                                            const SpaceOptions& opts, SearchStats* stats) {
  if (lookup_bits < 0 || lookup_bits > table.input().width()) {
    throw ConfigError("lookup bits R=" + std::to_string(lookup_bits) + " outside [0, " +
                      std::to_string(table.input().width()) + "]");
  }
  const std::size_t count = std::size_t{1} << lookup_bits;
  std::vector<RegionAnalysis> out(count);
  std::vector<SearchStats> per(count);
  parallel_for(count, opts.threads, [&](std::size_t r) {
    out[r] = analyze_region(table.region(lookup_bits, r), r, opts.use_skip, &per[r]);
  });
  if (stats) {
    for (const auto& s : per) {
      stats->pairs += s.pairs;
      stats->rows_scanned += s.rows_scanned;
      stats->rows_skipped += s.rows_skipped;
    }
  }
  return out;
}

bool region_feasible(const ChordTables& tables, bool use_skip) {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables.lower[i] >= tables.upper[i]) return false;
  }
  const auto bounds = second_difference_bounds(tables, use_skip);
  return !bounds.lower || bounds.lower->value < bounds.upper->value;
}

IntRange a_interval(const RegionAnalysis& region, int k, int window_bits) {
  const Wide w = window_limit(window_bits);
  IntRange out{-w, w};
  if (region.curvature.lower) out.lo = region.curvature.lower->value.scaled_pow2(k).next_int_above();
  if (region.curvature.upper) out.hi = region.curvature.upper->value.scaled_pow2(k).next_int_below();
  return out;
}

IntRange a_interval(const ChordTables& tables, int k, int window_bits) {
  RegionAnalysis tmp;
  tmp.curvature = second_difference_bounds(tables);
  return a_interval(tmp, k, window_bits);
}

IntRange b_interval(const ChordTables& tables, Wide a, int k, int window_bits) {
  if (tables.empty()) {
    const Wide w = window_limit(window_bits);
    return {-w, w};
  }
  // max_t (2^k M(t) - a t) and min_t (2^k m(t) - a t), as fractions over den(t)
  Wide lo_num = 0, lo_den = 0, hi_num = 0, hi_den = 0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const Wide t = static_cast<Wide>(i + 1);
    const Rational& lo = tables.lower[i];
    const Rational& hi = tables.upper[i];
    const Wide ln = checked_sub(checked_shl(lo.num(), k), checked_mul(checked_mul(a, t), lo.den()));
    const Wide hn = checked_sub(checked_shl(hi.num(), k), checked_mul(checked_mul(a, t), hi.den()));
    if (lo_den == 0 || compare_fractions(ln, lo.den(), lo_num, lo_den) > 0) {
      lo_num = ln;
      lo_den = lo.den();
    }
    if (hi_den == 0 || compare_fractions(hn, hi.den(), hi_num, hi_den) < 0) {
      hi_num = hn;
      hi_den = hi.den();
    }
  }
  return {floor_div(lo_num, lo_den) + 1, ceil_div(hi_num, hi_den) - 1};
}

HalfOpenRange c_interval(const RegionBounds& bounds, Wide a, Wide b, int k) {
  const std::size_t n = bounds.size();
  if (n == 0) throw ContractViolation("c_interval over an empty region");
  const int xb = bit_length(static_cast<UWide>(n));
  const bool fast = bits_of(a) + 2 * xb < 120 && bits_of(b) + xb < 120 && k + 64 < 120;
  Wide lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Wide x = static_cast<Wide>(i);
    Wide poly, low, high;
    if (fast) {
      poly = a * x * x + b * x;
      low = (Wide(bounds.lower[i]) << k) - poly;
      high = (Wide(bounds.upper[i] + 1) << k) - poly;
    } else {
      poly = checked_add(checked_mul(checked_mul(a, x), x), checked_mul(b, x));
      low = checked_sub(checked_shl(bounds.lower[i], k), poly);
      high = checked_sub(checked_shl(bounds.upper[i] + 1, k), poly);
    }
    if (i == 0 || low > lo) lo = low;
    if (i == 0 || high < hi) hi = high;
  }
  return {lo, hi};
}

IntRange enumeration_window(const IntRange& a, std::uint64_t cap) {
  if (a.empty() || cap == 0) return {0, -1};
  if (a.size() <= static_cast<Wide>(cap)) return a;
  const Wide half = static_cast<Wide>(cap / 2);
  Wide lo = -half;
  lo = std::clamp(lo, a.lo, a.hi - static_cast<Wide>(cap) + 1);
  return {lo, lo + static_cast<Wide>(cap) - 1};
}

bool region_feasible_at(const RegionAnalysis& region, int k, int window_bits, std::uint64_t cap) {
  if (!region.feasible) return false;
  const IntRange as = enumeration_window(a_interval(region, k, window_bits), cap);
  for (Wide a = as.lo; a <= as.hi; ++a) {
    if (!b_interval(region.tables, a, k, window_bits).empty()) return true;
  }
  return false;
}

FeasibilitySweep min_feasible_R(const BoundTable& table, int r_max, const SpaceOptions& opts,
                                int r_min, bool full) {
  const int width = table.input().width();
  if (r_max > width || r_max < 0) {
    throw ConfigError("R_max=" + std::to_string(r_max) + " outside [0, " + std::to_string(width) + "]");
  }
  FeasibilitySweep out;
  for (int R = std::max(r_min, 0); R <= r_max; ++R) {
    const std::size_t count = std::size_t{1} << R;
    std::vector<char> ok(count, 0);
    parallel_for(count, opts.threads, [&](std::size_t r) {
      ok[r] = analyze_region(table.region(R, r), r, opts.use_skip).feasible ? 1 : 0;
    });
    FeasibilityRow row;
    row.lookup_bits = R;
    row.regions = count;
    for (std::size_t r = 0; r < count; ++r) {
      if (!ok[r]) {
        ++row.infeasible;
        if (!row.first_failure) row.first_failure = r;
      }
    }
    out.rows.push_back(row);
    if (row.infeasible == 0 && !out.min_lookup_bits) {
      out.min_lookup_bits = R;
      if (!full) break;
    }
  }
  return out;
}

ShiftResult min_global_k(const std::vector<RegionAnalysis>& regions, const FixedFormat& out,
                         const SpaceOptions& opts) {
  const int k_max = opts.resolved_k_max(out);
  const int window = opts.resolved_window(out);
  for (const auto& reg : regions) {
    if (!reg.feasible) {
      throw GenerationError("region " + std::to_string(reg.region) + " admits no polynomial",
                            static_cast<long>(reg.region));
    }
  }
  const std::uint64_t cap = opts.region_cap(regions.size());
  ShiftResult res;
  res.region_k.assign(regions.size(), -1);
  parallel_for(regions.size(), opts.threads, [&](std::size_t r) {
    for (int k = 0; k <= k_max; ++k) {
      if (region_feasible_at(regions[r], k, window, cap)) {
        res.region_k[r] = k;
        return;
      }
    }
  });
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (res.region_k[r] < 0) {
      throw ResourceLimitError("region " + std::to_string(r) + " needs k > k_max=" +
                               std::to_string(k_max));
    }
    res.k = std::max(res.k, res.region_k[r]);
  }
  return res;
}

CoefficientCatalog::CoefficientCatalog(std::shared_ptr<const BoundTable> table, int lookup_bits,
                                       int k, std::vector<RegionCatalog> regions,
                                       bool linear_sufficient)
    : table_(std::move(table)),
      lookup_bits_(lookup_bits),
      k_(k),
      linear_(linear_sufficient),
      regions_(std::move(regions)) {}

bool CoefficientCatalog::complete() const {
  return std::none_of(regions_.begin(), regions_.end(), [](const auto& r) { return r.truncated; });
}

HalfOpenRange CoefficientCatalog::c_range(std::uint64_t r, Wide a, Wide b) const {
  return c_interval(bounds(r), a, b, k_);
}

std::uint64_t CoefficientCatalog::pair_count(std::uint64_t r) const {
  std::uint64_t n = 0;
  for (const auto& ar : regions_.at(r).b_ranges) n += static_cast<std::uint64_t>(ar.b.size());
  return n;
}

bool CoefficientCatalog::contains(std::uint64_t r, Wide a, Wide b, Wide c) const {
  const auto& reg = regions_.at(r);
  const auto it = std::lower_bound(reg.b_ranges.begin(), reg.b_ranges.end(), a,
                                   [](const ARange& ar, Wide v) { return ar.a < v; });
  if (it == reg.b_ranges.end() || it->a != a || !it->b.contains(b)) return false;
  return c_range(r, a, b).contains(c);
}

CoefficientCatalog generate_space(std::shared_ptr<const BoundTable> table,
                                  const std::vector<RegionAnalysis>& regions, int lookup_bits,
                                  int k, const SpaceOptions& opts) {
  const int window = opts.resolved_window(table->output());
  const std::uint64_t cap = opts.region_cap(regions.size());
  std::vector<RegionCatalog> cats(regions.size());
  parallel_for(regions.size(), opts.threads, [&](std::size_t r) {
    RegionCatalog& cat = cats[r];
    cat.region = r;
    if (!regions[r].feasible) return;
    cat.a = a_interval(regions[r], k, window);
    const IntRange as = enumeration_window(cat.a, cap);
    cat.truncated = as.size() < cat.a.size();
    for (Wide a = as.lo; a <= as.hi; ++a) {
      const IntRange b = b_interval(regions[r].tables, a, k, window);
      if (!b.empty()) cat.b_ranges.push_back({a, b});
    }
  });
  bool linear = true;
  for (std::size_t r = 0; r < cats.size(); ++r) {
    if (cats[r].b_ranges.empty()) {
      throw GenerationError("region " + std::to_string(r) + " has no feasible polynomial at k=" +
                                std::to_string(k),
                            static_cast<long>(r));
    }
    linear = linear && cats[r].a.contains(0);
  }
  return CoefficientCatalog(std::move(table), lookup_bits, k, std::move(cats), linear);
}

SpaceResult generate_space(std::shared_ptr<const BoundTable> table, int lookup_bits, int k,
                           const SpaceOptions& opts) {
  SpaceResult out;
  const auto regions = analyze_regions(*table, lookup_bits, opts, &out.stats);
  if (k < 0) {
    out.shift = min_global_k(regions, table->output(), opts);
    k = out.shift.k;
  } else {
    out.shift.k = k;
  }
  out.catalog = generate_space(std::move(table), regions, lookup_bits, k, opts);
  return out;
}

void write_catalog(std::ostream& os, const CoefficientCatalog& catalog) {
  const auto& in = catalog.table().input();
  const auto& out = catalog.table().output();
  os << "catalog v1\n";
  os << "format n " << in.int_bits << " m " << in.frac_bits << " p " << out.int_bits << " q "
     << out.frac_bits << '\n';
  os << "space R " << catalog.lookup_bits() << " k " << catalog.k() << " linear "
     << (catalog.linear_sufficient() ? 1 : 0) << " complete " << (catalog.complete() ? 1 : 0)
     << '\n';
  for (const auto& reg : catalog.regions()) {
    os << "region " << reg.region << " a " << to_string(reg.a.lo) << ' ' << to_string(reg.a.hi)
       << " truncated " << (reg.truncated ? 1 : 0) << '\n';
    for (const auto& ar : reg.b_ranges) {
      os << "ab " << to_string(ar.a) << ' ' << to_string(ar.b.lo) << ' ' << to_string(ar.b.hi)
         << '\n';
      if (ar.b.size() > 4096) continue;  // c records only for enumerable b-ranges
      for (Wide b = ar.b.lo; b <= ar.b.hi; ++b) {
        const auto c = catalog.c_range(reg.region, ar.a, b);
        os << "c " << to_string(ar.a) << ' ' << to_string(b) << ' ' << to_string(c.lo) << ' '
           << to_string(c.hi) << '\n';
      }
    }
  }
  os << "end\n";
}

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream ls(line);
  std::vector<std::string> words;
  for (std::string w; ls >> w;) words.push_back(w);
  return words;
}

void expect(bool cond, const std::string& what, std::size_t line_no) {
  if (!cond) throw FormatError("catalog: " + what + " on line " + std::to_string(line_no));
}

}  // namespace

CoefficientCatalog read_catalog(std::istream& is, std::shared_ptr<const BoundTable> table) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::vector<std::string> {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      return split_words(line);
    }
    return {};
  };
  auto w = next();
  expect(w.size() == 2 && w[0] == "catalog" && w[1] == "v1", "bad magic", line_no);
  w = next();
  expect(w.size() == 9 && w[0] == "format" && w[1] == "n" && w[3] == "m" && w[5] == "p" &&
             w[7] == "q",
         "bad format line", line_no);
  const FixedFormat in{std::stoi(w[2]), std::stoi(w[4])};
  const FixedFormat out{std::stoi(w[6]), std::stoi(w[8])};
  expect(in == table->input() && out == table->output(), "formats differ from the bound table",
         line_no);
  w = next();
  expect(w.size() == 9 && w[0] == "space" && w[1] == "R" && w[3] == "k" && w[5] == "linear" &&
             w[7] == "complete",
         "bad space line", line_no);
  const int R = std::stoi(w[2]);
  const int k = std::stoi(w[4]);
  const bool linear = w[6] == "1";
  expect(R >= 0 && R <= in.width() && k >= 0, "R or k out of range", line_no);
  std::vector<RegionCatalog> regions;
  bool ended = false;
  for (w = next(); !w.empty(); w = next()) {
    if (w[0] == "end") {
      ended = true;
      break;
    }
    if (w[0] == "region") {
      expect(w.size() == 7 && w[2] == "a" && w[5] == "truncated", "bad region line", line_no);
      expect(std::stoull(w[1]) == regions.size(), "regions out of order", line_no);
      RegionCatalog reg;
      reg.region = regions.size();
      reg.a = {parse_wide(w[3]), parse_wide(w[4])};
      reg.truncated = w[6] == "1";
      regions.push_back(reg);
    } else if (w[0] == "ab") {
      expect(w.size() == 4 && !regions.empty(), "bad ab line", line_no);
      auto& reg = regions.back();
      ARange ar{parse_wide(w[1]), {parse_wide(w[2]), parse_wide(w[3])}};
      expect(reg.b_ranges.empty() || reg.b_ranges.back().a < ar.a, "a values not ascending", line_no);
      reg.b_ranges.push_back(ar);
    } else if (w[0] == "c") {
      expect(w.size() == 5 && !regions.empty() && !regions.back().b_ranges.empty(), "bad c line",
             line_no);
      const Wide a = parse_wide(w[1]), b = parse_wide(w[2]);
      const HalfOpenRange c{parse_wide(w[3]), parse_wide(w[4])};
      expect(regions.back().b_ranges.back().a == a, "c record outside its ab block", line_no);
      expect(c_interval(table->region(R, regions.back().region), a, b, k) == c,
             "c range disagrees with the bound table", line_no);
    } else {
      expect(false, "unknown record '" + w[0] + "'", line_no);
    }
  }
  expect(ended, "missing end", line_no);
  expect(regions.size() == (std::size_t{1} << R), "wrong region count", line_no);
  return CoefficientCatalog(std::move(table), R, k, std::move(regions), linear);
}

}  // namespace polyspace
