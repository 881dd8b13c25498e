#include "polyspace/explore.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

#include "polyspace/error.hpp"
#include "polyspace/parallel.hpp"

namespace polyspace {

IntervalSet normalize(IntervalSet set) {
  std::sort(set.begin(), set.end());
  IntervalSet out;
  for (const auto& iv : set) {
    if (iv.first > iv.second) continue;
    if (!out.empty() && iv.first <= out.back().second + 1) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

namespace {

bool contains_zero(const IntervalSet& s) {
  return std::any_of(s.begin(), s.end(), [](const auto& iv) { return iv.first <= 0 && 0 <= iv.second; });
}

// Largest j such that a multiple of 2^j lies in [lo, hi], lo >= 1.
int max_trailing_zeros(Wide lo, Wide hi) {
  for (int j = 126; j > 0; --j) {
    const Wide m = (hi >> j) << j;
    if (m >= lo) return j;
  }
  return 0;
}

// Smallest element of s that is a multiple of 2^t (s has no zero).
std::optional<Wide> smallest_multiple(const IntervalSet& s, int t) {
  for (const auto& [lo, hi] : s) {
    if (t >= 126) continue;
    const Wide step = Wide(1) << t;
    const Wide m = ceil_div(lo, step) * step;
    if (m <= hi) return m;
  }
  return std::nullopt;
}

}  // namespace

WidthResult minimize_width(std::span<const IntervalSet> raw_sets, int zero_cap) {
  if (raw_sets.empty()) throw ContractViolation("minimize_width needs at least one region");
  std::vector<IntervalSet> sets;
  sets.reserve(raw_sets.size());
  int T = -1;
  for (const auto& raw : raw_sets) {
    sets.push_back(normalize(raw));
    const auto& s = sets.back();
    if (s.empty()) throw ContractViolation("minimize_width over an empty value set");
    if (s.front().first < 0) throw ContractViolation("minimize_width needs non-negative values");
    int tr = 0;
    if (contains_zero(s)) {
      tr = zero_cap;
    } else {
      for (const auto& [lo, hi] : s) tr = std::max(tr, max_trailing_zeros(lo, hi));
    }
    T = T < 0 ? tr : std::min(T, tr);
  }
  WidthResult best;
  best.max_truncation = T;
  bool have = false;
  int best_p = 0;
  for (int t = 0; t <= T; ++t) {
    int worst = 0;
    bool first = true;
    for (const auto& s : sets) {
      int p;
      if (contains_zero(s)) {
        p = -t;
      } else {
        const auto m = smallest_multiple(s, t);
        if (!m) throw ContractViolation("minimize_width: truncation beyond T");
        p = bit_length(static_cast<UWide>(*m)) - t;
      }
      worst = first ? p : std::max(worst, p);
      first = false;
    }
    if (!have || worst < best_p) {
      have = true;
      best_p = worst;
      best.shift = t;
    }
  }
  best.width = std::max(best_p, 0);
  return best;
}

WidthResult minimize_width(const std::vector<std::vector<std::uint64_t>>& sets, int zero_cap) {
  std::vector<IntervalSet> iv(sets.size());
  for (std::size_t r = 0; r < sets.size(); ++r) {
    for (auto v : sets[r]) iv[r].emplace_back(static_cast<Wide>(v), static_cast<Wide>(v));
  }
  return minimize_width(std::span<const IntervalSet>(iv), zero_cap);
}

std::string to_string(SignClass s) {
  switch (s) {
    case SignClass::NonNegative: return "nonneg";
    case SignClass::NonPositive: return "nonpos";
    case SignClass::Mixed: return "mixed";
  }
  return "?";
}

SignClass parse_sign_class(const std::string& s) {
  if (s == "nonneg") return SignClass::NonNegative;
  if (s == "nonpos") return SignClass::NonPositive;
  if (s == "mixed") return SignClass::Mixed;
  throw FormatError("unknown sign class '" + s + "'");
}

namespace {

Wide max_magnitude(const WidthPlan& p) {
  if (p.width == 0) return 0;
  return checked_shl(checked_shl(1, p.width) - 1, p.shift);
}

}  // namespace

bool WidthPlan::representable(Wide v) const {
  if (sign == SignClass::NonNegative && v < 0) return false;
  if (sign == SignClass::NonPositive && v > 0) return false;
  if (v == 0) return true;
  const Wide mag = wide_abs(v);
  if (shift >= 126 || width >= 126) return false;
  if (mag & ((Wide(1) << shift) - 1)) return false;
  return (mag >> shift) < (Wide(1) << width);
}

std::optional<Wide> WidthPlan::first_in(Wide lo, Wide hi) const {
  const Wide mag = max_magnitude(*this);
  Wide lower = lo, upper = hi - 1;
  switch (sign) {
    case SignClass::NonNegative:
      lower = std::max<Wide>(lower, 0);
      upper = std::min(upper, mag);
      break;
    case SignClass::NonPositive:
      lower = std::max(lower, -mag);
      upper = std::min<Wide>(upper, 0);
      break;
    case SignClass::Mixed:
      lower = std::max(lower, -mag);
      upper = std::min(upper, mag);
      break;
  }
  if (lower > upper) return std::nullopt;
  if (mag == 0) return lower <= 0 && 0 <= upper ? std::optional<Wide>(0) : std::nullopt;
  const Wide step = Wide(1) << shift;
  const Wide v = ceil_div(lower, step) * step;
  if (v > upper) return std::nullopt;
  return v;
}

std::vector<Step> parse_order(const std::string& order) {
  std::string sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != "abcij") {
    throw ConfigError("decision order '" + order + "' is not a permutation of 'ijabc'");
  }
  std::vector<Step> steps;
  for (char ch : order) {
    switch (ch) {
      case 'i': steps.push_back(Step::SquareTruncation); break;
      case 'j': steps.push_back(Step::LinearTruncation); break;
      case 'a': steps.push_back(Step::WidthA); break;
      case 'b': steps.push_back(Step::WidthB); break;
      default: steps.push_back(Step::WidthC); break;
    }
  }
  return steps;
}

Wide evaluate_polynomial(const Triple& t, std::uint64_t x, int k, int i, int j) {
  const std::uint64_t xt = i >= 64 ? 0 : (x >> i) << i;
  const std::uint64_t xj = j >= 64 ? 0 : (x >> j) << j;
  const Wide sq = checked_mul(static_cast<Wide>(xt), static_cast<Wide>(xt));
  const Wide v = checked_add(checked_add(checked_mul(t.a, sq), checked_mul(t.b, static_cast<Wide>(xj))), t.c);
  return floor_div(v, checked_shl(1, k));
}

HalfOpenRange c_interval_truncated(const RegionBounds& bounds, Wide a, Wide b, int k, int i, int j) {
  const std::size_t n = bounds.size();
  Wide lo = 0, hi = 0;
  for (std::size_t x = 0; x < n; ++x) {
    const std::uint64_t xt = i >= 64 ? 0 : (x >> i) << i;
    const std::uint64_t xj = j >= 64 ? 0 : (x >> j) << j;
    const Wide poly = checked_add(checked_mul(a, checked_mul(Wide(xt), Wide(xt))), checked_mul(b, Wide(xj)));
    const Wide low = checked_sub(checked_shl(bounds.lower[x], k), poly);
    const Wide high = checked_sub(checked_shl(bounds.upper[x] + 1, k), poly);
    if (x == 0 || low > lo) lo = low;
    if (x == 0 || high < hi) hi = high;
  }
  return {lo, hi};
}

Exploration::Exploration(const CoefficientCatalog& catalog, const ExploreOptions& opts)
    : catalog_(&catalog), opts_(opts) {
  offset_bits_ = catalog.table().input().width() - catalog.lookup_bits();
  truncated_ = !catalog.complete();
  const std::size_t regions = catalog.regions().size();
  const std::uint64_t cap = std::max<std::uint64_t>(1, opts_.candidate_cap / std::max<std::size_t>(regions, 1));
  cands_.resize(regions);
  for (const auto& reg : catalog.regions()) {
    auto& list = cands_[reg.region];
    auto add = [&](Wide a, Wide b) {
      const HalfOpenRange c = catalog.c_range(reg.region, a, b);
      if (!c.empty()) list.push_back({a, b, c});
    };
    if (catalog.pair_count(reg.region) <= cap) {
      for (const auto& ar : reg.b_ranges)
        for (Wide b = ar.b.lo; b <= ar.b.hi; ++b) add(ar.a, b);
      continue;
    }
    truncated_ = true;
    std::vector<const ARange*> by_size;
    for (const auto& ar : reg.b_ranges) by_size.push_back(&ar);
    std::stable_sort(by_size.begin(), by_size.end(),
                     [](const ARange* x, const ARange* y) { return wide_abs(x->a) < wide_abs(y->a); });
    std::uint64_t left = cap;
    for (std::size_t n = 0; n < by_size.size() && left > 0; ++n) {
      const ARange& ar = *by_size[n];
      const std::uint64_t share = std::max<std::uint64_t>(1, left / (by_size.size() - n));
      const IntRange bs = enumeration_window(ar.b, share);
      for (Wide b = bs.lo; b <= bs.hi; ++b) add(ar.a, b);
      left -= std::min<std::uint64_t>(left, static_cast<std::uint64_t>(bs.size()));
    }
    std::sort(list.begin(), list.end(), [](const Candidate& x, const Candidate& y) {
      return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
  }
  assert_nonempty("catalog");
}

std::uint64_t Exploration::candidate_count() const {
  std::uint64_t n = 0;
  for (const auto& l : cands_) n += l.size();
  return n;
}

bool Exploration::c_ok(const Candidate& c) const {
  if (c.c.empty()) return false;
  if (!have_plan_[2]) return true;
  return plans_[2].first_in(c.c.lo, c.c.hi).has_value();
}

void Exploration::assert_nonempty(const char* pass) const {
  for (std::size_t r = 0; r < cands_.size(); ++r) {
    if (cands_[r].empty()) {
      throw ContractViolation(std::string("region ") + std::to_string(r) + " empty after " + pass);
    }
  }
}

std::vector<std::vector<Candidate>> Exploration::survivors(int i, int j) const {
  std::vector<std::vector<Candidate>> out(cands_.size());
  std::atomic<bool> dry{false};
  const int k = catalog_->k();
  parallel_for(cands_.size(), opts_.threads, [&](std::size_t r) {
    if (dry.load()) return;
    const RegionBounds bounds = catalog_->bounds(r);
    for (const auto& cand : cands_[r]) {
      const HalfOpenRange t = c_interval_truncated(bounds, cand.a, cand.b, k, i, j);
      Candidate next = cand;
      next.c = {std::max(cand.c.lo, t.lo), std::min(cand.c.hi, t.hi)};
      if (c_ok(next)) out[r].push_back(next);
    }
    if (out[r].empty()) dry = true;
  });
  if (dry.load()) return {};
  return out;
}

int Exploration::max_square_truncation() {
  for (int i = offset_bits_; i > i_; --i) {
    auto next = survivors(i, j_);
    if (!next.empty()) {
      cands_ = std::move(next);
      i_ = i;
      break;
    }
  }
  assert_nonempty("square truncation");
  return i_;
}

int Exploration::max_linear_truncation() {
  for (int j = offset_bits_; j > j_; --j) {
    auto next = survivors(i_, j);
    if (!next.empty()) {
      cands_ = std::move(next);
      j_ = j;
      break;
    }
  }
  assert_nonempty("linear truncation");
  return j_;
}

std::vector<IntervalSet> Exploration::value_sets(int which) const {
  std::vector<IntervalSet> out(cands_.size());
  for (std::size_t r = 0; r < cands_.size(); ++r) {
    IntervalSet s;
    for (const auto& c : cands_[r]) {
      if (which == 0) s.emplace_back(c.a, c.a);
      else if (which == 1) s.emplace_back(c.b, c.b);
      else s.emplace_back(c.c.lo, c.c.hi - 1);
    }
    out[r] = normalize(std::move(s));
  }
  return out;
}

namespace {

IntervalSet nonneg_part(const IntervalSet& s) {
  IntervalSet out;
  for (const auto& [lo, hi] : s) {
    if (hi >= 0) out.emplace_back(std::max<Wide>(lo, 0), hi);
  }
  return out;
}

IntervalSet nonpos_magnitudes(const IntervalSet& s) {
  IntervalSet out;
  for (const auto& [lo, hi] : s) {
    if (lo <= 0) out.emplace_back(-std::min<Wide>(hi, 0), -lo);
  }
  return normalize(std::move(out));
}

IntervalSet magnitudes(const IntervalSet& s) {
  IntervalSet out = nonneg_part(s);
  for (const auto& iv : nonpos_magnitudes(s)) out.push_back(iv);
  return normalize(std::move(out));
}

bool all_nonempty(const std::vector<IntervalSet>& sets) {
  return std::none_of(sets.begin(), sets.end(), [](const auto& s) { return s.empty(); });
}

}  // namespace

WidthPlan Exploration::coefficient_width_pass(int which) {
  if (which < 0 || which > 2) throw ContractViolation("coefficient index out of range");
  const int zero_cap = catalog_->table().output().width() + 8;
  const auto sets = value_sets(which);
  std::vector<IntervalSet> pos, neg;
  for (const auto& s : sets) {
    pos.push_back(nonneg_part(s));
    neg.push_back(nonpos_magnitudes(s));
  }
  WidthPlan plan;
  const bool pos_ok = all_nonempty(pos), neg_ok = all_nonempty(neg);
  if (pos_ok || neg_ok) {
    std::optional<WidthResult> wp, wn;
    if (pos_ok) wp = minimize_width(std::span<const IntervalSet>(pos), zero_cap);
    if (neg_ok) wn = minimize_width(std::span<const IntervalSet>(neg), zero_cap);
    if (wp && (!wn || wp->width <= wn->width)) {
      plan = {SignClass::NonNegative, wp->shift, wp->width};
    } else {
      plan = {SignClass::NonPositive, wn->shift, wn->width};
    }
  } else {
    std::vector<IntervalSet> mags;
    for (const auto& s : sets) mags.push_back(magnitudes(s));
    const WidthResult w = minimize_width(std::span<const IntervalSet>(mags), zero_cap);
    plan = {SignClass::Mixed, w.shift, w.width};
  }
  plans_[which] = plan;
  have_plan_[which] = true;
  for (auto& list : cands_) {
    std::erase_if(list, [&](const Candidate& c) {
      if (which == 0) return !plan.representable(c.a);
      if (which == 1) return !plan.representable(c.b);
      return !c_ok(c);
    });
  }
  assert_nonempty(which == 0 ? "a width pass" : which == 1 ? "b width pass" : "c width pass");
  return plan;
}

std::vector<Triple> Exploration::select() const {
  std::vector<Triple> out;
  out.reserve(cands_.size());
  for (std::size_t r = 0; r < cands_.size(); ++r) {
    const Candidate* best = nullptr;
    for (const auto& c : cands_[r]) {
      if (!c_ok(c)) continue;
      if (!best || c.a < best->a || (c.a == best->a && c.b < best->b)) best = &c;
    }
    if (!best) throw ContractViolation("region " + std::to_string(r) + " has no candidate to select");
    const Wide c = have_plan_[2] ? *plans_[2].first_in(best->c.lo, best->c.hi) : best->c.lo;
    out.push_back({best->a, best->b, c});
  }
  return out;
}

SelectedDesign explore(const CoefficientCatalog& catalog, const ExploreOptions& opts,
                       ExploreLog* log) {
  const auto steps = parse_order(opts.order);
  Exploration ex(catalog, opts);
  auto note = [&](const std::string& s) {
    if (log) log->lines.push_back(s);
  };
  note("k = " + std::to_string(catalog.k()) + ", candidates = " + std::to_string(ex.candidate_count()));
  for (Step step : steps) {
    switch (step) {
      case Step::SquareTruncation:
        note("square truncation i = " + std::to_string(ex.max_square_truncation()) +
             ", candidates = " + std::to_string(ex.candidate_count()));
        break;
      case Step::LinearTruncation:
        note("linear truncation j = " + std::to_string(ex.max_linear_truncation()) +
             ", candidates = " + std::to_string(ex.candidate_count()));
        break;
      case Step::WidthA:
      case Step::WidthB:
      case Step::WidthC: {
        const int which = step == Step::WidthA ? 0 : step == Step::WidthB ? 1 : 2;
        const WidthPlan p = ex.coefficient_width_pass(which);
        note(std::string(1, "abc"[which]) + " width: " + to_string(p.sign) + " shift " +
             std::to_string(p.shift) + " width " + std::to_string(p.width) + ", candidates = " +
             std::to_string(ex.candidate_count()));
        break;
      }
    }
  }
  SelectedDesign d;
  d.input = catalog.table().input();
  d.output = catalog.table().output();
  d.lookup_bits = catalog.lookup_bits();
  d.k = catalog.k();
  d.i = ex.i();
  d.j = ex.j();
  d.a = ex.plan(0);
  d.b = ex.plan(1);
  d.c = ex.plan(2);
  d.coefficients = ex.select();
  d.mixed_fallback = d.a.sign == SignClass::Mixed || d.b.sign == SignClass::Mixed ||
                     d.c.sign == SignClass::Mixed;
  d.incomplete = ex.truncated();
  return d;
}

}  // namespace polyspace
