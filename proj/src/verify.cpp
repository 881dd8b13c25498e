#include "polyspace/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polyspace/error.hpp"
#include "polyspace/parallel.hpp"

namespace polyspace {

Wide evaluate(const HardwareDesign& hw, std::uint64_t z) {
  const auto& d = hw.design;
  const InputSplit s = split_input(z, d.lookup_bits, d.input);
  const Triple t = unpack_row(hw, hw.rows.at(s.region));
  Wide out = evaluate_polynomial(t, s.offset, d.k, d.i, d.j);
  if (hw.clamp) out = std::clamp<Wide>(out, 0, (Wide(1) << d.output.width()) - 1);
  return out;
}

CheckReport check_design(const HardwareDesign& hw, const BoundTable& table, const CheckOptions& opts) {
  if (!(hw.design.input == table.input()) || !(hw.design.output == table.output())) {
    throw ConfigError("design and bound table formats differ");
  }
  std::vector<std::uint64_t> inputs;
  const std::uint64_t total = table.size();
  const bool sampled = opts.samples > 0 && opts.samples < total;
  if (sampled) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    inputs.resize(opts.samples);
    for (auto& z : inputs) z = pick(rng);
  }
  const std::uint64_t count = sampled ? inputs.size() : total;

  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  struct Partial {
    std::uint64_t failures = 0;
    Wide worst = 0;
    bool have = false;
    std::optional<Counterexample> first;
    std::map<std::int64_t, std::uint64_t> hist;
  };
  std::vector<Partial> parts(chunks);
  parallel_for(chunks, opts.threads, [&](std::size_t ci) {
    Partial& p = parts[ci];
    const std::uint64_t end = std::min<std::uint64_t>(count, (ci + 1) * kChunk);
    for (std::uint64_t idx = ci * kChunk; idx < end; ++idx) {
      const std::uint64_t z = sampled ? inputs[idx] : idx;
      const Wide out = evaluate(hw, z);
      const Wide slack = std::min<Wide>(out - table.lower(z), table.upper(z) - out);
      if (!p.have || slack < p.worst) p.worst = slack;
      p.have = true;
      ++p.hist[static_cast<std::int64_t>(std::clamp<Wide>(slack, INT64_MIN, INT64_MAX))];
      if (slack < 0) {
        ++p.failures;
        if (!p.first) p.first = Counterexample{z, out, table.lower(z), table.upper(z)};
      }
    }
  });
  CheckReport rep;
  rep.checked = count;
  bool have = false;
  for (const auto& p : parts) {
    rep.failures += p.failures;
    if (p.have && (!have || p.worst < rep.worst_slack)) rep.worst_slack = p.worst;
    have = have || p.have;
    if (!rep.first_failure && p.first) rep.first_failure = p.first;
    for (const auto& [s, n] : p.hist) rep.slack_histogram[s] += n;
  }
  rep.passed = rep.failures == 0;
  return rep;
}

std::string CheckReport::text() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << ": " << checked << " inputs checked, " << failures
     << " outside bounds, worst slack " << to_string(worst_slack) << '\n';
  if (first_failure) {
    os << "first counterexample: Z=" << first_failure->z << " output " << to_string(first_failure->output)
       << " bounds [" << first_failure->lower << ", " << first_failure->upper << "]\n";
  }
  os << "slack histogram:";
  for (const auto& [s, n] : slack_histogram) os << ' ' << s << ':' << n;
  os << '\n';
  return os.str();
}

std::string CheckReport::json() const {
  nlohmann::json j;
  j["passed"] = passed;
  j["checked"] = checked;
  j["failures"] = failures;
  j["worst_slack"] = to_string(worst_slack);
  if (first_failure) {
    j["counterexample"] = {{"z", first_failure->z},
                           {"output", to_string(first_failure->output)},
                           {"lower", first_failure->lower},
                           {"upper", first_failure->upper}};
  } else {
    j["counterexample"] = nullptr;
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [s, n] : slack_histogram) hist[std::to_string(s)] = n;
  j["slack_histogram"] = hist;
  return j.dump(2);
}

std::vector<std::vector<Triple>> oracle_space(const BoundTable& table, int lookup_bits, int k,
                                              const OracleWindows& windows) {
  if (table.input().width() > 8) throw ResourceLimitError("oracle_space is limited to 8 input bits");
  const double work = double(2 * windows.a_max + 1) * double(2 * windows.b_max + 1) *
                      double(2 * windows.c_max + 1);
  if (work > 4e9) throw ResourceLimitError("oracle_space windows too large");
  const std::size_t regions = std::size_t{1} << lookup_bits;
  std::vector<std::vector<Triple>> out(regions);
  const std::int64_t scale = std::int64_t{1} << k;
  for (std::size_t r = 0; r < regions; ++r) {
    const RegionBounds rb = table.region(lookup_bits, r);
    const std::int64_t n = static_cast<std::int64_t>(rb.size());
    for (std::int64_t a = -windows.a_max; a <= windows.a_max; ++a) {
      for (std::int64_t b = -windows.b_max; b <= windows.b_max; ++b) {
        // at x = 0 the polynomial is c itself, which pins c to one block of 2^k values
        const std::int64_t c_lo = std::max(-windows.c_max, rb.lower[0] * scale);
        const std::int64_t c_hi = std::min(windows.c_max, (rb.upper[0] + 1) * scale - 1);
        for (std::int64_t c = c_lo; c <= c_hi; ++c) {
          bool ok = true;
          for (std::int64_t x = 0; x < n && ok; ++x) {
            const std::int64_t v = a * x * x + b * x + c;
            // floor division by 2^k
            const std::int64_t q = v >= 0 ? v / scale : -((-v + scale - 1) / scale);
            ok = rb.lower[x] <= q && q <= rb.upper[x];
          }
          if (ok) out[r].push_back({a, b, c});
        }
      }
    }
  }
  return out;
}

std::optional<ChordExtremum> naive_chord_search(std::span<const Rational> g,
                                                std::span<const Rational> h, SearchMode mode) {
  if (g.size() != h.size()) throw ContractViolation("chord search over mismatched arrays");
  if (g.size() < 2) return std::nullopt;
  std::optional<ChordExtremum> best;
  for (std::size_t x = 0; x + 1 < g.size(); ++x) {
    for (std::size_t y = x + 1; y < g.size(); ++y) {
      const Rational d = (g[y] - h[x]) / Rational(static_cast<Wide>(y - x));
      const bool better = !best || (mode == SearchMode::Max ? d > best->value : d < best->value);
      if (better) best = ChordExtremum{d, x, y};
    }
  }
  return best;
}

}  // namespace polyspace
