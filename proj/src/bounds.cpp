#include "polyspace/bounds.hpp"

#include <cstdint>
#define MPFR_USE_INTMAX_T 1
#include <mpfr.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "polyspace/error.hpp"
#include "polyspace/parallel.hpp"
#include "polyspace/wide.hpp"

namespace polyspace {

void FixedFormat::validate() const {
  if (int_bits < 0 || frac_bits < 0) throw ConfigError("fixed-point format with negative bit count");
  if (width() < 1) throw ConfigError("fixed-point format needs at least one bit");
  if (width() > 40) throw ConfigError("fixed-point format wider than 40 bits is not supported");
}

std::string to_string(FunctionId f) {
  switch (f) {
    case FunctionId::Reciprocal: return "recip";
    case FunctionId::Log2: return "log2";
    case FunctionId::Exp2: return "exp2";
    case FunctionId::CustomTable: return "table";
  }
  return "?";
}

std::string to_string(AccuracyMode m) {
  switch (m) {
    case AccuracyMode::OneUlp: return "one-ulp";
    case AccuracyMode::Faithful: return "faithful";
    case AccuracyMode::ExplicitTable: return "explicit-table";
  }
  return "?";
}

FunctionId parse_function(const std::string& name) {
  if (name == "recip" || name == "reciprocal") return FunctionId::Reciprocal;
  if (name == "log2") return FunctionId::Log2;
  if (name == "exp2") return FunctionId::Exp2;
  if (name == "table" || name == "custom") return FunctionId::CustomTable;
  throw ConfigError("unknown function '" + name + "' (recip, log2, exp2, table)");
}

AccuracyMode parse_accuracy(const std::string& name) {
  if (name == "one-ulp" || name == "ulp") return AccuracyMode::OneUlp;
  if (name == "faithful") return AccuracyMode::Faithful;
  if (name == "explicit-table" || name == "table") return AccuracyMode::ExplicitTable;
  throw ConfigError("unknown accuracy mode '" + name + "' (one-ulp, faithful, explicit-table)");
}

ProblemSpec builtin_spec(FunctionId f, int bits, AccuracyMode mode) {
  if (bits < 1) throw ConfigError("built-in functions need at least one input bit");
  ProblemSpec s;
  s.function = f;
  s.accuracy = mode;
  s.input = {0, bits};
  switch (f) {
    case FunctionId::Reciprocal:
      s.output = {0, bits + 1};
      s.implicit_output_msb = true;
      break;
    case FunctionId::Log2:
      s.output = {0, bits + 1};
      break;
    case FunctionId::Exp2:
      s.output = {1, bits};
      s.implicit_output_msb = true;
      break;
    case FunctionId::CustomTable:
      throw ConfigError("custom tables take their formats from the table file");
  }
  return s;
}

InputSplit split_input(std::uint64_t z, int lookup_bits, const FixedFormat& in) {
  if (lookup_bits < 0 || lookup_bits > in.width()) {
    throw ConfigError("lookup bits R=" + std::to_string(lookup_bits) + " outside [0, " +
                      std::to_string(in.width()) + "]");
  }
  if (z >= in.count()) throw ConfigError("input value out of range");
  const int offset_bits = in.width() - lookup_bits;
  return {z >> offset_bits, z & ((std::uint64_t{1} << offset_bits) - 1)};
}

std::uint64_t join_input(InputSplit s, int lookup_bits, const FixedFormat& in) {
  const int offset_bits = in.width() - lookup_bits;
  return (s.region << offset_bits) | s.offset;
}

BoundTable::BoundTable(FixedFormat in, FixedFormat out, std::vector<std::int64_t> lower,
                       std::vector<std::int64_t> upper)
    : in_(in), out_(out), lower_(std::move(lower)), upper_(std::move(upper)) {
  in_.validate();
  out_.validate();
  if (lower_.size() != in_.count() || upper_.size() != in_.count()) {
    throw SpecError("bound table size does not match the input format");
  }
  const std::int64_t top = (std::int64_t{1} << out_.width()) - 1;
  for (std::size_t z = 0; z < lower_.size(); ++z) {
    if (lower_[z] > upper_[z]) throw SpecError("l(Z) > u(Z) at Z=" + std::to_string(z));
    if (lower_[z] < 0 || upper_[z] > top) {
      throw SpecError("bound outside the output format at Z=" + std::to_string(z));
    }
  }
}

RegionBounds BoundTable::region(int lookup_bits, std::uint64_t r) const {
  if (lookup_bits < 0 || lookup_bits > in_.width()) throw ConfigError("lookup bits out of range");
  if (r >= (std::uint64_t{1} << lookup_bits)) throw ConfigError("region index out of range");
  const std::size_t len = std::size_t{1} << (in_.width() - lookup_bits);
  const std::size_t start = r * len;
  return {std::span(lower_).subspan(start, len), std::span(upper_).subspan(start, len)};
}

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

// f(Z) * 2^q rounded in direction `rnd`; returns the ternary flag.
int eval_scaled(mpfr_t out, FunctionId f, std::uint64_t z, const FixedFormat& in, int q,
                mpfr_rnd_t rnd) {
  Mpfr arg(in.width() + 2);
  mpfr_set_ui(arg.v, static_cast<unsigned long>(z), MPFR_RNDN);  // exact
  mpfr_div_2ui(arg.v, arg.v, static_cast<unsigned long>(in.frac_bits), MPFR_RNDN);
  int t = 0;
  switch (f) {
    case FunctionId::Log2:
      mpfr_add_ui(arg.v, arg.v, 1, MPFR_RNDN);  // exact: precision covers 1.x
      t = mpfr_log2(out, arg.v, rnd);
      break;
    case FunctionId::Exp2:
      t = mpfr_exp2(out, arg.v, rnd);
      break;
    default:
      throw ContractViolation("eval_scaled on a non-transcendental function");
  }
  mpfr_mul_2si(out, out, q, rnd);  // exact scaling
  return t;
}

ScaledValue certified_transcendental(FunctionId f, std::uint64_t z, const FixedFormat& in,
                                     int q) {
  for (mpfr_prec_t prec = 64; prec <= (1 << 16); prec *= 2) {
    Mpfr lo(prec), hi(prec);
    const int tlo = eval_scaled(lo.v, f, z, in, q, MPFR_RNDD);
    eval_scaled(hi.v, f, z, in, q, MPFR_RNDU);
    const auto fl = static_cast<std::int64_t>(mpfr_get_sj(lo.v, MPFR_RNDD));
    if (tlo == 0) {
      // lo is the exact value
      if (mpfr_integer_p(lo.v)) return {fl, fl};
      return {fl, fl + 1};
    }
    // value strictly inside (lo, hi): decided once no integer lies in between
    if (mpfr_cmp_si(hi.v, static_cast<long>(fl + 1)) <= 0) return {fl, fl + 1};
  }
  throw ResourceLimitError("bound certification did not converge");
}

}  // namespace

ScaledValue scaled_function_value(FunctionId f, std::uint64_t z, const FixedFormat& in,
                                  int out_frac_bits) {
  if (f == FunctionId::Reciprocal) {
    // 2^(m+q) / (2^m + Z), exact in integers
    const Wide num = Wide(1) << (in.frac_bits + out_frac_bits);
    const Wide den = (Wide(1) << in.frac_bits) + static_cast<Wide>(z);
    return {narrow64(floor_div(num, den)), narrow64(ceil_div(num, den))};
  }
  if (f == FunctionId::CustomTable) throw ConfigError("custom tables have no function to evaluate");
  return certified_transcendental(f, z, in, out_frac_bits);
}

BoundTable make_bound_table(const ProblemSpec& spec, int threads) {
  if (spec.function == FunctionId::CustomTable) {
    throw ConfigError("make_bound_table needs a built-in function");
  }
  if (spec.accuracy == AccuracyMode::ExplicitTable) {
    throw ConfigError("explicit-table accuracy needs a bound-table file");
  }
  spec.input.validate();
  spec.output.validate();
  const std::size_t count = spec.input.count();
  const std::int64_t top = (std::int64_t{1} << spec.output.width()) - 1;
  std::vector<std::int64_t> lower(count), upper(count);
  std::vector<char> bad(count, 0);
  parallel_for(count, threads, [&](std::size_t z) {
    const ScaledValue v = scaled_function_value(spec.function, z, spec.input, spec.output.frac_bits);
    std::int64_t lo, hi;
    if (spec.accuracy == AccuracyMode::OneUlp) {
      lo = v.ceil - 1;   // ceil(F 2^q - 1)
      hi = v.floor + 1;  // floor(F 2^q + 1)
    } else {
      lo = v.floor;
      hi = v.ceil;
    }
    // the nearest representable value must stay within one ulp
    if (v.floor > top + 1 || v.ceil < -1) bad[z] = 1;
    lower[z] = std::clamp<std::int64_t>(lo, 0, top);
    upper[z] = std::clamp<std::int64_t>(hi, 0, top);
  });
  const auto it = std::find(bad.begin(), bad.end(), 1);
  if (it != bad.end()) {
    throw SpecError(to_string(spec.function) + " at Z=" + std::to_string(it - bad.begin()) +
                    " lies outside the output format");
  }
  return BoundTable(spec.input, spec.output, std::move(lower), std::move(upper));
}

BoundTable load_bounds(const ProblemSpec& spec, int threads) {
  if (spec.function == FunctionId::CustomTable) return read_bound_table_file(spec.table_path);
  return make_bound_table(spec, threads);
}

void write_bound_table(std::ostream& os, const BoundTable& table) {
  os << "boundtable n " << table.input().int_bits << " m " << table.input().frac_bits << " p "
     << table.output().int_bits << " q " << table.output().frac_bits << '\n';
  for (std::size_t z = 0; z < table.size(); ++z) {
    os << z << ' ' << table.lower(z) << ' ' << table.upper(z) << '\n';
  }
}

BoundTable read_bound_table(std::istream& is) {
  std::string line;
  FixedFormat in, out;
  bool have_header = false;
  std::vector<std::int64_t> lower, upper;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string tag, kn, km, kp, kq;
      if (!(ls >> tag >> kn >> in.int_bits >> km >> in.frac_bits >> kp >> out.int_bits >> kq >>
            out.frac_bits) ||
          tag != "boundtable" || kn != "n" || km != "m" || kp != "p" || kq != "q") {
        throw FormatError("bound table: bad header on line " + std::to_string(line_no));
      }
      try {
        in.validate();
        out.validate();
      } catch (const ConfigError& e) {
        throw FormatError(std::string("bound table: ") + e.what());
      }
      have_header = true;
      continue;
    }
    std::uint64_t z;
    std::int64_t l, u;
    std::string rest;
    if (!(ls >> z >> l >> u) || (ls >> rest)) {
      throw FormatError("bound table: bad record on line " + std::to_string(line_no));
    }
    if (z != lower.size()) {
      throw FormatError("bound table: expected Z=" + std::to_string(lower.size()) + " on line " +
                        std::to_string(line_no));
    }
    lower.push_back(l);
    upper.push_back(u);
  }
  if (!have_header) throw FormatError("bound table: missing header");
  if (lower.size() != in.count()) throw FormatError("bound table: wrong number of records");
  try {
    return BoundTable(in, out, std::move(lower), std::move(upper));
  } catch (const SpecError& e) {
    throw FormatError(std::string("bound table: ") + e.what());
  }
}

BoundTable read_bound_table_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open bound table '" + path + "'");
  return read_bound_table(f);
}

}  // namespace polyspace
