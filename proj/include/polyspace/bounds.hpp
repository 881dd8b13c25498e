#pragma once

// Fixed-point formats, input splitting and integer output bounds.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polyspace {

/// Unsigned fixed-point format with `int_bits` integral and `frac_bits`
/// fractional bits. A value Z is an integer in [0, 2^width()) with real value
/// Z * 2^-frac_bits.
struct FixedFormat {
  int int_bits = 0;
  int frac_bits = 0;

  int width() const { return int_bits + frac_bits; }
  std::uint64_t count() const { return std::uint64_t{1} << width(); }
  /// Throws ConfigError unless the format is usable (1..40 bits).
  void validate() const;

  friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

enum class FunctionId { Reciprocal, Log2, Exp2, CustomTable };
enum class AccuracyMode { OneUlp, Faithful, ExplicitTable };

std::string to_string(FunctionId f);
std::string to_string(AccuracyMode m);
FunctionId parse_function(const std::string& name);
AccuracyMode parse_accuracy(const std::string& name);

/// What to approximate and how accurately.
///
/// Built-in inputs are read with the function's implicit integer bit:
///   reciprocal  1.x -> 0.1y   (value 1/(1 + Z 2^-m), q = m + 1)
///   log2        1.x -> 0.y    (value log2(1 + Z 2^-m), q = m + 1)
///   exp2        0.x -> 1.y    (value 2^(Z 2^-m), p = 1, q = m)
struct ProblemSpec {
  FunctionId function = FunctionId::Reciprocal;
  FixedFormat input;
  FixedFormat output;
  AccuracyMode accuracy = AccuracyMode::OneUlp;
  /// Output MSBs that are constant over the whole range may be dropped by
  /// the emitter (the leading 1 of 0.1y and 1.y).
  bool implicit_output_msb = false;
  /// Bound-table path for CustomTable.
  std::string table_path;
};

/// Standard spec for a built-in function with `bits` input bits.
ProblemSpec builtin_spec(FunctionId f, int bits, AccuracyMode mode = AccuracyMode::OneUlp);

struct InputSplit {
  std::uint64_t region = 0;  // r: top R bits
  std::uint64_t offset = 0;  // x: low width-R bits
};

/// Splits Z into its top `lookup_bits` bits and the remaining offset.
InputSplit split_input(std::uint64_t z, int lookup_bits, const FixedFormat& in);
/// Inverse of split_input: {r, x}.
std::uint64_t join_input(InputSplit s, int lookup_bits, const FixedFormat& in);

/// Lower/upper output bounds over one region, indexed by offset x.
struct RegionBounds {
  std::span<const std::int64_t> lower;
  std::span<const std::int64_t> upper;
  std::size_t size() const { return lower.size(); }
};

/// Per-input integer output bounds l(Z) <= u(Z), both in [0, 2^(p+q)).
class BoundTable {
 public:
  BoundTable() = default;
  /// Validates l <= u and the output range; throws SpecError.
  BoundTable(FixedFormat in, FixedFormat out, std::vector<std::int64_t> lower,
             std::vector<std::int64_t> upper);

  const FixedFormat& input() const { return in_; }
  const FixedFormat& output() const { return out_; }
  std::size_t size() const { return lower_.size(); }
  std::int64_t lower(std::uint64_t z) const { return lower_[z]; }
  std::int64_t upper(std::uint64_t z) const { return upper_[z]; }
  std::span<const std::int64_t> lower() const { return lower_; }
  std::span<const std::int64_t> upper() const { return upper_; }

  /// l_R(r, .) and u_R(r, .) as views into the table.
  RegionBounds region(int lookup_bits, std::uint64_t r) const;

  friend bool operator==(const BoundTable&, const BoundTable&) = default;

 private:
  FixedFormat in_;
  FixedFormat out_;
  std::vector<std::int64_t> lower_;
  std::vector<std::int64_t> upper_;
};

/// Certified bound table for a built-in function. `threads` <= 0 uses the
/// hardware concurrency; the result does not depend on it.
BoundTable make_bound_table(const ProblemSpec& spec, int threads = 1);

/// make_bound_table for built-ins, read_bound_table(spec.table_path) otherwise.
BoundTable load_bounds(const ProblemSpec& spec, int threads = 1);

/// Text format:
///   boundtable n <n> m <m> p <p> q <q>
///   <Z> <l> <u>          one line per input, Z ascending from 0
/// Lines starting with '#' are comments.
void write_bound_table(std::ostream& os, const BoundTable& table);
BoundTable read_bound_table(std::istream& is);
BoundTable read_bound_table_file(const std::string& path);

/// Exact floor and ceil of f(Z) * 2^q for a built-in function, certified by
/// directed-rounding evaluation with precision escalation.
struct ScaledValue {
  std::int64_t floor = 0;
  std::int64_t ceil = 0;
  bool exact() const { return floor == ceil; }
};
ScaledValue scaled_function_value(FunctionId f, std::uint64_t z, const FixedFormat& in,
                                  int out_frac_bits);

}  // namespace polyspace
