#pragma once

// LUT packing, Verilog emission and the design text file.
//
// Row layout, most significant first: [a field | b field | c field]. A field
// of a NonNegative/NonPositive coefficient holds |v| >> shift; a Mixed field
// holds v >> shift in two's complement with one extra bit.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polyspace/bounds.hpp"
#include "polyspace/explore.hpp"

namespace polyspace {

/// The top `dropped` bits of every (p+q)-bit output equal `value`.
struct OutputTrim {
  int dropped = 0;
  std::int64_t value = 0;
  friend bool operator==(const OutputTrim&, const OutputTrim&) = default;
};

/// Leading output bits shared by every value in [min l, max u]; at least one
/// bit is always kept.
OutputTrim constant_output_msbs(const BoundTable& table);

struct HardwareDesign {
  std::string name = "interp";
  SelectedDesign design;
  OutputTrim trim;
  /// Saturate the shifted result into the output format before slicing.
  bool clamp = false;
  int row_bits = 0;
  std::vector<UWide> rows;

  int input_bits() const { return design.input.width(); }
  int offset_bits() const { return design.input.width() - design.lookup_bits; }
  int output_bits() const { return design.output.width() - trim.dropped; }
};

HardwareDesign pack_lut(const SelectedDesign& design, OutputTrim trim = {},
                        std::string name = "interp");
Triple unpack_row(const HardwareDesign& hw, UWide row);
std::vector<Triple> unpack_lut(const HardwareDesign& hw);

/// `LUT [Pa,Pb,Pc] = total` with sign bits included in the field widths.
std::string width_report(const HardwareDesign& hw);

/// Internal datapath widths of the emitted RTL. `accumulator_bits` holds
/// every partial sum for every LUT row and offset, with a sign bit.
struct DatapathWidths {
  int square_bits = 0;
  int accumulator_bits = 0;
  Wide max_magnitude = 0;
};
DatapathWidths datapath_widths(const HardwareDesign& hw);

/// Combinational Verilog-2001 module `hw.name` with ports z (input) and y
/// (output, constant MSBs removed).
std::string emit_hdl(const HardwareDesign& hw);

/// Text format:
///   polyspace-design v1
///   name <module>
///   format n <n> m <m> p <p> q <q>
///   shape R <R> k <k> i <i> j <j>
///   coef a <sign> <shift> <width>      (likewise b, c)
///   output drop <d> value <v> clamp <0|1>
///   flags mixed <0|1> incomplete <0|1>
///   rows <2^R> bits <row bits>
///   row <r> <a> <b> <c> <hex packed row>
///   end
std::string emit_design_file(const HardwareDesign& hw);
HardwareDesign parse_design_file(std::istream& is);
HardwareDesign read_design_file(const std::string& path);

}  // namespace polyspace
