#include "polyspace/emit.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "polyspace/error.hpp"

namespace polyspace {

namespace {

UWide mask(int bits) { return bits >= 128 ? ~UWide(0) : (UWide(1) << bits) - 1; }

std::string hex(UWide v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back("0123456789abcdef"[static_cast<int>(v & 15)]);
    v >>= 4;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

UWide parse_hex(const std::string& s) {
  std::string body = s;
  if (body.rfind("0x", 0) == 0) body = body.substr(2);
  if (body.empty() || body.size() > 32) throw FormatError("bad hex field '" + s + "'");
  UWide v = 0;
  for (char ch : body) {
    int d;
    if (ch >= '0' && ch <= '9') d = ch - '0';
    else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
    else throw FormatError("bad hex field '" + s + "'");
    v = (v << 4) | static_cast<UWide>(d);
  }
  return v;
}

UWide encode_field(const WidthPlan& plan, Wide v, const char* name) {
  if (!plan.representable(v)) {
    throw ContractViolation(std::string("coefficient ") + name + "=" + to_string(v) +
                            " not representable under its width plan");
  }
  if (v == 0 || plan.width == 0) return 0;
  const Wide stored = (plan.sign == SignClass::Mixed ? v : wide_abs(v)) >> plan.shift;
  return static_cast<UWide>(stored) & mask(plan.field_bits());
}

Wide decode_field(const WidthPlan& plan, UWide field) {
  const int bits = plan.field_bits();
  if (bits == 0) return 0;
  Wide stored = static_cast<Wide>(field & mask(bits));
  if (plan.sign == SignClass::Mixed && (field >> (bits - 1)) & 1) stored -= Wide(1) << bits;
  Wide v = checked_shl(wide_abs(stored), plan.shift);
  if (plan.sign == SignClass::NonPositive || stored < 0) v = -v;
  return v;
}

}  // namespace

OutputTrim constant_output_msbs(const BoundTable& table) {
  const auto lo = *std::min_element(table.lower().begin(), table.lower().end());
  const auto hi = *std::max_element(table.upper().begin(), table.upper().end());
  const int w = table.output().width();
  OutputTrim trim;
  while (trim.dropped < w - 1) {
    const int bit = w - 1 - trim.dropped;
    if (((lo >> bit) & 1) != ((hi >> bit) & 1)) break;
    ++trim.dropped;
  }
  trim.value = trim.dropped == 0 ? 0 : lo >> (w - trim.dropped);
  return trim;
}

HardwareDesign pack_lut(const SelectedDesign& design, OutputTrim trim, std::string name) {
  HardwareDesign hw;
  hw.name = std::move(name);
  hw.design = design;
  hw.trim = trim;
  const int fa = design.a.field_bits(), fb = design.b.field_bits(), fc = design.c.field_bits();
  hw.row_bits = fa + fb + fc;
  if (hw.row_bits > 128) throw ResourceLimitError("LUT rows wider than 128 bits");
  if (design.coefficients.size() != (std::size_t{1} << design.lookup_bits)) {
    throw ContractViolation("design has the wrong number of regions");
  }
  hw.rows.reserve(design.coefficients.size());
  for (const auto& t : design.coefficients) {
    UWide row = 0;
    if (fa) row = (row << fa) | encode_field(design.a, t.a, "a");
    if (fb) row = (row << fb) | encode_field(design.b, t.b, "b");
    if (fc) row = (row << fc) | encode_field(design.c, t.c, "c");
    hw.rows.push_back(row);
  }
  return hw;
}

Triple unpack_row(const HardwareDesign& hw, UWide row) {
  const auto& d = hw.design;
  const int fb = d.b.field_bits(), fc = d.c.field_bits();
  Triple t;
  t.c = decode_field(d.c, row & mask(fc));
  t.b = decode_field(d.b, (fc >= 128 ? 0 : row >> fc) & mask(fb));
  t.a = decode_field(d.a, fb + fc >= 128 ? 0 : row >> (fb + fc));
  return t;
}

std::vector<Triple> unpack_lut(const HardwareDesign& hw) {
  std::vector<Triple> out;
  out.reserve(hw.rows.size());
  for (UWide row : hw.rows) out.push_back(unpack_row(hw, row));
  return out;
}

std::string width_report(const HardwareDesign& hw) {
  const auto& d = hw.design;
  std::ostringstream os;
  os << "LUT [" << d.a.field_bits() << ',' << d.b.field_bits() << ',' << d.c.field_bits()
     << "] = " << hw.row_bits;
  return os.str();
}

namespace {

std::uint64_t truncated_max(int offset_bits, int cleared) {
  if (offset_bits == 0 || cleared >= offset_bits) return 0;
  const std::uint64_t all = (std::uint64_t{1} << offset_bits) - 1;
  return (all >> cleared) << cleared;
}

}  // namespace

DatapathWidths datapath_widths(const HardwareDesign& hw) {
  const auto& d = hw.design;
  const int mx = hw.offset_bits();
  const Wide xt = static_cast<Wide>(truncated_max(mx, d.i));
  const Wide xj = static_cast<Wide>(truncated_max(mx, d.j));
  DatapathWidths w;
  w.square_bits = 2 * mx;
  for (const auto& t : unpack_lut(hw)) {
    const Wide mag = checked_add(checked_add(checked_mul(wide_abs(t.a), checked_mul(xt, xt)),
                                             checked_mul(wide_abs(t.b), xj)),
                                 wide_abs(t.c));
    w.max_magnitude = std::max(w.max_magnitude, mag);
  }
  int bits = bit_length(static_cast<UWide>(w.max_magnitude)) + 1;
  bits = std::max({bits, d.a.field_bits() + 1, d.b.field_bits() + 1, d.c.field_bits() + 1,
                   2 * mx + 1, d.output.width() + d.k + 1});
  w.accumulator_bits = bits;
  return w;
}

namespace {

std::string range(int bits) { return "[" + std::to_string(bits - 1) + ":0]"; }

// x with its low `cleared` bits replaced by zeros, as a Verilog expression
std::string cleared_expr(int mx, int cleared) {
  if (cleared == 0) return "x";
  return "{x[" + std::to_string(mx - 1) + ":" + std::to_string(cleared) + "], " +
         std::to_string(cleared) + "'b0}";
}

std::string field_operand(const WidthPlan& p, const std::string& name) {
  if (p.sign == SignClass::Mixed) return "$signed(" + name + ")";
  return "$signed({1'b0, " + name + "})";
}

}  // namespace

std::string emit_hdl(const HardwareDesign& hw) {
  const auto& d = hw.design;
  const int n = hw.input_bits();
  const int R = d.lookup_bits;
  const int mx = hw.offset_bits();
  const int fa = d.a.field_bits(), fb = d.b.field_bits(), fc = d.c.field_bits();
  const int out_bits = hw.output_bits();
  const DatapathWidths dw = datapath_widths(hw);
  const int W = dw.accumulator_bits;
  const bool has_square = fa > 0 && mx > 0 && d.i < mx;
  const bool has_linear = fb > 0 && mx > 0 && d.j < mx;

  std::ostringstream os;
  os << "// Piecewise polynomial interpolator: (a*xt^2 + b*xj + c) >>> " << d.k << "\n";
  os << "// input " << d.input.int_bits << '.' << d.input.frac_bits << ", output "
     << d.output.int_bits << '.' << d.output.frac_bits << ", R=" << R << " k=" << d.k
     << " i=" << d.i << " j=" << d.j << "\n";
  os << "// " << width_report(hw) << "\n";
  if (hw.trim.dropped > 0) {
    os << "// top " << hw.trim.dropped << " output bit(s) are constant " << hw.trim.value
       << " and not emitted\n";
  }
  os << "module " << hw.name << " (\n";
  os << "  input  wire " << range(n) << " z,\n";
  os << "  output wire " << range(out_bits) << " y\n";
  os << ");\n";
  if (R > 0) os << "  wire " << range(R) << " r = z[" << n - 1 << ":" << mx << "];\n";
  if (mx > 0) os << "  wire " << range(mx) << " x = z[" << mx - 1 << ":0];\n";

  const int rb = hw.row_bits;
  if (rb > 0) {
    if (R == 0) {
      os << "  wire " << range(rb) << " row = " << rb << "'h" << hex(hw.rows[0]) << ";\n";
    } else {
      os << "  reg " << range(rb) << " row;\n";
      os << "  always @* begin\n";
      os << "    case (r)\n";
      for (std::size_t r = 0; r < hw.rows.size(); ++r) {
        os << "      " << R << "'d" << r << ": row = " << rb << "'h" << hex(hw.rows[r]) << ";\n";
      }
      os << "      default: row = " << rb << "'h0;\n";
      os << "    endcase\n";
      os << "  end\n";
    }
  }
  int pos = rb;
  auto slice_field = [&](int bits, const char* name) {
    if (bits == 0) return;
    os << "  wire " << range(bits) << ' ' << name << " = row[" << pos - 1 << ":" << pos - bits
       << "];\n";
    pos -= bits;
  };
  slice_field(fa, "a_f");
  slice_field(fb, "b_f");
  slice_field(fc, "c_f");

  std::string acc = std::to_string(W) + "'sd0";
  auto term = [&](const WidthPlan& p, const std::string& name, const std::string& product) {
    std::string e = field_operand(p, name);
    if (!product.empty()) e += " * $signed({1'b0, " + product + "})";
    if (p.shift > 0) e = "(" + e + ") <<< " + std::to_string(p.shift);
    const std::string wire = "t_" + name.substr(0, 1);
    os << "  wire signed " << range(W) << ' ' << wire << " = " << e << ";\n";
    acc += (p.sign == SignClass::NonPositive ? " - " : " + ") + wire;
  };
  if (has_square) {
    os << "  wire " << range(mx) << " xt = " << cleared_expr(mx, d.i) << ";\n";
    os << "  wire " << range(2 * mx) << " sq = xt * xt;\n";
    term(d.a, "a_f", "sq");
  }
  if (has_linear) {
    os << "  wire " << range(mx) << " xj = " << cleared_expr(mx, d.j) << ";\n";
    term(d.b, "b_f", "xj");
  }
  if (fc > 0) term(d.c, "c_f", "");
  os << "  wire signed " << range(W) << " acc = " << acc << ";\n";
  os << "  wire signed " << range(W) << " sh = acc >>> " << d.k << ";\n";
  if (hw.clamp) {
    const std::string top = std::to_string(W) + "'sd" + std::to_string((std::int64_t{1} << d.output.width()) - 1);
    os << "  wire signed " << range(W) << " sat = sh < " << W << "'sd0 ? " << W << "'sd0 : (sh > "
       << top << " ? " << top << " : sh);\n";
    os << "  assign y = sat[" << out_bits - 1 << ":0];\n";
  } else {
    os << "  assign y = sh[" << out_bits - 1 << ":0];\n";
  }
  os << "endmodule\n";
  return os.str();
}

std::string emit_design_file(const HardwareDesign& hw) {
  const auto& d = hw.design;
  std::ostringstream os;
  os << "polyspace-design v1\n";
  os << "name " << hw.name << '\n';
  os << "format n " << d.input.int_bits << " m " << d.input.frac_bits << " p " << d.output.int_bits
     << " q " << d.output.frac_bits << '\n';
  os << "shape R " << d.lookup_bits << " k " << d.k << " i " << d.i << " j " << d.j << '\n';
  const WidthPlan* plans[3] = {&d.a, &d.b, &d.c};
  for (int c = 0; c < 3; ++c) {
    os << "coef " << "abc"[c] << ' ' << to_string(plans[c]->sign) << ' ' << plans[c]->shift << ' '
       << plans[c]->width << '\n';
  }
  os << "output drop " << hw.trim.dropped << " value " << hw.trim.value << " clamp "
     << (hw.clamp ? 1 : 0) << '\n';
  os << "flags mixed " << (d.mixed_fallback ? 1 : 0) << " incomplete " << (d.incomplete ? 1 : 0)
     << '\n';
  os << "rows " << hw.rows.size() << " bits " << hw.row_bits << '\n';
  for (std::size_t r = 0; r < hw.rows.size(); ++r) {
    const auto& t = d.coefficients[r];
    os << "row " << r << ' ' << to_string(t.a) << ' ' << to_string(t.b) << ' ' << to_string(t.c)
       << " 0x" << hex(hw.rows[r]) << '\n';
  }
  os << "end\n";
  return os.str();
}

namespace {

struct LineReader {
  std::istream& is;
  std::size_t line_no = 0;

  std::vector<std::string> next() {
    std::string line;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::vector<std::string> w;
      for (std::string s; ls >> s;) w.push_back(s);
      return w;
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("design file: " + what + " on line " + std::to_string(line_no));
  }

  std::vector<std::string> expect(const std::string& tag, std::size_t words) {
    auto w = next();
    if (w.size() != words || w[0] != tag) fail("expected '" + tag + "' record");
    return w;
  }
};

int to_int(const std::string& s, LineReader& lr) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) lr.fail("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    lr.fail("bad integer '" + s + "'");
  }
}

}  // namespace

HardwareDesign parse_design_file(std::istream& is) {
  LineReader lr{is};
  auto w = lr.next();
  if (w.size() != 2 || w[0] != "polyspace-design" || w[1] != "v1") lr.fail("bad magic");
  HardwareDesign hw;
  auto& d = hw.design;
  hw.name = lr.expect("name", 2)[1];
  w = lr.expect("format", 9);
  if (w[1] != "n" || w[3] != "m" || w[5] != "p" || w[7] != "q") lr.fail("bad format record");
  d.input = {to_int(w[2], lr), to_int(w[4], lr)};
  d.output = {to_int(w[6], lr), to_int(w[8], lr)};
  try {
    d.input.validate();
    d.output.validate();
  } catch (const ConfigError& e) {
    lr.fail(e.what());
  }
  w = lr.expect("shape", 9);
  if (w[1] != "R" || w[3] != "k" || w[5] != "i" || w[7] != "j") lr.fail("bad shape record");
  d.lookup_bits = to_int(w[2], lr);
  d.k = to_int(w[4], lr);
  d.i = to_int(w[6], lr);
  d.j = to_int(w[8], lr);
  const int mx = d.input.width() - d.lookup_bits;
  if (d.lookup_bits < 0 || mx < 0 || d.k < 0 || d.k > 120 || d.i < 0 || d.i > mx || d.j < 0 ||
      d.j > mx) {
    lr.fail("shape out of range");
  }
  WidthPlan* plans[3] = {&d.a, &d.b, &d.c};
  for (int c = 0; c < 3; ++c) {
    w = lr.expect("coef", 5);
    if (w[1] != std::string(1, "abc"[c])) lr.fail("coefficients out of order");
    try {
      plans[c]->sign = parse_sign_class(w[2]);
    } catch (const FormatError& e) {
      lr.fail(e.what());
    }
    plans[c]->shift = to_int(w[3], lr);
    plans[c]->width = to_int(w[4], lr);
    if (plans[c]->shift < 0 || plans[c]->shift > 126 || plans[c]->width < 0 || plans[c]->width > 126) {
      lr.fail("coefficient plan out of range");
    }
  }
  w = lr.expect("output", 7);
  if (w[1] != "drop" || w[3] != "value" || w[5] != "clamp") lr.fail("bad output record");
  hw.trim.dropped = to_int(w[2], lr);
  hw.trim.value = to_int(w[4], lr);
  hw.clamp = w[6] == "1";
  if (hw.trim.dropped < 0 || hw.trim.dropped >= d.output.width()) lr.fail("bad output trim");
  w = lr.expect("flags", 5);
  d.mixed_fallback = w[2] == "1";
  d.incomplete = w[4] == "1";
  w = lr.expect("rows", 4);
  const std::size_t count = std::size_t{1} << d.lookup_bits;
  if (w[2] != "bits" || std::stoull(w[1]) != count) lr.fail("wrong row count");
  hw.row_bits = to_int(w[3], lr);
  if (hw.row_bits != d.a.field_bits() + d.b.field_bits() + d.c.field_bits()) {
    lr.fail("row width disagrees with the coefficient plans");
  }
  for (std::size_t r = 0; r < count; ++r) {
    w = lr.expect("row", 6);
    if (std::stoull(w[1]) != r) lr.fail("rows out of order");
    Triple t;
    try {
      t = {parse_wide(w[2]), parse_wide(w[3]), parse_wide(w[4])};
    } catch (const FormatError& e) {
      lr.fail(e.what());
    }
    const UWide packed = parse_hex(w[5]);
    if (packed > mask(hw.row_bits)) lr.fail("row wider than declared");
    if (!d.a.representable(t.a) || !d.b.representable(t.b) || !d.c.representable(t.c)) {
      lr.fail("coefficient not representable under its plan");
    }
    d.coefficients.push_back(t);
    hw.rows.push_back(packed);
  }
  if (lr.next() != std::vector<std::string>{"end"}) lr.fail("missing end");
  const auto unpacked = unpack_lut(hw);
  for (std::size_t r = 0; r < count; ++r) {
    if (!(unpacked[r] == d.coefficients[r])) {
      throw FormatError("design file: packed row " + std::to_string(r) +
                        " does not match its coefficients");
    }
  }
  return hw;
}

HardwareDesign read_design_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open design file '" + path + "'");
  return parse_design_file(f);
}

}  // namespace polyspace
