#include <doctest.h>

#include <random>
#include <sstream>

#include "designs.hpp"
#include "polyspace/error.hpp"
#include "polyspace/verify.hpp"
#include "support.hpp"
#include "vsim.hpp"

using namespace polyspace;
using namespace polyspace::testing;

namespace {

HardwareDesign toy_design() {
  SpaceOptions o;
  o.window_bits = 8;
  auto cat = generate_space(share(toy_linear()), 0, 0, o).catalog;
  return pack_lut(explore(cat));
}

/// The toy triple stored with an unshifted 2-bit b field.
HardwareDesign toy_unshifted() {
  SelectedDesign d;
  d.input = {0, 2};
  d.output = {3, 0};
  d.i = 2;
  d.b = {SignClass::NonNegative, 0, 2};
  d.coefficients = {{0, 2, 0}};
  return pack_lut(d);
}

Wide random_value(std::mt19937_64& rng, const WidthPlan& p) {
  if (p.width == 0) return 0;
  const Wide top = (Wide{1} << p.width) - 1;
  std::uniform_int_distribution<std::int64_t> mag(0, static_cast<std::int64_t>(top));
  Wide v = Wide(mag(rng)) << p.shift;
  if (p.sign == SignClass::NonPositive || (p.sign == SignClass::Mixed && (rng() & 1))) v = -v;
  return v;
}

SelectedDesign random_design(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(0, 4), wid(0, 6), sg(0, 2);
  SelectedDesign d;
  d.input = {0, 6};
  d.output = {1, 6};
  d.lookup_bits = small(rng) % 4;
  d.k = small(rng);
  const int mx = 6 - d.lookup_bits;
  d.i = std::min(small(rng), mx);
  d.j = std::min(small(rng), mx);
  WidthPlan* plans[3] = {&d.a, &d.b, &d.c};
  for (auto* p : plans) *p = {static_cast<SignClass>(sg(rng)), small(rng) % 3, wid(rng)};
  for (std::size_t r = 0; r < (std::size_t{1} << d.lookup_bits); ++r)
    d.coefficients.push_back({random_value(rng, d.a), random_value(rng, d.b), random_value(rng, d.c)});
  return d;
}

void hdl_matches_evaluator(const HardwareDesign& hw) {
  VerilogSim sim(emit_hdl(hw));
  REQUIRE(sim.input_width() == hw.input_bits());
  REQUIRE(sim.output_width() == hw.output_bits());
  const UWide out_mask = (UWide(1) << hw.output_bits()) - 1;
  std::uint64_t mismatches = 0;
  for (std::uint64_t z = 0; z < hw.design.input.count(); ++z) {
    const UWide want = static_cast<UWide>(evaluate(hw, z)) & out_mask;
    if (sim.run(z) != want) ++mismatches;
  }
  CHECK(mismatches == 0);
}

}  // namespace

TEST_CASE("toy packing") {
  auto hw = toy_unshifted();
  REQUIRE(hw.rows.size() == 1);
  CHECK(hw.row_bits == 2);
  CHECK(hw.rows[0] == 0b10);
  CHECK(width_report(hw) == "LUT [0,2,0] = 2");
  CHECK(unpack_lut(hw) == std::vector<Triple>{{0, 2, 0}});

  auto minimal = toy_design();
  CHECK(minimal.row_bits == 1);
  CHECK(minimal.rows[0] == 1);
  CHECK(unpack_lut(minimal) == std::vector<Triple>{{0, 2, 0}});
}

TEST_CASE("pack and unpack are inverse") {
  std::mt19937_64 rng(51);
  for (int it = 0; it < 300; ++it) {
    auto d = random_design(rng);
    auto hw = pack_lut(d);
    CHECK(hw.row_bits == d.a.field_bits() + d.b.field_bits() + d.c.field_bits());
    CHECK(unpack_lut(hw) == d.coefficients);
  }
  for (auto [f, R] : {std::pair{FunctionId::Reciprocal, 6}, {FunctionId::Log2, 4}, {FunctionId::Exp2, 2}}) {
    auto b = build(f, 10, R);
    CHECK(unpack_lut(b.hw) == b.hw.design.coefficients);
  }
}

TEST_CASE("unrepresentable coefficients are rejected") {
  SelectedDesign d;
  d.input = {0, 2};
  d.output = {3, 0};
  d.b = {SignClass::NonNegative, 0, 1};
  d.coefficients = {{0, 2, 0}};
  CHECK_THROWS_AS(pack_lut(d), ContractViolation);
}

TEST_CASE("constant output bits") {
  auto t = make_bound_table(builtin_spec(FunctionId::Reciprocal, 10));
  auto trim = constant_output_msbs(t);
  CHECK(trim.dropped == 1);
  CHECK(trim.value == 1);
  CHECK(constant_output_msbs(toy_linear()).dropped == 0);
  auto flat = exact_table({0, 1}, {3, 0}, {5, 5});
  CHECK(constant_output_msbs(flat).dropped == 2);
  CHECK(constant_output_msbs(flat).value == 2);
}

TEST_CASE("HDL simulation equals the evaluator") {
  hdl_matches_evaluator(toy_design());
  hdl_matches_evaluator(toy_unshifted());
  for (auto [f, R] : {std::pair{FunctionId::Reciprocal, 6}, {FunctionId::Log2, 4}, {FunctionId::Exp2, 2},
                      {FunctionId::Log2, 10}})
    hdl_matches_evaluator(build(f, 10, R).hw);
  std::mt19937_64 rng(61);
  for (int it = 0; it < 60; ++it) {
    auto hw = pack_lut(random_design(rng));
    hw.clamp = it % 2 == 1;
    hdl_matches_evaluator(hw);
  }
}

TEST_CASE("linear designs have no squarer") {
  auto b = build(FunctionId::Reciprocal, 10, 6);
  REQUIRE(b.hw.design.a.width == 0);
  const std::string hdl = emit_hdl(b.hw);
  CHECK(hdl.find("sq") == std::string::npos);
  CHECK(hdl.find("a_f") == std::string::npos);
  CHECK(hdl.find("LUT [0,") != std::string::npos);

  auto q = build(FunctionId::Exp2, 10, 2);
  CHECK(emit_hdl(q.hw).find("xt * xt") != std::string::npos);
}

TEST_CASE("outputs are deterministic") {
  auto a = build(FunctionId::Reciprocal, 10, 6);
  auto b = build(FunctionId::Reciprocal, 10, 6);
  CHECK(emit_hdl(a.hw) == emit_hdl(b.hw));
  CHECK(emit_design_file(a.hw) == emit_design_file(b.hw));
}

TEST_CASE("design file round-trip") {
  for (const auto& hw : {toy_design(), toy_unshifted(), build(FunctionId::Exp2, 10, 2).hw}) {
    const std::string text = emit_design_file(hw);
    std::istringstream is(text);
    auto back = parse_design_file(is);
    CHECK(emit_design_file(back) == text);
    CHECK(back.rows == hw.rows);
    CHECK(back.design.coefficients == hw.design.coefficients);
    CHECK(back.trim == hw.trim);
  }
  std::mt19937_64 rng(71);
  for (int it = 0; it < 30; ++it) {
    auto hw = pack_lut(random_design(rng));
    std::istringstream is(emit_design_file(hw));
    CHECK(parse_design_file(is).rows == hw.rows);
  }
}

TEST_CASE("corrupted design files are rejected") {
  const std::string text = emit_design_file(toy_unshifted());
  std::istringstream bad_header("polyspace-design v9\n" + text.substr(text.find('\n') + 1));
  CHECK_THROWS_AS(parse_design_file(bad_header), FormatError);

  std::string wrong_row = text;
  wrong_row.replace(wrong_row.find("0x2"), 3, "0x3");
  std::istringstream is(wrong_row);
  CHECK_THROWS_AS(parse_design_file(is), FormatError);

  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(parse_design_file(truncated), FormatError);
}
