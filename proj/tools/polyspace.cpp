// polyspace: design-space generation and exploration for piecewise
// quadratic function evaluators.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "polyspace/bench.hpp"
#include "polyspace/bounds.hpp"
#include "polyspace/designspace.hpp"
#include "polyspace/emit.hpp"
#include "polyspace/error.hpp"
#include "polyspace/explore.hpp"
#include "polyspace/parallel.hpp"
#include "polyspace/verify.hpp"

using namespace polyspace;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kGeneration = 3, kResource = 4, kFormat = 5, kSpec = 6, kInternal = 70 };

struct SpecArgs {
  std::string function = "recip";
  int bits = 10;
  int n = -1, m = -1, p = -1, q = -1;
  std::string mode = "one-ulp";
  std::string table;
  int threads = 0;

  void add(CLI::App* app) {
    app->add_option("-f,--function", function, "recip | log2 | exp2 | table")->capture_default_str();
    app->add_option("-b,--bits", bits, "input fraction bits of a built-in function")->capture_default_str();
    app->add_option("--n", n, "input integer bits (overrides the built-in format)");
    app->add_option("--m", m, "input fraction bits (overrides the built-in format)");
    app->add_option("--p", p, "output integer bits (overrides the built-in format)");
    app->add_option("--q", q, "output fraction bits (overrides the built-in format)");
    app->add_option("--mode", mode, "one-ulp | faithful")->capture_default_str();
    app->add_option("--table", table, "bound-table file (function 'table')");
    app->add_option("-j,--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
  }

  ProblemSpec spec() const {
    ProblemSpec s;
    const FunctionId f = parse_function(function);
    if (f == FunctionId::CustomTable) {
      if (table.empty()) throw ConfigError("function 'table' needs --table");
      s.function = f;
      s.accuracy = AccuracyMode::ExplicitTable;
      s.table_path = table;
    } else {
      s = builtin_spec(f, bits, parse_accuracy(mode));
    }
    if (n >= 0) s.input.int_bits = n;
    if (m >= 0) s.input.frac_bits = m;
    if (p >= 0) s.output.int_bits = p;
    if (q >= 0) s.output.frac_bits = q;
    return s;
  }

  std::shared_ptr<const BoundTable> load(ProblemSpec* out = nullptr) const {
    const ProblemSpec s = spec();
    auto table_ptr = std::make_shared<const BoundTable>(load_bounds(s, threads));
    if (s.function == FunctionId::CustomTable &&
        ((n >= 0 || m >= 0 || p >= 0 || q >= 0) &&
         !(table_ptr->input() == s.input && table_ptr->output() == s.output))) {
      throw ConfigError("format flags disagree with the bound-table header");
    }
    if (out) *out = s;
    return table_ptr;
  }

  std::string describe(const BoundTable& t) const {
    std::ostringstream os;
    os << function << ' ' << t.input().int_bits << '.' << t.input().frac_bits << " -> "
       << t.output().int_bits << '.' << t.output().frac_bits;
    if (function != "table") os << ' ' << mode;
    return os.str();
  }
};

struct SpaceArgs {
  int k_max = -1;
  int window = -1;
  std::uint64_t enum_cap = SpaceOptions{}.enum_cap;
  bool no_skip = false;

  void add(CLI::App* app) {
    app->add_option("--k-max", k_max, "largest shift tried, -1 = 2(p+q)")->capture_default_str();
    app->add_option("--window", window, "clamp unconstrained coefficients to +-2^w, -1 = 2(p+q)")
        ->capture_default_str();
    app->add_option("--enum-cap", enum_cap, "a-values enumerated over all regions")->capture_default_str();
    app->add_flag("--no-skip", no_skip, "disable the chord-search row skipping");
  }

  SpaceOptions options(int threads) const {
    SpaceOptions o;
    o.k_max = k_max;
    o.window_bits = window;
    o.enum_cap = enum_cap;
    o.use_skip = !no_skip;
    o.threads = threads;
    return o;
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << text;
  if (!os) throw ConfigError("failed writing " + path);
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

int cmd_feasible(const SpecArgs& sa, const SpaceArgs& spa, int R, int r_min, int r_max, bool full) {
  auto table = sa.load();
  const int width = table->input().width();
  std::cout << "spec: " << sa.describe(*table) << '\n';
  const SpaceOptions opts = spa.options(sa.threads);
  FeasibilitySweep sweep;
  if (R >= 0) {
    sweep = min_feasible_R(*table, R, opts, R, true);
  } else {
    sweep = min_feasible_R(*table, r_max < 0 ? width : r_max, opts, r_min, full);
  }
  for (const auto& row : sweep.rows) {
    std::cout << "R=" << row.lookup_bits;
    if (row.infeasible == 0) {
      std::cout << " feasible\n";
    } else {
      std::cout << " infeasible: " << row.infeasible << '/' << row.regions
                << " regions, first region " << *row.first_failure << '\n';
    }
  }
  if (!sweep.min_lookup_bits) {
    std::cout << "no feasible R in range\n";
    return kFailed;
  }
  if (R < 0) std::cout << "min R = " << *sweep.min_lookup_bits << '\n';
  return kOk;
}

int cmd_generate(const SpecArgs& sa, const SpaceArgs& spa, int R, int k, const std::string& catalog_out,
                 const std::string& bounds_out) {
  auto table = sa.load();
  std::cout << "spec: " << sa.describe(*table) << '\n';
  if (!bounds_out.empty()) {
    std::ostringstream os;
    write_bound_table(os, *table);
    write_file(bounds_out, os.str());
  }
  const SpaceResult res = generate_space(table, R, k, spa.options(sa.threads));
  const auto& cat = res.catalog;
  std::uint64_t pairs = 0;
  for (std::size_t r = 0; r < cat.regions().size(); ++r) pairs += cat.pair_count(r);
  std::cout << "R=" << R << " k=" << cat.k() << ' ' << (cat.linear_sufficient() ? "linear" : "quadratic")
            << '\n';
  std::cout << "linear-sufficient: " << yes_no(cat.linear_sufficient()) << '\n';
  std::cout << "regions: " << cat.regions().size() << ", (a,b) pairs: " << pairs
            << ", complete: " << yes_no(cat.complete()) << '\n';
  std::cout << "chord search: rows scanned " << res.stats.rows_scanned << ", skipped "
            << res.stats.rows_skipped << ", pairs " << res.stats.pairs << '\n';
  if (!catalog_out.empty()) {
    std::ostringstream os;
    write_catalog(os, cat);
    write_file(catalog_out, os.str());
    std::cout << "catalog written to " << catalog_out << '\n';
  }
  return kOk;
}

struct BuildArgs {
  int R = -1;
  int k = -1;
  std::string order = "ijabc";
  std::uint64_t candidate_cap = ExploreOptions{}.candidate_cap;
  std::string name = "interp";
  bool clamp = false;
  bool keep_msbs = false;
  bool no_check = false;
  std::string design_out;
  std::string hdl_out;
};

int cmd_build(const SpecArgs& sa, const SpaceArgs& spa, const BuildArgs& ba) {
  auto table = sa.load();
  std::cout << "spec: " << sa.describe(*table) << '\n';
  const SpaceResult res = generate_space(table, ba.R, ba.k, spa.options(sa.threads));
  ExploreOptions eo;
  eo.order = ba.order;
  eo.candidate_cap = ba.candidate_cap;
  eo.threads = sa.threads;
  ExploreLog log;
  const SelectedDesign d = explore(res.catalog, eo, &log);
  for (const auto& line : log.lines) std::cout << line << '\n';
  HardwareDesign hw = pack_lut(d, ba.keep_msbs ? OutputTrim{} : constant_output_msbs(*table), ba.name);
  hw.clamp = ba.clamp;
  std::cout << "R=" << d.lookup_bits << " k=" << d.k << " i=" << d.i << " j=" << d.j << '\n';
  std::cout << width_report(hw) << '\n';
  if (d.mixed_fallback) std::cout << "note: a coefficient needs a sign bit (mixed signs)\n";
  if (d.incomplete) std::cout << "note: candidate enumeration was capped\n";
  const std::string design_path = ba.design_out.empty() ? ba.name + ".design" : ba.design_out;
  const std::string hdl_path = ba.hdl_out.empty() ? ba.name + ".v" : ba.hdl_out;
  write_file(design_path, emit_design_file(hw));
  write_file(hdl_path, emit_hdl(hw));
  std::cout << "design written to " << design_path << ", HDL to " << hdl_path << '\n';
  if (!ba.no_check) {
    CheckOptions co;
    co.threads = sa.threads;
    const CheckReport rep = check_design(hw, *table, co);
    std::cout << rep.text();
    return rep.passed ? kOk : kFailed;
  }
  return kOk;
}

int cmd_verify(const SpecArgs& sa, const std::string& design, std::uint64_t samples, std::uint64_t seed,
               const std::string& json_out) {
  auto table = sa.load();
  const HardwareDesign hw = read_design_file(design);
  CheckOptions co;
  co.samples = samples;
  co.seed = seed;
  co.threads = sa.threads;
  const CheckReport rep = check_design(hw, *table, co);
  std::cout << "design: " << design << " (" << width_report(hw) << ")\n";
  std::cout << rep.text();
  if (!json_out.empty()) write_file(json_out, rep.json() + "\n");
  return rep.passed ? kOk : kFailed;
}

int cmd_bench(const SpecArgs& sa, const SpaceArgs& spa, const std::vector<int>& Rs, int sweep_min,
              int sweep_max, int repeats) {
  auto table = sa.load();
  std::cout << "spec: " << sa.describe(*table) << '\n';
  std::cout << std::fixed << std::setprecision(4);
  SpaceOptions opts = spa.options(sa.threads);
  for (int R : Rs) {
    opts.use_skip = true;
    const GenerationTiming fast = time_generation(table, R, opts, repeats);
    opts.use_skip = false;
    const GenerationTiming slow = time_generation(table, R, opts, repeats);
    std::cout << "R=" << R << " k=" << fast.k << "  skip " << fast.seconds << " s (" << fast.stats.pairs
              << " pairs, " << fast.stats.rows_skipped << " rows skipped)  naive " << slow.seconds << " s ("
              << slow.stats.pairs << " pairs)  speedup " << std::setprecision(2)
              << slow.seconds / fast.seconds << "x" << std::setprecision(4) << '\n';
  }
  if (sweep_min >= 0 && sweep_max >= sweep_min) {
    opts.use_skip = !spa.no_skip;
    std::vector<std::pair<double, double>> pts;
    std::cout << "R   seconds   k\n";
    for (int R = sweep_min; R <= sweep_max; ++R) {
      const GenerationTiming t = time_generation(table, R, opts, repeats);
      std::cout << std::setw(2) << R << "  " << t.seconds << "  " << t.k << '\n';
      pts.emplace_back(R, t.seconds);
    }
    if (pts.size() >= 2) std::cout << "log-log slope of time vs R: " << std::setprecision(2) << loglog_slope(pts) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complete design-space generation for piecewise quadratic interpolators"};
  app.set_config("--config", "", "INI/TOML file; [section] names match subcommands");
  app.require_subcommand(1);
  app.fallthrough();

  SpecArgs sa;
  SpaceArgs spa;

  auto* feasible = app.add_subcommand("feasible", "smallest lookup-bit count with every region feasible");
  int f_R = -1, f_rmin = 0, f_rmax = -1;
  bool f_full = false;
  sa.add(feasible);
  spa.add(feasible);
  feasible->add_option("-R,--lookup-bits", f_R, "test a single R");
  feasible->add_option("--R-min", f_rmin, "sweep start")->capture_default_str();
  feasible->add_option("--R-max", f_rmax, "sweep end, -1 = n+m")->capture_default_str();
  feasible->add_flag("--full", f_full, "report every R in the sweep");

  auto* generate = app.add_subcommand("generate", "build the coefficient catalog");
  int g_R = -1, g_k = -1;
  std::string g_out, g_bounds;
  sa.add(generate);
  spa.add(generate);
  generate->add_option("-R,--lookup-bits", g_R, "lookup bits (required)");
  generate->add_option("-k,--shift", g_k, "shift, -1 = minimum")->capture_default_str();
  generate->add_option("-o,--catalog", g_out, "catalog output file");
  generate->add_option("--bounds-out", g_bounds, "write the bound table");

  auto* build = app.add_subcommand("build", "select a design and emit the LUT and HDL");
  BuildArgs ba;
  sa.add(build);
  spa.add(build);
  build->add_option("-R,--lookup-bits", ba.R, "lookup bits (required)");
  build->add_option("-k,--shift", ba.k, "shift, -1 = minimum")->capture_default_str();
  build->add_option("--order", ba.order, "decision order, a permutation of ijabc")->capture_default_str();
  build->add_option("--candidate-cap", ba.candidate_cap, "candidates taken from the catalog")->capture_default_str();
  build->add_option("--name", ba.name, "module name")->capture_default_str();
  build->add_flag("--clamp", ba.clamp, "saturate the result into the output format");
  build->add_flag("--keep-msbs", ba.keep_msbs, "emit constant output MSBs");
  build->add_flag("--no-check", ba.no_check, "skip the exhaustive self-check");
  build->add_option("-o,--design", ba.design_out, "design file, default <name>.design");
  build->add_option("--hdl", ba.hdl_out, "Verilog file, default <name>.v");

  auto* verify = app.add_subcommand("verify", "check a design file against the bounds");
  std::string v_design, v_json;
  std::uint64_t v_samples = 0, v_seed = 1;
  sa.add(verify);
  verify->add_option("-d,--design", v_design, "design file")->required();
  verify->add_option("--samples", v_samples, "random inputs to check, 0 = all")->capture_default_str();
  verify->add_option("--seed", v_seed, "sampling seed")->capture_default_str();
  verify->add_option("--json", v_json, "write a JSON report");

  auto* bench = app.add_subcommand("bench", "time skip-optimized against naive chord search");
  std::vector<int> b_R{8};
  int b_smin = -1, b_smax = -1, b_rep = 1;
  sa.add(bench);
  spa.add(bench);
  bench->add_option("-R,--lookup-bits", b_R, "lookup bits to compare")->capture_default_str();
  bench->add_option("--sweep-min", b_smin, "first R of the timing sweep");
  bench->add_option("--sweep-max", b_smax, "last R of the timing sweep");
  bench->add_option("--repeat", b_rep, "repeats per timing (fastest kept)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  sa.threads = resolve_threads(sa.threads);

  try {
    if ((*generate && g_R < 0) || (*build && ba.R < 0)) throw ConfigError("--lookup-bits is required");
    if (*feasible) return cmd_feasible(sa, spa, f_R, f_rmin, f_rmax, f_full);
    if (*generate) return cmd_generate(sa, spa, g_R, g_k, g_out, g_bounds);
    if (*build) return cmd_build(sa, spa, ba);
    if (*verify) return cmd_verify(sa, v_design, v_samples, v_seed, v_json);
    if (*bench) return cmd_bench(sa, spa, b_R, b_smin, b_smax, b_rep);
  } catch (const GenerationError& e) {
    std::cerr << "generation error: " << e.what() << " (region " << e.region() << ")\n";
    return kGeneration;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const SpecError& e) {
    std::cerr << "specification error: " << e.what() << '\n';
    return kSpec;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
