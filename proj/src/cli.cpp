#include "coulosc/cli.hpp"

#include "coulosc/bounds.hpp"
#include "coulosc/exact.hpp"
#include "coulosc/oracle.hpp"
#include "coulosc/scan.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace coulosc::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting

std::string fixed18(const Real& x) { return x.str(18, std::ios_base::fixed); }

std::string fixed18(double x) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.18f", x);
  return buf;
}

std::string sig(const Real& x, int digits = 20) { return scan::format_significant(x, digits); }

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

// One output record in the shared schema
// param1,param2,label_n,label_l,label_name,energy,solver,converged.
struct Record {
  std::string param1, param2;
  LevelLabel label;
  std::string energy;
  std::string solver;
  bool converged = true;
};

std::string records_csv(const std::vector<Record>& rows) {
  std::ostringstream out;
  out << "param1,param2,label_n,label_l,label_name,energy,solver,converged\n";
  for (const auto& r : rows) {
    out << r.param1 << ',' << r.param2 << ',' << r.label.n << ',' << r.label.l << ',' << r.label.name() << ','
        << r.energy << ',' << r.solver << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string json_number(const std::string& s) { return s.empty() ? "null" : s; }

std::string records_json(const std::vector<Record>& rows) {
  std::ostringstream out;
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\"param1\": " << json_number(r.param1) << ", \"param2\": " << json_number(r.param2)
        << ", \"label_n\": " << r.label.n << ", \"label_l\": " << r.label.l << ", \"label_name\": \""
        << r.label.name() << "\", \"energy\": " << json_number(r.energy) << ", \"solver\": \"" << r.solver
        << "\", \"converged\": " << (r.converged ? "true" : "false") << '}' << (i + 1 < rows.size() ? "," : "")
        << '\n';
  }
  out << "]\n";
  return out.str();
}

std::string records(const std::vector<Record>& rows, OutputFormat format) {
  return format == OutputFormat::Json ? records_json(rows) : records_csv(rows);
}

// ---------------------------------------------------------------------------
// Flag helpers

template <typename T>
const T& need(const std::optional<T>& v, const char* flag, const char* command) {
  if (!v) throw UsageError(std::string("missing ") + flag + " (required by " + command + ")");
  return *v;
}

bool names_free_space(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "inf" || lower == "infinity" || lower == "free";
}

/// --radius: empty or "inf" -> free problem (or `fallback` for scans).
std::optional<std::string> radius_text(const RunConfig& cfg, std::optional<double> fallback) {
  if (!cfg.radius) {
    if (fallback) return scan::format_shortest(*fallback);
    return std::nullopt;
  }
  if (names_free_space(*cfg.radius)) return std::nullopt;
  return cfg.radius;
}

Real parse_real(const std::string& text, const char* flag) {
  try {
    std::size_t used = 0;
    (void)std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": '" + text + "' is not a number");
  }
  return real_from_string(text);
}

double parse_double(const std::string& text, const char* flag) { return to_double(parse_real(text, flag)); }

LevelLabel resolve_label(const RunConfig& cfg, const char* command) {
  if (cfg.level) {
    if (cfg.l || cfg.nodes) throw UsageError("--level cannot be combined with --l/--nodes");
    try {
      return parse_label(*cfg.level);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--level: ") + e.what());
    }
  }
  return {need(cfg.nodes, "--nodes", command), need(cfg.l, "--l", command)};
}

LevelLabel parse_level_flag(const std::optional<std::string>& v, const char* flag, const char* command) {
  try {
    return parse_label(need(v, flag, command));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::vector<LevelLabel> parse_levels(const std::string& list) {
  std::vector<LevelLabel> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) continue;
    try {
      out.push_back(parse_label(item));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--levels: ") + e.what());
    }
  }
  if (out.empty()) throw UsageError("--levels: no level names given");
  return out;
}

scan::Param parse_param(const std::string& name, const char* flag) {
  if (name == "a") return scan::Param::A;
  if (name == "b") return scan::Param::B;
  if (name == "R" || name == "r" || name == "radius") return scan::Param::R;
  throw UsageError(std::string(flag) + ": expected one of a, b, R");
}

PotentialSpec<Real> real_spec(const RunConfig& cfg, const char* command, std::optional<double> radius_fallback) {
  PotentialSpec<Real> spec;
  spec.a = parse_real(need(cfg.a, "--a", command), "--a");
  spec.b = parse_real(need(cfg.b, "--b", command), "--b");
  if (auto r = radius_text(cfg, radius_fallback)) spec.wall = parse_real(*r, "--radius");
  return spec;
}

scan::EnergyOptions energy_options(const RunConfig& cfg, const std::optional<SolverFlag>& solver) {
  scan::EnergyOptions opt;
  const SolverFlag s = solver.value_or(SolverFlag::Oracle);
  if (s == SolverFlag::Both) throw UsageError("--solver both is only available for solve");
  opt.solver = s == SolverFlag::Aim ? scan::Solver::Aim : scan::Solver::Oracle;
  opt.precision = cfg.precision;
  if (cfg.r0) opt.r0 = parse_double(*cfg.r0, "--r0");
  opt.max_iter = cfg.max_iter;
  return opt;
}

// ---------------------------------------------------------------------------
// Commands

std::string cmd_solve(const RunConfig& cfg, const std::optional<SolverFlag>& solver) {
  ScopedPrecision guard(cfg.precision);
  const auto spec = real_spec(cfg, "solve", std::nullopt);
  const LevelLabel label = resolve_label(cfg, "solve");
  const SolverFlag which = solver.value_or(SolverFlag::Aim);
  std::optional<Real> r0;
  if (cfg.r0) r0 = parse_real(*cfg.r0, "--r0");

  std::optional<EigenResult<Real>> aim_result;
  std::optional<EigenResult<double>> grid_result;
  if (which != SolverFlag::Oracle) aim_result = scan::aim_level(spec, label, cfg.precision, r0, cfg.max_iter);
  if (which != SolverFlag::Aim) grid_result = oracle::solve_level(spec.cast<double>(), label);

  const std::string p1 = *cfg.b;
  const std::string p2 = spec.confined() ? *radius_text(cfg, std::nullopt) : "";
  if (cfg.format != OutputFormat::Text) {
    std::vector<Record> rows;
    if (aim_result) rows.push_back({p1, p2, label, sig(aim_result->energy, 18), "aim", true});
    if (grid_result) rows.push_back({p1, p2, label, scan::format_significant(grid_result->energy), "oracle", true});
    return records(rows, cfg.format);
  }
  std::ostringstream out;
  if (which != SolverFlag::Both) {
    out << (aim_result ? fixed18(aim_result->energy) : fixed18(grid_result->energy)) << '\n';
    return out.str();
  }
  const double diff = std::abs(to_double(aim_result->energy) - grid_result->energy);
  out << "level      " << label.name() << " (n = " << label.n << ", l = " << label.l << ")\n";
  out << "aim        " << fixed18(aim_result->energy) << "  (N = " << aim_result->iterations << ")\n";
  out << "oracle     " << fixed18(grid_result->energy) << '\n';
  out << "agreement  " << (diff <= 1e-8 ? "true" : "false") << "  (|difference| = " << sci(diff) << ")\n";
  return out.str();
}

std::string polynomial_text(const Polynomial<Real>& p) {
  std::ostringstream out;
  for (int k = 0; k <= p.degree(); ++k) {
    if (k > 0) out << (p[k] < 0 ? " - " : " + ");
    out << sig(k > 0 ? Real(abs(p[k])) : p[k], 20);
    if (k == 1) out << " r";
    if (k > 1) out << " r^" << k;
  }
  return out.str();
}

std::string cmd_exact(const RunConfig& cfg) {
  ScopedPrecision guard(cfg.precision);
  const int n = need(cfg.degree, "--n", "exact");
  const int l = need(cfg.l, "--l", "exact");
  const std::string& fix = need(cfg.fix, "--fix", "exact");
  const auto eq = fix.find('=');
  if (eq == std::string::npos) throw UsageError("--fix: expected key=value with key a, b or R");
  exact::Fixed fixed;
  const std::string key = fix.substr(0, eq);
  if (key == "a") {
    fixed.which = exact::Param::A;
  } else if (key == "b") {
    fixed.which = exact::Param::B;
  } else if (key == "R" || key == "r") {
    fixed.which = exact::Param::R;
  } else {
    throw UsageError("--fix: unknown parameter '" + key + "' (use a, b or R)");
  }
  fixed.value = parse_real(fix.substr(eq + 1), "--fix");
  if (!cfg.confined && fixed.which == exact::Param::R) throw UsageError("--fix R=... needs --confined");

  const auto conditions = cfg.confined ? exact::confined_qes_solve(n, l, fixed, cfg.precision)
                                       : exact::free_qes_solve(n, l, fixed, cfg.precision);
  std::ostringstream out;
  if (cfg.format == OutputFormat::Json) {
    out << "[\n";
    for (std::size_t i = 0; i < conditions.size(); ++i) {
      const auto& c = conditions[i];
      out << "  {\"n\": " << c.n << ", \"l\": " << l << ", \"a\": " << sig(c.a) << ", \"b\": " << sig(c.b)
          << ", \"sqrt2b\": " << sig(c.sqrt2b()) << ", \"R\": " << (c.radius ? sig(*c.radius) : "null")
          << ", \"energy\": " << sig(c.energy) << ", \"nodes\": " << c.node_count << ", \"label_name\": \""
          << c.label.name() << "\"}" << (i + 1 < conditions.size() ? "," : "") << '\n';
    }
    out << "]\n";
    return out.str();
  }
  if (cfg.format == OutputFormat::Csv) {
    out << "n,l,a,b,sqrt2b,R,energy,nodes,label_name\n";
    for (const auto& c : conditions) {
      out << c.n << ',' << l << ',' << sig(c.a) << ',' << sig(c.b) << ',' << sig(c.sqrt2b()) << ','
          << (c.radius ? sig(*c.radius) : "") << ',' << sig(c.energy) << ',' << c.node_count << ','
          << c.label.name() << '\n';
    }
    return out.str();
  }
  out << (cfg.confined ? "confined" : "free") << " problem, polynomial degree n = " << n << ", l = " << l << ", "
      << conditions.size() << " solution" << (conditions.size() == 1 ? "" : "s") << '\n';
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    const auto& c = conditions[i];
    out << "\nsolution " << i + 1 << '\n';
    out << "  a        = " << sig(c.a) << '\n';
    out << "  b        = " << sig(c.b) << '\n';
    out << "  sqrt(2b) = " << sig(c.sqrt2b()) << '\n';
    if (c.radius) out << "  R        = " << sig(*c.radius) << '\n';
    out << "  E        = " << sig(c.energy) << '\n';
    out << "  nodes    = " << c.node_count << " (level " << c.label.name() << ")\n";
    out << "  f(r)     = " << polynomial_text(c.poly) << '\n';
    out << "  residuals:";
    for (const auto& r : c.constraint_residuals) out << ' ' << sci(to_double(r));
    out << '\n';
  }
  return out.str();
}

std::string cmd_bounds(const RunConfig& cfg) {
  ScopedPrecision guard(cfg.precision);
  const auto spec = real_spec(cfg, "bounds", std::nullopt);
  const LevelLabel label = resolve_label(cfg, "bounds");
  std::ostringstream out;
  out << "heisenberg_lower  " << fixed18(bounds::heisenberg_lower(spec, cfg.precision).value) << '\n';
  if (spec.confined()) {
    out << "(envelope bounds are derived for the free problem only)\n";
    return out.str();
  }
  using bounds::EnvelopeVariant;
  const auto lower = bounds::envelope_bound(spec, label, EnvelopeVariant::LowerEnvelope, cfg.precision);
  const auto upper = bounds::envelope_bound(spec, label, EnvelopeVariant::UpperEnvelope, cfg.precision);
  const auto sum = bounds::envelope_bound(spec, label, EnvelopeVariant::SumApprox, cfg.precision);
  out << "level             " << label.name() << '\n';
  out << "lower_envelope    " << fixed18(lower.value) << '\n';
  out << "upper_envelope    " << fixed18(upper.value) << '\n';
  out << "sum_approx        " << fixed18(sum.value) << '\n';
  if (lower.outside_stated_derivation) out << "(a <= 0: outside the stated derivation of the envelope bounds)\n";
  if (spec.a > 0) {
    using bounds::CriticalChoice;
    out << "b_hat_upper       " << sig(bounds::critical_b_estimate(spec.a, label, CriticalChoice::UpperBound), 6)
        << '\n';
    out << "b_hat_lower       " << sig(bounds::critical_b_estimate(spec.a, label, CriticalChoice::LowerBound), 6)
        << '\n';
    if (label.nu() == label.l + 1) {
      out << "b_hat_sum_lower   "
          << sig(bounds::critical_b_estimate(spec.a, label, CriticalChoice::SumLower), 6) << '\n';
    }
  }
  return out.str();
}

std::optional<double> scan_radius(const RunConfig& cfg) {
  const auto r = radius_text(cfg, scan::kEffectivelyFreeRadius);
  if (!r) return std::nullopt;
  return parse_double(*r, "--radius");
}

std::string cmd_scan_bc(const RunConfig& cfg, const std::optional<SolverFlag>& solver) {
  const double a = parse_double(need(cfg.a, "--a", "scan-bc"), "--a");
  const auto radius = scan_radius(cfg);
  const LevelLabel label = resolve_label(cfg, "scan-bc");
  std::optional<std::pair<double, double>> window;
  if (cfg.b_min || cfg.b_max) window = {need(cfg.b_min, "--b-min", "scan-bc"), need(cfg.b_max, "--b-max", "scan-bc")};
  const auto bc = scan::find_bc(a, radius, label, window, energy_options(cfg, solver));
  const std::string r_text = radius ? scan::format_shortest(*radius) : "inf";
  std::ostringstream out;
  if (cfg.format == OutputFormat::Json) {
    out << "{\"label_name\": \"" << label.name() << "\", \"label_n\": " << label.n << ", \"label_l\": " << label.l
        << ", \"a\": " << scan::format_shortest(a) << ", \"R\": " << (radius ? r_text : "null")
        << ", \"b_c\": " << scan::format_significant(bc.b_c, 6)
        << ", \"bracket\": [" << scan::format_significant(bc.bracket.first) << ", "
        << scan::format_significant(bc.bracket.second) << "]}\n";
  } else if (cfg.format == OutputFormat::Csv) {
    out << "label_n,label_l,label_name,a,R,b_c,b_lo,b_hi\n"
        << label.n << ',' << label.l << ',' << label.name() << ',' << scan::format_shortest(a) << ','
        << (radius ? r_text : "") << ',' << scan::format_significant(bc.b_c, 6) << ','
        << scan::format_significant(bc.bracket.first) << ',' << scan::format_significant(bc.bracket.second) << '\n';
  } else {
    out << "b_c(" << label.name() << ") = " << scan::format_significant(bc.b_c, 6) << "  (a = " << cfg.a.value()
        << ", R = " << r_text << ", E(b_c) = " << sci(bc.energy_at_b_c) << ")\n";
  }
  return out.str();
}

std::string cmd_ordering(const RunConfig& cfg, const std::optional<SolverFlag>& solver) {
  const double a = parse_double(need(cfg.a, "--a", "ordering"), "--a");
  const double b = parse_double(need(cfg.b, "--b", "ordering"), "--b");
  const auto radius = scan_radius(cfg);
  if (cfg.max_nu < 1) throw UsageError("--max-nu must be >= 1");
  const auto table = scan::ordering(a, b, radius, scan::labels_up_to(cfg.max_nu), energy_options(cfg, solver));
  const std::size_t shown = cfg.count > 0 ? std::min<std::size_t>(cfg.count, table.entries.size())
                                          : table.entries.size();
  const std::string solver_name = energy_options(cfg, solver).solver == scan::Solver::Aim ? "aim" : "oracle";
  if (cfg.format != OutputFormat::Text) {
    std::vector<Record> rows;
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& e = table.entries[i];
      rows.push_back({*cfg.b, radius ? scan::format_shortest(*radius) : "", e.label,
                      scan::format_significant(e.energy), solver_name, true});
    }
    return records(rows, cfg.format);
  }
  std::ostringstream out;
  out << table.sequence(shown) << '\n';
  for (std::size_t i = 0; i < shown; ++i) {
    out << "  " << table.entries[i].label.name() << "  " << fixed18(table.entries[i].energy) << '\n';
  }
  return out.str();
}

std::string cmd_cross(const RunConfig& cfg, const std::optional<SolverFlag>& solver) {
  const LevelLabel first = parse_level_flag(cfg.level1, "--level1", "cross");
  const LevelLabel second = parse_level_flag(cfg.level2, "--level2", "cross");
  const scan::Param vary = parse_param(need(cfg.vary, "--vary", "cross"), "--vary");
  const double from = need(cfg.from, "--from", "cross");
  const double to = need(cfg.to, "--to", "cross");
  PotentialSpec<double> fixed;
  fixed.a = parse_double(need(cfg.a, "--a", "cross"), "--a");
  if (vary != scan::Param::B) fixed.b = parse_double(need(cfg.b, "--b", "cross"), "--b");
  if (vary != scan::Param::R) fixed.wall = scan_radius(cfg);
  const auto event = scan::find_crossing({first, second}, vary, fixed, {from, to}, energy_options(cfg, solver));
  std::ostringstream out;
  if (cfg.format == OutputFormat::Json) {
    out << "{\"level_lo\": \"" << event.level_lo.name() << "\", \"level_hi\": \"" << event.level_hi.name()
        << "\", \"parameter\": \"" << scan::to_string(vary) << "\", \"crossing_value\": "
        << scan::format_significant(event.crossing_value, 10)
        << ", \"energy\": " << scan::format_significant(event.energies_equal_at, 10) << "}\n";
  } else if (cfg.format == OutputFormat::Csv) {
    out << "level_lo,level_hi,parameter,crossing_value,energy\n"
        << event.level_lo.name() << ',' << event.level_hi.name() << ',' << scan::to_string(vary) << ','
        << scan::format_significant(event.crossing_value, 10) << ','
        << scan::format_significant(event.energies_equal_at, 10) << '\n';
  } else {
    out << event.level_lo.name() << " and " << event.level_hi.name() << " cross at " << scan::to_string(vary)
        << " = " << scan::format_significant(event.crossing_value, 10)
        << " (E = " << scan::format_significant(event.energies_equal_at, 10) << "); " << event.level_lo.name()
        << " lies lower at " << scan::to_string(vary) << " = " << from << '\n';
  }
  return out.str();
}

std::string cmd_sweep(const RunConfig& cfg, const std::optional<SolverFlag>& solver) {
  scan::SweepSpec spec;
  spec.labels = parse_levels(need(cfg.levels, "--levels", "sweep"));
  auto axis = [](const std::string& name, const char* flag, double from, double to, int steps, bool log) {
    if (steps < 1) throw UsageError("sweep axes need at least one step");
    const auto p = parse_param(name, flag);
    if (log && !(from > 0 && to > 0)) throw UsageError("logarithmic axes need positive end points");
    return log ? scan::Axis::logspace(p, from, to, steps) : scan::Axis::linspace(p, from, to, steps);
  };
  spec.first = axis(need(cfg.vary, "--vary", "sweep"), "--vary", need(cfg.from, "--from", "sweep"),
                    need(cfg.to, "--to", "sweep"), cfg.steps, cfg.log_axis);
  if (cfg.vary2) {
    spec.second = axis(*cfg.vary2, "--vary2", need(cfg.from2, "--from2", "sweep"), need(cfg.to2, "--to2", "sweep"),
                       cfg.steps2, cfg.log_axis2);
    if (spec.second->param == spec.first.param) throw UsageError("--vary2 must differ from --vary");
  }
  auto on_axis = [&](scan::Param p) {
    return spec.first.param == p || (spec.second && spec.second->param == p);
  };
  if (!on_axis(scan::Param::A)) spec.base.a = parse_double(need(cfg.a, "--a", "sweep"), "--a");
  if (!on_axis(scan::Param::B)) spec.base.b = parse_double(need(cfg.b, "--b", "sweep"), "--b");
  if (!on_axis(scan::Param::R)) spec.base.wall = scan_radius(cfg);
  spec.energy = energy_options(cfg, solver);
  spec.workers = cfg.workers;
  const auto rows = scan::sweep(spec);
  if (cfg.format == OutputFormat::Json) return scan::to_json(rows);
  return scan::to_csv(rows);
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (!cfg.output) {
    out << text;
    return;
  }
  std::ofstream file(*cfg.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + *cfg.output + " for writing");
  file << text;
  if (!file) throw std::runtime_error("failed writing " + *cfg.output);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"coulosc: eigenvalues of -1/2 psi'' + [l(l+1)/(2r^2) - a/r + b r^2] psi = E psi, free or inside a wall"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read 'key = value' defaults from a file; flags take precedence");

  RunConfig cfg;
  std::string a, b, radius, level, r0, output, fix, level1, level2, vary, vary2, levels;
  std::string solver_name, format_name = "text";
  int l = 0, nodes = 0, degree = 0;
  double b_min = 0, b_max = 0, from = 0, to = 0, from2 = 0, to2 = 0;
  unsigned bits = cfg.precision.mantissa_bits;
  double tol = cfg.precision.tol;

  auto* o_a = app.add_option("--a", a, "Coulomb coupling a")->check(CLI::Number);
  auto* o_b = app.add_option("--b", b, "oscillator coupling b")->check(CLI::Number);
  auto* o_radius = app.add_option("--radius", radius, "wall radius R (omit or 'inf' for free space)");
  auto* o_l = app.add_option("--l", l, "angular momentum l")->check(CLI::NonNegativeNumber);
  auto* o_nodes = app.add_option("--nodes", nodes, "radial node count n")->check(CLI::NonNegativeNumber);
  auto* o_level = app.add_option("--level", level, "level name such as 3d (instead of --l/--nodes)");
  app.add_option("--precision-bits", bits, "mantissa bits of the working precision")->check(CLI::Range(64u, 1u << 20));
  app.add_option("--tol", tol, "root tolerance in energy units")->check(CLI::PositiveNumber);
  auto* o_r0 = app.add_option("--r0", r0, "AIM evaluation point")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", cfg.max_iter, "maximum AIM iterations")->check(CLI::PositiveNumber);
  auto* o_solver = app.add_option("--solver", solver_name, "aim, oracle or both")
                       ->check(CLI::IsMember({"aim", "oracle", "both"}));
  auto* o_output = app.add_option("--output", output, "write results to this file");
  app.add_option("--format", format_name, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_flag("--confined", cfg.confined, "exact: solve the walled problem");
  auto* o_degree = app.add_option("--n", degree, "exact: polynomial degree")->check(CLI::NonNegativeNumber);
  auto* o_fix = app.add_option("--fix", fix, "exact: the fixed parameter, e.g. a=1, b=0.5 or R=2");
  auto* o_bmin = app.add_option("--b-min", b_min, "scan-bc: lower end of the b window")->check(CLI::NonNegativeNumber);
  auto* o_bmax = app.add_option("--b-max", b_max, "scan-bc: upper end of the b window")->check(CLI::PositiveNumber);
  app.add_option("--max-nu", cfg.max_nu, "ordering: include levels with nu <= max-nu");
  app.add_option("--count", cfg.count, "ordering: show the lowest count levels")->check(CLI::NonNegativeNumber);
  auto* o_level1 = app.add_option("--level1", level1, "cross: first level");
  auto* o_level2 = app.add_option("--level2", level2, "cross: second level");
  auto* o_vary = app.add_option("--vary", vary, "cross/sweep: varied parameter (a, b or R)");
  auto* o_from = app.add_option("--from", from, "cross/sweep: start of the parameter range");
  auto* o_to = app.add_option("--to", to, "cross/sweep: end of the parameter range");
  app.add_option("--steps", cfg.steps, "sweep: points on the first axis")->check(CLI::PositiveNumber);
  app.add_flag("--log", cfg.log_axis, "sweep: logarithmic spacing on the first axis");
  auto* o_vary2 = app.add_option("--vary2", vary2, "sweep: second varied parameter");
  auto* o_from2 = app.add_option("--from2", from2, "sweep: start of the second range");
  auto* o_to2 = app.add_option("--to2", to2, "sweep: end of the second range");
  app.add_option("--steps2", cfg.steps2, "sweep: points on the second axis")->check(CLI::PositiveNumber);
  app.add_flag("--log2", cfg.log_axis2, "sweep: logarithmic spacing on the second axis");
  auto* o_levels = app.add_option("--levels", levels, "sweep: comma-separated level names, e.g. 4s,4p,4d");
  app.add_option("--workers", cfg.workers, "sweep: worker threads (0 = all cores)");

  const std::pair<const char*, Command> commands[] = {
      {"solve", Command::Solve},       {"exact", Command::Exact},       {"bounds", Command::Bounds},
      {"scan-bc", Command::ScanBc},    {"ordering", Command::Ordering}, {"cross", Command::Cross},
      {"sweep", Command::Sweep}};
  const char* descriptions[] = {"energy of one level (AIM, grid oracle or both)",
                                "parameter sets with polynomial (quasi-exact) eigenfunctions",
                                "analytic energy bounds and critical-coupling estimates",
                                "critical oscillator coupling b_c where a level crosses E = 0",
                                "levels in ascending energy order",
                                "parameter value where two levels cross",
                                "energies on a parameter grid (CSV or JSON)"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) subs.push_back(app.add_subcommand(commands[i].first, descriptions[i]));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) cfg.command = commands[i].second;
  }
  auto take = [](CLI::Option* opt, const auto& value, auto& field) {
    if (opt->count() > 0) field = value;
  };
  take(o_a, a, cfg.a);
  take(o_b, b, cfg.b);
  take(o_radius, radius, cfg.radius);
  take(o_l, l, cfg.l);
  take(o_nodes, nodes, cfg.nodes);
  take(o_level, level, cfg.level);
  take(o_r0, r0, cfg.r0);
  take(o_output, output, cfg.output);
  take(o_degree, degree, cfg.degree);
  take(o_fix, fix, cfg.fix);
  take(o_bmin, b_min, cfg.b_min);
  take(o_bmax, b_max, cfg.b_max);
  take(o_level1, level1, cfg.level1);
  take(o_level2, level2, cfg.level2);
  take(o_vary, vary, cfg.vary);
  take(o_from, from, cfg.from);
  take(o_to, to, cfg.to);
  take(o_vary2, vary2, cfg.vary2);
  take(o_from2, from2, cfg.from2);
  take(o_to2, to2, cfg.to2);
  take(o_levels, levels, cfg.levels);
  cfg.precision = PrecisionCtx{bits, tol};
  cfg.format = format_name == "csv" ? OutputFormat::Csv : format_name == "json" ? OutputFormat::Json : OutputFormat::Text;
  std::optional<SolverFlag> solver;
  if (o_solver->count() > 0) {
    solver = solver_name == "aim" ? SolverFlag::Aim : solver_name == "oracle" ? SolverFlag::Oracle : SolverFlag::Both;
    cfg.solver = *solver;
  }

  try {
    cfg.precision.validate();
    std::string text;
    switch (cfg.command) {
      case Command::Solve: text = cmd_solve(cfg, solver); break;
      case Command::Exact: text = cmd_exact(cfg); break;
      case Command::Bounds: text = cmd_bounds(cfg); break;
      case Command::ScanBc: text = cmd_scan_bc(cfg, solver); break;
      case Command::Ordering: text = cmd_ordering(cfg, solver); break;
      case Command::Cross: text = cmd_cross(cfg, solver); break;
      case Command::Sweep: text = cmd_sweep(cfg, solver); break;
    }
    emit(cfg, text, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for the list of flags.\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "error: " << e.name() << ": " << e.what() << "\nhint: " << e.hint() << '\n';
    return kExitNotConverged;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace coulosc::cli
