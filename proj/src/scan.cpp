#include "coulosc/scan.hpp"

#include "coulosc/aim.hpp"
#include "coulosc/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace coulosc::scan {

// ---------------------------------------------------------------------------
// Level energies

EigenResult<Real> aim_level(const PotentialSpec<Real>& spec, const LevelLabel& label, const PrecisionCtx& precision,
                            std::optional<Real> r0, int max_iter, const oracle::OracleOptions& oracle_options) {
  ScopedPrecision guard(precision);
  const PotentialSpec<double> approx = spec.cast<double>();
  auto grid_energy = [&](int n) { return oracle::solve_level(approx, {n, label.l}, oracle_options).energy; };
  const double center = grid_energy(label.n);
  const double above = grid_energy(label.n + 1) - center;
  const double below = label.n > 0 ? center - grid_energy(label.n - 1) : above;
  const Real lo = Real(center) - Real(below) / 4;
  const Real hi = Real(center) + Real(above) / 4;

  const auto problem = aim::AimProblem::make(spec, label.l, precision, std::move(r0), max_iter);
  EigenResult<Real> result = aim::aim_solve(problem, {lo, hi}, 1);
  result.label = label;
  return result;
}

double level_energy(const PotentialSpec<double>& spec, const LevelLabel& label, const EnergyOptions& options) {
  if (options.solver == Solver::Oracle) return oracle::solve_level(spec, label, options.oracle).energy;
  ScopedPrecision guard(options.precision);
  std::optional<Real> r0;
  if (options.r0) r0 = Real(*options.r0);
  const auto result =
      aim_level(spec.cast<Real>(), label, options.precision, std::move(r0), options.max_iter, options.oracle);
  return to_double(result.energy);
}

// ---------------------------------------------------------------------------
// Critical couplings

CriticalCoupling find_bc(double a, std::optional<double> radius, const LevelLabel& label,
                         std::optional<std::pair<double, double>> b_window, const EnergyOptions& options) {
  if (radius && !(*radius > 0)) throw std::invalid_argument("radius must be positive");
  auto energy = [&](double b) {
    const auto spec = radius ? PotentialSpec<double>::walled(a, b, *radius) : PotentialSpec<double>::free(a, b);
    return level_energy(spec, label, options);
  };
  double lo = 0, hi = 0;
  if (b_window) {
    std::tie(lo, hi) = *b_window;
  } else {
    if (!(a > 0)) throw NoSignChange("with a <= 0 every level is positive for all b >= 0");
    hi = 2 * to_double(bounds::critical_b_estimate(Real(a), label, bounds::CriticalChoice::UpperBound));
  }
  if (!(lo >= 0) || !(hi > lo)) throw std::invalid_argument("b window must satisfy 0 <= low < high");

  const double e_lo = energy(lo);
  const double e_hi = energy(hi);
  if (!(e_lo < 0 && e_hi > 0)) {
    throw NoSignChange("E(" + label.name() + ") does not cross zero for b in the window (E = " +
                       std::to_string(e_lo) + " .. " + std::to_string(e_hi) + ")");
  }
  // E rises with b (monotonicity law); bisect geometrically once lo > 0.
  while (hi - lo > 1e-10 * hi) {
    const double mid = lo > 0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    (energy(mid) < 0 ? lo : hi) = mid;
  }
  CriticalCoupling out;
  out.label = label;
  out.a = a;
  out.radius = radius;
  out.b_c = 0.5 * (lo + hi);
  out.bracket = {lo, hi};
  out.energy_at_b_c = energy(out.b_c);
  if (!(std::abs(out.energy_at_b_c) <= 1e-8)) {
    throw NotConverged("|E(b_c)| = " + std::to_string(out.energy_at_b_c) + " exceeds 1e-8");
  }
  return out;
}

bool ReferenceCheck::agrees() const { return std::abs(computed - printed_value) <= tolerance; }

double unit_in_last_place(const std::string& printed) {
  const auto dot = printed.find('.');
  if (dot == std::string::npos) return 1.0;
  const auto decimals = static_cast<int>(printed.size() - dot - 1);
  return std::pow(10.0, -decimals);
}

ReferenceCheck check_against(const LevelLabel& label, double computed, const std::string& printed) {
  ReferenceCheck c;
  c.label = label;
  c.computed = computed;
  c.printed = printed;
  c.printed_value = std::stod(printed);
  c.tolerance = unit_in_last_place(printed);
  return c;
}

std::vector<std::string> discrepancy_report(const std::vector<ReferenceCheck>& checks) {
  std::vector<std::string> lines;
  for (const auto& c : checks) {
    if (c.agrees()) continue;
    lines.push_back(c.label.name() + ": computed " + format_significant(c.computed, 6) + ", printed " + c.printed +
                    " (tolerance " + format_significant(c.tolerance, 1) + ")");
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Ordering

std::vector<LevelLabel> labels_up_to(int max_nu) {
  std::vector<LevelLabel> out;
  for (int nu = 1; nu <= max_nu; ++nu) {
    for (int l = 0; l < nu; ++l) out.push_back({nu - l - 1, l});
  }
  return out;
}

std::string OrderingTable::sequence(std::size_t max_levels) const {
  std::string out;
  std::size_t count = 0;
  for (const auto& group : groups) {
    if (max_levels != 0 && count >= max_levels) break;
    if (group.size() > 1) out += '(';
    for (const auto& label : group) out += label.name();
    if (group.size() > 1) out += ')';
    count += group.size();
  }
  return out;
}

OrderingTable ordering(double a, double b, std::optional<double> radius, const std::vector<LevelLabel>& labels,
                       const EnergyOptions& options, double degeneracy) {
  OrderingTable table;
  table.a = a;
  table.b = b;
  table.radius = radius;
  const auto spec = radius ? PotentialSpec<double>::walled(a, b, *radius) : PotentialSpec<double>::free(a, b);
  for (const auto& label : labels) table.entries.push_back({label, level_energy(spec, label, options)});
  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [](const OrderingEntry& x, const OrderingEntry& y) { return x.energy < y.energy; });
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const bool tie = i > 0 && table.entries[i].energy - table.entries[i - 1].energy <= degeneracy;
    if (!tie) table.groups.emplace_back();
    table.groups.back().push_back(table.entries[i].label);
  }
  for (auto& group : table.groups) std::sort(group.begin(), group.end(), [](const LevelLabel& x, const LevelLabel& y) {
    return x.nu() != y.nu() ? x.nu() < y.nu() : x.l < y.l;
  });
  return table;
}

// ---------------------------------------------------------------------------
// Crossings

const char* to_string(Param p) {
  switch (p) {
    case Param::A: return "a";
    case Param::B: return "b";
    case Param::R: return "R";
  }
  return "?";
}

namespace {

PotentialSpec<double> with_param(PotentialSpec<double> spec, Param p, double value) {
  switch (p) {
    case Param::A: spec.a = value; break;
    case Param::B: spec.b = value; break;
    case Param::R: spec.wall = value; break;
  }
  return spec;
}

}  // namespace

CrossingEvent find_crossing(const std::pair<LevelLabel, LevelLabel>& pair, Param vary,
                            const PotentialSpec<double>& fixed, std::pair<double, double> window,
                            const EnergyOptions& options) {
  auto [lo, hi] = window;
  if (!(lo < hi)) throw std::invalid_argument("window must satisfy low < high");
  auto diff = [&](double x) {
    const auto spec = with_param(fixed, vary, x);
    return level_energy(spec, pair.first, options) - level_energy(spec, pair.second, options);
  };
  const double d_lo = diff(lo);
  const double d_hi = diff(hi);
  if (!((d_lo < 0 && d_hi > 0) || (d_lo > 0 && d_hi < 0))) {
    throw NoSignChange(pair.first.name() + " and " + pair.second.name() + " do not cross for " + to_string(vary) +
                       " in the window");
  }
  const int sign_lo = d_lo < 0 ? -1 : 1;
  while (hi - lo > 1e-8 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    const double d = diff(mid);
    if (d == 0) {
      lo = hi = mid;
      break;
    }
    ((d < 0 ? -1 : 1) == sign_lo ? lo : hi) = mid;
  }
  CrossingEvent event;
  event.level_lo = sign_lo < 0 ? pair.first : pair.second;
  event.level_hi = sign_lo < 0 ? pair.second : pair.first;
  event.parameter = vary;
  event.crossing_value = 0.5 * (lo + hi);
  const auto spec = with_param(fixed, vary, event.crossing_value);
  event.energies_equal_at =
      0.5 * (level_energy(spec, pair.first, options) + level_energy(spec, pair.second, options));
  return event;
}

// ---------------------------------------------------------------------------
// Sweeps

Axis Axis::linspace(Param p, double from, double to, int count) {
  if (count < 1) throw std::invalid_argument("axis needs at least one point");
  Axis axis{p, {}};
  for (int i = 0; i < count; ++i) {
    axis.values.push_back(i == 0 ? from : i == count - 1 ? to : from + (to - from) * i / (count - 1));
  }
  return axis;
}

Axis Axis::logspace(Param p, double from, double to, int count) {
  if (!(from > 0) || !(to > 0)) throw std::invalid_argument("logarithmic axis needs positive end points");
  Axis axis{p, {}};
  for (int i = 0; i < count; ++i) {
    // Exact end points; interior points from the geometric ratio, rounded to
    // 15 significant digits so that grids print as the decimals they stand for.
    const double v = i == 0 ? from : i == count - 1 ? to : from * std::pow(to / from, double(i) / (count - 1));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    axis.values.push_back(std::strtod(buf, nullptr));
  }
  return axis;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.first.values.empty()) throw std::invalid_argument("sweep needs a non-empty first axis");
  if (spec.second && spec.second->values.empty()) throw std::invalid_argument("second axis is empty");
  if (spec.labels.empty()) throw std::invalid_argument("sweep needs at least one level");

  std::vector<SweepRow> rows;
  for (double x : spec.first.values) {
    const std::size_t inner = spec.second ? spec.second->values.size() : 1;
    for (std::size_t j = 0; j < inner; ++j) {
      for (const auto& label : spec.labels) {
        SweepRow row;
        row.param1 = x;
        if (spec.second) row.param2 = spec.second->values[j];
        row.label = label;
        row.solver = spec.energy.solver == Solver::Aim ? SolverKind::AIM : SolverKind::GridOracle;
        rows.push_back(row);
      }
    }
  }

  auto solve_row = [&](SweepRow& row) {
    auto point = with_param(spec.base, spec.first.param, row.param1);
    if (spec.second) point = with_param(point, spec.second->param, *row.param2);
    try {
      row.energy = level_energy(point, row.label, spec.energy);
      row.converged = true;
    } catch (const SolverError&) {
      row.converged = false;
    }
  };

  // The working precision is process-wide: install it once, before any worker
  // starts, so the per-solve guards never have to change it.
  ScopedPrecision guard(spec.energy.precision);
  unsigned workers = spec.workers != 0 ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(rows.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        solve_row(rows[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_shortest(double x) {
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "param1,param2,label_n,label_l,label_name,energy,solver,converged\n";
  for (const auto& r : rows) {
    out << format_shortest(r.param1) << ',' << (r.param2 ? format_shortest(*r.param2) : "") << ',' << r.label.n << ','
        << r.label.l << ',' << r.label.name() << ',' << (r.energy ? format_significant(*r.energy) : "") << ','
        << to_string(r.solver) << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\"param1\": " << format_shortest(r.param1) << ", \"param2\": " << (r.param2 ? format_shortest(*r.param2) : "null")
        << ", \"label_n\": " << r.label.n << ", \"label_l\": " << r.label.l << ", \"label_name\": \""
        << r.label.name() << "\", \"energy\": " << (r.energy ? format_significant(*r.energy) : "null")
        << ", \"solver\": \"" << to_string(r.solver) << "\", \"converged\": " << (r.converged ? "true" : "false")
        << '}' << (i + 1 < rows.size() ? "," : "") << '\n';
  }
  out << "]\n";
  return out.str();
}

std::vector<SweepRow> sweep_export(const SweepSpec& spec, Format format, const std::filesystem::path& path) {
  auto rows = sweep(spec);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << (format == Format::Json ? to_json(rows) : to_csv(rows));
  file.close();
  if (!file) throw std::runtime_error("failed writing " + path.string());
  return rows;
}

std::string format_significant(double value, int digits) {
  if (!std::isfinite(value)) return "nan";
  const int exponent = value == 0 ? 0 : static_cast<int>(std::floor(std::log10(std::abs(value))));
  const int decimals = std::max(0, digits - 1 - exponent);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_significant(const Real& value, int digits) {
  if (value == 0) return format_significant(0.0, digits);
  const int exponent = static_cast<int>(floor(log10(abs(value))).convert_to<long>());
  const int decimals = std::max(0, digits - 1 - exponent);
  return value.str(decimals, std::ios_base::fixed);
}

}  // namespace coulosc::scan
