#pragma once

#include "coulosc/core/precision.hpp"
#include "coulosc/core/types.hpp"
#include "coulosc/oracle.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coulosc::scan {

/// "R = infinity" in scans is realised as a wall this far out.
inline constexpr double kEffectivelyFreeRadius = 100.0;

enum class Solver { Oracle, Aim };

struct EnergyOptions {
  Solver solver = Solver::Oracle;
  PrecisionCtx precision;                 // AIM only
  std::optional<double> r0;               // AIM only; default 4 or R/2
  int max_iter = 300;                     // AIM only
  oracle::OracleOptions oracle;
};

/// AIM solve of one level. The search window is centred on the grid-oracle
/// energy and reaches a quarter of the way to the neighbouring levels of the
/// same l, so that the first root in it is the requested level.
EigenResult<Real> aim_level(const PotentialSpec<Real>& spec, const LevelLabel& label,
                            const PrecisionCtx& precision = {}, std::optional<Real> r0 = std::nullopt,
                            int max_iter = 300, const oracle::OracleOptions& oracle_options = {});

/// Energy of one level with the chosen solver, in double precision.
double level_energy(const PotentialSpec<double>& spec, const LevelLabel& label, const EnergyOptions& options);

// ---------------------------------------------------------------------------
// Critical couplings

struct CriticalCoupling {
  LevelLabel label;
  double a = 0;
  std::optional<double> radius;  // empty: free problem
  double b_c = 0;
  std::pair<double, double> bracket;
  double energy_at_b_c = 0;
};

/// b at which the level crosses E = 0, by bisection on b -> E(a, b, R) (E rises
/// with b). Without a window, [0, 2 b-hat] is used with b-hat the upper
/// envelope estimate. Throws NoSignChange when E does not change sign.
CriticalCoupling find_bc(double a, std::optional<double> radius, const LevelLabel& label,
                         std::optional<std::pair<double, double>> b_window = std::nullopt,
                         const EnergyOptions& options = {});

/// Comparison of a computed value against a printed reference; the tolerance
/// is one unit in the last printed digit.
struct ReferenceCheck {
  LevelLabel label;
  double computed = 0;
  std::string printed;
  double printed_value = 0;
  double tolerance = 0;
  [[nodiscard]] bool agrees() const;
};

double unit_in_last_place(const std::string& printed);
ReferenceCheck check_against(const LevelLabel& label, double computed, const std::string& printed);
/// Human-readable lines for the checks that disagree; empty when all agree.
std::vector<std::string> discrepancy_report(const std::vector<ReferenceCheck>& checks);

// ---------------------------------------------------------------------------
// Level ordering

struct OrderingEntry {
  LevelLabel label;
  double energy = 0;
};

struct OrderingTable {
  double a = 0;
  double b = 0;
  std::optional<double> radius;
  std::vector<OrderingEntry> entries;           // ascending energy
  std::vector<std::vector<LevelLabel>> groups;  // levels within the degeneracy threshold share a group

  /// Concatenated names, degenerate groups in parentheses: "1s(2s2p)...".
  [[nodiscard]] std::string sequence(std::size_t max_levels = 0) const;
};

/// All labels with nu <= max_nu.
std::vector<LevelLabel> labels_up_to(int max_nu);

OrderingTable ordering(double a, double b, std::optional<double> radius, const std::vector<LevelLabel>& labels,
                       const EnergyOptions& options = {}, double degeneracy = 1e-9);

// ---------------------------------------------------------------------------
// Crossings

enum class Param { A, B, R };
const char* to_string(Param p);

struct CrossingEvent {
  LevelLabel level_lo;  // the lower of the two at the start of the window
  LevelLabel level_hi;
  Param parameter = Param::B;
  double crossing_value = 0;
  double energies_equal_at = 0;
};

/// Bisection on E(first) - E(second) as `vary` runs over the window, to a
/// parameter tolerance of 1e-8 (relative above 1). Throws NoSignChange.
CrossingEvent find_crossing(const std::pair<LevelLabel, LevelLabel>& pair, Param vary,
                            const PotentialSpec<double>& fixed, std::pair<double, double> window,
                            const EnergyOptions& options = {});

// ---------------------------------------------------------------------------
// Sweeps

struct Axis {
  Param param = Param::B;
  std::vector<double> values;

  static Axis linspace(Param p, double from, double to, int count);
  static Axis logspace(Param p, double from, double to, int count);
};

struct SweepSpec {
  PotentialSpec<double> base;  // parameters not on an axis
  Axis first;
  std::optional<Axis> second;
  std::vector<LevelLabel> labels;
  EnergyOptions energy;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct SweepRow {
  double param1 = 0;
  std::optional<double> param2;
  LevelLabel label;
  std::optional<double> energy;  // empty when the solve failed
  SolverKind solver = SolverKind::GridOracle;
  bool converged = false;
};

/// Rows in lexicographic grid order (first axis, then second), then label order.
std::vector<SweepRow> sweep(const SweepSpec& spec);

enum class Format { Csv, Json, Text };

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows);

/// Runs the sweep and writes it; I/O failures name the path.
std::vector<SweepRow> sweep_export(const SweepSpec& spec, Format format, const std::filesystem::path& path);

/// Plain decimal with `digits` significant digits (no exponent).
std::string format_significant(double value, int digits = 18);
std::string format_significant(const Real& value, int digits = 18);
/// Shortest plain decimal that reads back as the same double.
std::string format_shortest(double value);

}  // namespace coulosc::scan
