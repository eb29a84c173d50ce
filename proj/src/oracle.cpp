#include "coulosc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace coulosc::oracle {

void GridProblem::validate() const {
  if (l < 0) throw std::invalid_argument("l must be non-negative");
  if (!(domain_end > 0) || !std::isfinite(domain_end)) throw std::invalid_argument("domain_end must be positive");
  if (points < 16) throw std::invalid_argument("the grid needs at least 16 interior points");
  if (spec.b < 0) throw std::invalid_argument("the oracle requires b >= 0");
  if (spec.confined() && std::abs(spec.radius() - domain_end) > 0) {
    throw std::invalid_argument("a confined problem is discretised on [0, R]");
  }
}

SymTridiag discretize(const GridProblem& problem) {
  problem.validate();
  const int m = problem.points;
  const double h = problem.domain_end / (m + 1);
  const double ll = 0.5 * problem.l * (problem.l + 1);
  SymTridiag t;
  t.diag.resize(m);
  t.off = Eigen::VectorXd::Constant(m - 1, -0.5 / (h * h));
  for (int i = 0; i < m; ++i) {
    const double r = (i + 1) * h;
    t.diag[i] = 1.0 / (h * h) + ll / (r * r) - problem.spec.a / r + problem.spec.b * r * r;
  }
  return t;
}

int count_below(const SymTridiag& m, double x) {
  // Extended precision: the count's backward error is eps * ||T|| ~ eps / h^2,
  // which in plain double already reaches 1e-9 on moderately fine grids.
  constexpr long double kTiny = std::numeric_limits<long double>::min() * 1e4L;
  const Eigen::Index n = m.diag.size();
  const long double xl = x;
  int count = 0;
  long double q = static_cast<long double>(m.diag[0]) - xl;
  for (Eigen::Index i = 0;; ++i) {
    if (q == 0.0L) q = -kTiny;
    if (q < 0) ++count;
    if (i + 1 == n) break;
    const long double e = m.off[i];
    q = static_cast<long double>(m.diag[i + 1]) - xl - e * e / q;
  }
  return count;
}

namespace {

std::pair<double, double> gershgorin(const SymTridiag& m) {
  const Eigen::Index n = m.diag.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    double radius = 0;
    if (i > 0) radius += std::abs(m.off[i - 1]);
    if (i + 1 < n) radius += std::abs(m.off[i]);
    lo = std::min(lo, m.diag[i] - radius);
    hi = std::max(hi, m.diag[i] + radius);
  }
  return {lo, hi};
}

}  // namespace

double eig_k(const SymTridiag& m, int k) {
  if (k < 1 || k > m.diag.size()) throw std::invalid_argument("eigenvalue ordinal out of range");
  auto [lo, hi] = gershgorin(m);
  const double eps = std::numeric_limits<double>::epsilon();
  // Below this width the Sturm counts themselves are no longer reliable.
  const double floor = 8 * std::numeric_limits<long double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= std::max(floor, 2 * eps * std::max(std::abs(lo), std::abs(hi)))) break;
    if (count_below(m, mid) >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd eigenvector(const SymTridiag& m, double eigenvalue) {
  const Eigen::Index n = m.diag.size();
  // A shift just off the eigenvalue keeps the factorisation nonsingular.
  const double shift = eigenvalue + 1e-10 * std::max(1.0, std::abs(eigenvalue));
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd c(n), d(n);
  for (int sweep = 0; sweep < 3; ++sweep) {
    // Thomas algorithm for (T - shift I) x = v.
    double denom = m.diag[0] - shift;
    c[0] = n > 1 ? m.off[0] / denom : 0.0;
    d[0] = v[0] / denom;
    for (Eigen::Index i = 1; i < n; ++i) {
      denom = m.diag[i] - shift - m.off[i - 1] * c[i - 1];
      if (denom == 0.0) denom = std::numeric_limits<double>::epsilon();
      c[i] = i + 1 < n ? m.off[i] / denom : 0.0;
      d[i] = (v[i] - m.off[i - 1] * d[i - 1]) / denom;
    }
    v[n - 1] = d[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) v[i] = d[i] - c[i] * v[i + 1];
    v /= v.cwiseAbs().maxCoeff();
  }
  return v;
}

int sign_changes(const Eigen::VectorXd& v, double rel_floor) {
  const double floor = rel_floor * v.cwiseAbs().maxCoeff();
  int changes = 0, last = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= floor) continue;
    const int sg = v[i] > 0 ? 1 : -1;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

std::pair<double, double> richardson(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("Richardson extrapolation needs two grids");
  std::vector<double> col = values;
  double factor = 1.0;
  double correction = 0.0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    factor *= 4.0;
    for (std::size_t i = values.size() - 1; i >= j; --i) {
      col[i] = col[i] + (col[i] - col[i - 1]) / (factor - 1.0);
    }
    correction = std::abs(col.back() - col[values.size() - 2]);
  }
  return {col.back(), correction};
}

namespace {

struct Extrapolated {
  double energy;
  double correction;
  double last_plain;
};

// Shortest length the level resolves: the Bohr radius 1/|a|, the oscillator
// length (2b)^{-1/4}, and the node spacing of the k-th level in the domain.
double feature_length(const PotentialSpec<double>& spec, int l, int k, double length) {
  double scale = length / (k + 0.5 * l);
  if (spec.a != 0) scale = std::min(scale, 1.0 / std::abs(spec.a));
  if (spec.b > 0) scale = std::min(scale, std::pow(2 * spec.b, -0.25));
  return scale;
}

Extrapolated solve_on_box(const PotentialSpec<double>& spec, int l, int k, double length,
                          const OracleOptions& opt) {
  GridProblem problem{spec, l, length, 0};
  const double wanted = std::ceil(opt.points_per_length * length / feature_length(spec, l, k, length));
  const int base = static_cast<int>(std::clamp(wanted, double(opt.min_points), double(opt.max_points)));
  std::vector<double> values;
  for (int level = 0; level < opt.levels; ++level) {
    problem.points = (base + 1) * (1 << level) - 1;
    values.push_back(eig_k(discretize(problem), k));
  }
  const auto [energy, correction] = richardson(values);
  return {energy, correction, values.back()};
}

double initial_box(const PotentialSpec<double>& spec, const LevelLabel& label) {
  const double nu = label.nu();
  double length = 4.0;
  if (spec.b > 0) {
    // Turning point of the oscillator level plus several decay lengths.
    const double e_osc = (2 * label.n + label.l + 1.5) * std::sqrt(2 * spec.b);
    length = std::max(length, std::sqrt(e_osc / spec.b) + 8.0 / std::pow(2 * spec.b, 0.25));
  }
  if (spec.a > 0) length = std::min(length, std::max(4.0, 6.0 * nu * nu / spec.a + 20.0));
  if (spec.b == 0 && spec.a > 0) length = 6.0 * nu * nu / spec.a + 20.0;
  return length;
}

}  // namespace

EigenResult<double> solve_level(const PotentialSpec<double>& spec, const LevelLabel& label,
                                const OracleOptions& options) {
  if (label.n < 0 || label.l < 0) throw std::invalid_argument("level label must be non-negative");
  if (options.levels < 2) throw std::invalid_argument("Richardson extrapolation needs >= 2 grid levels");
  const int k = label.n + 1;
  EigenResult<double> result;
  result.label = label;
  result.solver = SolverKind::GridOracle;
  result.precision_used = PrecisionCtx{53, options.extrapolation_tol};

  Extrapolated ex{};
  int refinements = options.levels;
  if (spec.confined()) {
    ex = solve_on_box(spec, label.l, k, spec.radius(), options);
  } else {
    if (!(spec.b > 0) && !(spec.a > 0)) throw NotConverged("the free problem has no bound states for a, b <= 0");
    double length = initial_box(spec, label);
    ex = solve_on_box(spec, label.l, k, length, options);
    bool settled = false;
    for (int d = 0; d < options.max_box_doublings; ++d) {
      length *= 2;
      const Extrapolated next = solve_on_box(spec, label.l, k, length, options);
      refinements += options.levels;
      const double change = std::abs(next.energy - ex.energy);
      ex = next;
      if (change < options.box_tol) {
        settled = true;
        break;
      }
    }
    if (!settled) throw NotConverged("the free level did not settle under box doubling");
  }
  if (!(ex.correction <= options.extrapolation_tol * std::max(1.0, std::abs(ex.energy)))) {
    throw NotConverged("Richardson correction " + std::to_string(ex.correction) + " exceeds tolerance");
  }
  result.energy = ex.energy;
  result.iterations = refinements;
  result.bracket = {ex.energy - ex.correction, ex.energy + ex.correction};
  return result;
}

}  // namespace coulosc::oracle
