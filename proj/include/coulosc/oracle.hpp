#pragma once

#include "coulosc/core/types.hpp"

#include <Eigen/Dense>

#include <optional>

namespace coulosc::oracle {

/// Radial problem on the uniform grid r_i = i h, h = domain_end / (points + 1),
/// with Dirichlet conditions at r = 0 and r = domain_end.
struct GridProblem {
  PotentialSpec<double> spec;
  int l = 0;
  double domain_end = 1.0;
  int points = 1024;

  void validate() const;
};

/// Symmetric tridiagonal matrix: `diag` (size M) and `off` (size M - 1).
struct SymTridiag {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

/// Three-point Laplacian plus l(l+1)/(2r^2) - a/r + b r^2 on the grid.
SymTridiag discretize(const GridProblem& problem);

/// Number of eigenvalues strictly below x (Sturm sequence count).
int count_below(const SymTridiag& m, double x);

/// k-th smallest eigenvalue (k >= 1) by Sturm bisection to machine precision.
double eig_k(const SymTridiag& m, int k);

/// Eigenvector for an (isolated) eigenvalue by inverse iteration.
Eigen::VectorXd eigenvector(const SymTridiag& m, double eigenvalue);

/// Interior sign changes of a grid vector, ignoring entries below `rel_floor`
/// times the largest magnitude.
int sign_changes(const Eigen::VectorXd& v, double rel_floor = 1e-10);

struct OracleOptions {
  /// Points per characteristic length (the shortest of the Bohr radius, the
  /// oscillator length and the node spacing) on the coarsest grid.
  double points_per_length = 100.0;
  int min_points = 256;
  int max_points = 1 << 20;
  /// Number of grids M, 2M+1, 4M+3, ... in the Richardson table (>= 2).
  int levels = 4;
  /// Free problem: box doubling stops once the energy changes by less than this.
  double box_tol = 1e-9;
  int max_box_doublings = 12;
  /// Maximum accepted difference between the last two Richardson columns.
  double extrapolation_tol = 1e-7;
};

/// Energy of `label` for the potential; free problems are truncated to a box
/// that is doubled until the level settles. `iterations` counts grid levels
/// used (box doublings included), `bracket` holds the last two extrapolants.
EigenResult<double> solve_level(const PotentialSpec<double>& spec, const LevelLabel& label,
                                const OracleOptions& options = {});

/// Richardson extrapolation over grids halving h, assuming an even-power error
/// expansion; returns the extrapolated value and the final correction size.
std::pair<double, double> richardson(const std::vector<double>& values);

}  // namespace coulosc::oracle
