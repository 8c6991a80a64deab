#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kinetics.hpp"
#include "series.hpp"
#include "state.hpp"

namespace lsn {

/// Initial density sampled at cell centers (j + 1/2) h. Between centers it is
/// linear; it is constant on [0, h/2] and zero beyond the last center.
struct InitialDensity {
  double h = 1.0;
  std::vector<double> values;

  static InitialDensity sample(const std::function<double(double)>& f, double x_max, std::size_t n);
  static InitialDensity from_state(const SimState& state);

  double center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * h; }
  double eval(double x) const;
  /// Midpoint sum of x^k f.
  double moment(double k) const;
};

/// Semi-analytic solution of the constant-Phi problem on a uniform time grid.
///
/// Only gamma(t) = int_0^t (u - phi0) and u(t) are integrated; densities are
/// reconstructed along characteristics on demand. gamma is piecewise linear
/// with slope u_mid - phi0 on each step, where u_mid is the midpoint-stage
/// concentration, so it is strictly increasing and cheap to invert.
struct OracleSolution {
  RateModel model;
  double rho = 1.0;
  double phi0 = 0.0;
  double dt = 0.0;
  InitialDensity f_in;
  std::vector<double> times;
  std::vector<double> u_hist;
  std::vector<double> gamma_hist;
  std::vector<double> ma_hist;
  std::vector<double> slope;  // gamma' on [t_j, t_{j+1}]

  double t_end() const { return times.back(); }
  double u_at(double t) const;
  double gamma_at(double t) const;
  /// Time s with gamma(s) = g, g in [0, gamma(t_end)].
  double gamma_inverse(double g) const;
  double slope_at_gamma(double g) const;
  double x_c(double t) const;
};

/// Integrates u' = -(u - phi0) M_a, gamma' = u - phi0 with explicit midpoint
/// steps; M_a comes from the mild formulation with trapezoidal history
/// quadrature. Requires alpha == beta and n(phi0) == 0.
OracleSolution solve_history(const RateModel& model, const InitialDensity& f_in, double rho, double t_end, double dt);

/// A^{-1}(A(x) + gamma(t)): position at t of the aggregate that had size x at 0.
double characteristic_X(const OracleSolution& sol, double t, double x);

/// A^{-1}(gamma(t) - gamma(s)): size at t of the aggregate nucleated at s.
double sigma_inverse(const OracleSolution& sol, double t, double s);

/// Two-branch density: nucleated aggregates below x_c(t), transported
/// initial aggregates above. x == x_c(t) takes the left branch.
double density_at(const OracleSolution& sol, double t, double x);

/// Right side of the mild formulation for a test function phi.
double mild_functional(const OracleSolution& sol, double t, const std::function<double(double)>& phi);

struct LimitDensity {
  double gamma_bar = 0.0;
  double x_c_bar = 0.0;
  /// gamma_bar - gamma(t_end): the closed-form tail added past the history.
  double extrapolation_residual = 0.0;
  /// u(t_end) - phi0 at the end of the computed history.
  double unconverged_gap = 0.0;
  std::vector<double> x;
  std::vector<double> fbar;
  /// int x fbar, via the limiting mild formulation.
  double mass = 0.0;
  /// rho - phi0 - mass
  double mass_defect = 0.0;
};

/// gamma_bar from the asymptotic tail gamma_bar ~ gamma(T) + (u(T) - phi0) / M_a(T).
double limit_gamma(const OracleSolution& sol);

double limit_density_at(const OracleSolution& sol, double gamma_bar, double x);

/// lim_t int f(t) phi, including the analytic tail of nucleation past t_end.
double limit_functional(const OracleSolution& sol, const std::function<double(double)>& phi);

/// f-bar on `xs`; the jump at x_c_bar is kept, so callers wanting both sides
/// should include x_c_bar +- a small offset in the grid.
LimitDensity limit_density(const OracleSolution& sol, const std::vector<double>& xs);

/// Output grid for f-bar: uniform on (0, x_max] plus one sample on each side of x_c_bar.
std::vector<double> limit_density_grid(const OracleSolution& sol, double x_max, std::size_t points);

struct OracleComparison {
  double u_sup_error = 0.0;
  double density_l1_error = 0.0;
  double compared_time = 0.0;
  std::size_t exponential_bound_violations = 0;
  std::size_t samples = 0;
};

/// Cross-check of a finite-volume run against the oracle for the same model,
/// rho and initial data.
OracleComparison compare_with_fv(const OracleSolution& sol, const RateModel& fv_model, const TimeSeries& fv_series,
                                 const SimState& fv_final);

/// Cell averages of density_at(t, .) on `grid` (4-point Gauss per cell).
std::vector<double> oracle_cell_averages(const OracleSolution& sol, double t, const Grid& grid);

}  // namespace lsn
