#pragma once

#include <string>
#include <vector>

#include "kinetics.hpp"
#include "series.hpp"
#include "state.hpp"

namespace lsn {

/// Convex weight k with k(0) = 0 defining H_k = int k f + K(u).
struct LyapunovChoice {
  enum class Kind { kQuadratic, kPhiPrimitive, kPower };

  Kind kind = Kind::kQuadratic;
  double eta = 2.0;  // only used by kPower, must be >= 1

  static LyapunovChoice quadratic() { return {Kind::kQuadratic, 2.0}; }
  static LyapunovChoice phi_primitive() { return {Kind::kPhiPrimitive, 2.0}; }
  static LyapunovChoice power(double eta);

  /// "quadratic", "phi_primitive", "power:1.5".
  std::string name() const;
  static LyapunovChoice parse(const std::string& text);

  bool operator==(const LyapunovChoice&) const = default;
};

/// k(x), k'(x) for the chosen weight.
double lyapunov_k(const RateModel& model, const LyapunovChoice& choice, double x);
double lyapunov_k_prime(const RateModel& model, const LyapunovChoice& choice, double x);

/// K(v) = int_0^v k' o Phi^{-1}.
double capital_K(const RateModel& model, const LyapunovChoice& choice, double v);

double lyapunov_H(const SimState& state, const RateModel& model, const LyapunovChoice& choice);

/// D_k = int (K'(u) - K'(Phi(x))) (u - Phi(x)) a(x) f dx. The phi_primitive
/// choice is also defined in the constant-Phi regime.
double dissipation_D(const SimState& state, const RateModel& model, const LyapunovChoice& choice);

/// F(t, x_j) = int_{x_j}^inf f on the n_cells+1 faces.
std::vector<double> tail_distribution(const SimState& state);

enum class ProfileScaling { kDivide, kMultiply };

/// Log-spaced output abscissa shared by all profile files.
std::vector<double> profile_abscissa(double x_min, double x_max, std::size_t points);

/// x -> F(t, x / (1 + M0)) / (1 + M0) on `abscissa` (kMultiply uses x * (1 + M0)).
std::vector<double> normalized_profile(const SimState& state, const std::vector<double>& abscissa,
                                       ProfileScaling scaling = ProfileScaling::kDivide);

struct ResidualSeries {
  std::vector<double> t;
  std::vector<double> residual;
  std::vector<double> relative;

  double max_abs() const;
};

/// Centered-difference dM_k/dt minus the moment-equation right-hand side.
/// k = 0 compares against n(u); k >= 1 needs the M_{k+alpha-1} and
/// M_{k+beta-1} columns.
ResidualSeries moment_balance_residual(const TimeSeries& series, const RateModel& model, double k);

/// Centered differences on a nonuniform grid, one-sided at the ends.
std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y);

struct DiagnosticsOptions {
  std::vector<LyapunovChoice> extra_lyapunov;
  std::vector<double> fractional_moments;
  double concentration_eps = 0.05;
  ProfileScaling profile_scaling = ProfileScaling::kDivide;
  double profile_x_min = 1e-3;
  double profile_x_max = 10.0;
  std::size_t profile_points = 200;
};

/// Builds TimeSeries rows from states. Per-cell weights are precomputed once
/// for the grid so recording is a handful of linear passes.
class SeriesRecorder {
 public:
  SeriesRecorder(const Grid& grid, const RateModel& model, const DiagnosticsOptions& options);

  const std::vector<std::string>& columns() const { return columns_; }
  TimeSeries make_series() const { return TimeSeries(columns_); }

  std::vector<double> row(const SimState& state, double budget_residual) const;

 private:
  struct Extra {
    LyapunovChoice choice;
    std::vector<double> k;
    std::vector<double> kp;
  };

  Grid grid_;
  RateModel model_;
  bool invertible_;
  std::vector<std::string> columns_;
  std::vector<double> x_, x2_, a_, phi_;
  std::vector<Extra> extras_;
  std::vector<std::vector<double>> frac_;
};

}  // namespace lsn
