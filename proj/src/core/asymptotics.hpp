#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kinetics.hpp"
#include "series.hpp"

namespace lsn {

struct ConjecturedExponents {
  double m0;  // M0(t) ~ t^m0
  double u;   // u(t)  ~ t^u
};

/// p_M0 = 1 / (1 + i0 (beta - alpha)), p_u = -(beta - alpha) / (1 + i0 (beta - alpha)).
ConjecturedExponents conjectured_exponents(const RateModel& model);

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double rms_residual = 0.0;  // in log-log space
  std::size_t n_points = 0;
};

struct FitWindow {
  std::optional<double> t_lo;
  std::optional<double> t_hi;
  double decades = 1.0;  // used when t_lo is unset: t_lo = t_hi / 10^decades

  static FitWindow last_decades(double decades = 1.0) { return {std::nullopt, std::nullopt, decades}; }
  static FitWindow between(double lo, double hi) { return {lo, hi, 1.0}; }
};

/// Least squares of log y against log t over the window.
PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                          const FitWindow& window = FitWindow::last_decades());

struct ProductSeries {
  std::vector<double> t;
  std::vector<double> value;
  /// alpha == 0 only: bound rho^beta b_coef / a_coef from the alpha = 0 estimate.
  std::optional<double> bound;
  /// alpha == 0 only: whether the product stays inside [0, bound + tol] from
  /// some sample on through the end of the series.
  std::optional<bool> eventually_bounded;
  std::optional<double> entry_time;
};

/// u * M0^(beta - alpha). `tol` pads the alpha = 0 bound.
ProductSeries invariant_product(const TimeSeries& series, const RateModel& model, double rho, double tol = 0.05);

struct LimitEstimate {
  ProductSeries product;
  double late_mean = 0.0;
  double expected = 0.0;  // b_coef rho / a_coef
  double relative_error = 0.0;
  double window_start = 0.0;
};

/// u * M_alpha for beta == 1, averaged over t >= window_fraction * t_final.
LimitEstimate beta_one_limit(const TimeSeries& series, const RateModel& model, double rho,
                             double window_fraction = 0.5);

}  // namespace lsn
