#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lsn {

ConjecturedExponents conjectured_exponents(const RateModel& model) {
  if (model.constant_phi()) {
    throw ConstantPhiError("conjectured_exponents: algebraic rates need alpha < beta; the decay is exponential");
  }
  if (model.alpha > model.beta) throw HypothesisError("conjectured_exponents requires alpha < beta");
  const double gap = model.beta - model.alpha;
  const double denom = 1.0 + static_cast<double>(model.i0) * gap;
  return {1.0 / denom, -gap / denom};
}

PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y, const FitWindow& window) {
  if (t.size() != y.size()) throw FitError("fit_power_law: t and y differ in length");
  if (t.empty()) throw FitError("fit_power_law: empty series");

  double t_hi = window.t_hi.value_or(t.back());
  double t_lo = window.t_lo.value_or(t_hi / std::pow(10.0, window.decades));
  if (!(t_hi > t_lo) || !(t_lo > 0.0)) throw FitError("fit_power_law: window needs t_hi > t_lo > 0");

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(t[i] > 0.0)) continue;
    if (!(y[i] > 0.0)) throw FitError("fit_power_law: nonpositive sample inside the fit window");
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(y[i]));
  }
  constexpr std::size_t kMinPoints = 10;
  if (lx.size() < kMinPoints) throw FitError("fit_power_law: fewer than 10 samples in the window");

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_power_law: degenerate time window");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.log_prefactor + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.n_points = lx.size();
  return fit;
}

ProductSeries invariant_product(const TimeSeries& series, const RateModel& model, double rho, double tol) {
  if (model.alpha > model.beta) throw HypothesisError("invariant_product requires alpha <= beta");
  ProductSeries out;
  out.t = series.column("t");
  const std::vector<double> u = series.column("u");
  const std::vector<double> m0 = series.column("M0");
  const double gap = model.beta - model.alpha;
  out.value.resize(out.t.size());
  for (std::size_t i = 0; i < out.t.size(); ++i) out.value[i] = u[i] * std::pow(m0[i], gap);

  if (model.alpha == 0.0) {
    const double bound = std::pow(rho, model.beta) * model.b_coef / model.a_coef;
    out.bound = bound;
    // First index after which every sample lies within the bound.
    std::size_t entry = out.value.size();
    for (std::size_t i = out.value.size(); i-- > 0;) {
      if (out.value[i] < 0.0 || out.value[i] > bound + tol) break;
      entry = i;
    }
    out.eventually_bounded = entry < out.value.size();
    if (*out.eventually_bounded) out.entry_time = out.t[entry];
  }
  return out;
}

LimitEstimate beta_one_limit(const TimeSeries& series, const RateModel& model, double rho, double window_fraction) {
  if (model.beta != 1.0) throw DomainError("beta_one_limit applies only when beta == 1");
  if (!(window_fraction >= 0.0 && window_fraction < 1.0)) throw DomainError("window_fraction must lie in [0, 1)");
  LimitEstimate est;
  est.product.t = series.column("t");
  const std::vector<double> u = series.column("u");
  const std::vector<double> m_alpha = moment_column(series, model.alpha);
  est.product.value.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) est.product.value[i] = u[i] * m_alpha[i];

  if (est.product.t.empty()) throw FitError("beta_one_limit: empty series");
  est.window_start = window_fraction * est.product.t.back();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (est.product.t[i] < est.window_start) continue;
    sum += est.product.value[i];
    ++count;
  }
  if (count == 0) throw FitError("beta_one_limit: no samples in the late window");
  est.late_mean = sum / static_cast<double>(count);
  est.expected = model.b_coef * rho / model.a_coef;
  est.relative_error = std::abs(est.late_mean - est.expected) / est.expected;
  return est;
}

}  // namespace lsn
