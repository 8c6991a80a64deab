#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "errors.hpp"

namespace lsn {

namespace {

void require_invertible(const RateModel& model, const char* what) {
  if (model.constant_phi()) throw ConstantPhiError(std::string(what) + " requires alpha < beta");
  if (model.alpha > model.beta) throw HypothesisError(std::string(what) + " requires alpha < beta");
}

}  // namespace

LyapunovChoice LyapunovChoice::power(double eta) {
  if (!(eta >= 1.0)) throw ConfigError("power Lyapunov weight needs eta >= 1");
  return {Kind::kPower, eta};
}

std::string LyapunovChoice::name() const {
  switch (kind) {
    case Kind::kQuadratic: return "quadratic";
    case Kind::kPhiPrimitive: return "phi_primitive";
    case Kind::kPower: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "power:%.10g", eta);
      return buf;
    }
  }
  return "unknown";
}

LyapunovChoice LyapunovChoice::parse(const std::string& text) {
  if (text == "quadratic") return quadratic();
  if (text == "phi_primitive") return phi_primitive();
  if (text.rfind("power:", 0) == 0) {
    const std::string num = text.substr(6);
    char* end = nullptr;
    const double eta = std::strtod(num.c_str(), &end);
    if (num.empty() || end != num.c_str() + num.size()) throw ConfigError("bad Lyapunov weight '" + text + "'");
    return power(eta);
  }
  throw ConfigError("unknown Lyapunov choice '" + text + "' (quadratic | phi_primitive | power:<eta>)");
}

double lyapunov_k(const RateModel& model, const LyapunovChoice& choice, double x) {
  switch (choice.kind) {
    case LyapunovChoice::Kind::kQuadratic: return 0.5 * x * x;
    case LyapunovChoice::Kind::kPhiPrimitive: {
      const double q = model.beta - model.alpha;
      return (model.b_coef / model.a_coef) * std::pow(x, q + 1.0) / (q + 1.0);
    }
    case LyapunovChoice::Kind::kPower: return std::pow(x, choice.eta);
  }
  return 0.0;
}

double lyapunov_k_prime(const RateModel& model, const LyapunovChoice& choice, double x) {
  switch (choice.kind) {
    case LyapunovChoice::Kind::kQuadratic: return x;
    case LyapunovChoice::Kind::kPhiPrimitive: return eval_phi(model, x);
    case LyapunovChoice::Kind::kPower: return choice.eta * std::pow(x, choice.eta - 1.0);
  }
  return 0.0;
}

double capital_K(const RateModel& model, const LyapunovChoice& choice, double v) {
  require_invertible(model, "capital_K");
  if (!(v >= 0.0)) throw DomainError("capital_K: v must be >= 0");
  switch (choice.kind) {
    case LyapunovChoice::Kind::kQuadratic: return antiderivative_Psi(model, v);
    case LyapunovChoice::Kind::kPhiPrimitive: return 0.5 * v * v;
    case LyapunovChoice::Kind::kPower: {
      // Phi^{-1}(z) = (z / r)^p, so k' o Phi^{-1} is a monomial in z.
      const double r = model.b_coef / model.a_coef;
      const double p = 1.0 / (model.beta - model.alpha);
      const double e = p * (choice.eta - 1.0);
      return choice.eta * std::pow(r, -e) * std::pow(v, e + 1.0) / (e + 1.0);
    }
  }
  return 0.0;
}

double lyapunov_H(const SimState& state, const RateModel& model, const LyapunovChoice& choice) {
  require_invertible(model, "lyapunov_H");
  const double dx = state.grid.dx();
  CompensatedSum acc;
  for (std::size_t i = 0; i < state.f.size(); ++i) {
    acc.add(lyapunov_k(model, choice, state.grid.center(i)) * state.f[i] * dx);
  }
  return acc.value() + capital_K(model, choice, monomer(state));
}

double dissipation_D(const SimState& state, const RateModel& model, const LyapunovChoice& choice) {
  if (choice.kind != LyapunovChoice::Kind::kPhiPrimitive) require_invertible(model, "dissipation_D");
  const double u = monomer(state);
  double k_prime_crit = u;
  if (choice.kind != LyapunovChoice::Kind::kPhiPrimitive) {
    k_prime_crit = lyapunov_k_prime(model, choice, eval_phi_inverse(model, std::max(u, 0.0)));
  }
  const double dx = state.grid.dx();
  CompensatedSum acc;
  for (std::size_t i = 0; i < state.f.size(); ++i) {
    if (state.f[i] == 0.0) continue;
    const double x = state.grid.center(i);
    const double phi = eval_phi(model, x);
    const double kp = choice.kind == LyapunovChoice::Kind::kPhiPrimitive ? phi : lyapunov_k_prime(model, choice, x);
    acc.add((k_prime_crit - kp) * (u - phi) * eval_a(model, x) * state.f[i] * dx);
  }
  return acc.value();
}

std::vector<double> tail_distribution(const SimState& state) {
  const std::size_t n = state.f.size();
  const double dx = state.grid.dx();
  std::vector<double> tail(n + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t j = n; j-- > 0;) {
    acc.add(state.f[j] * dx);
    tail[j] = acc.value();
  }
  return tail;
}

std::vector<double> profile_abscissa(double x_min, double x_max, std::size_t points) {
  if (!(x_min > 0.0) || !(x_max > x_min) || points < 2) {
    throw ConfigError("profile abscissa needs 0 < x_min < x_max and at least 2 points");
  }
  std::vector<double> xs(points);
  const double l0 = std::log(x_min);
  const double l1 = std::log(x_max);
  for (std::size_t i = 0; i < points; ++i) {
    xs[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  xs.front() = x_min;
  xs.back() = x_max;
  return xs;
}

std::vector<double> normalized_profile(const SimState& state, const std::vector<double>& abscissa,
                                       ProfileScaling scaling) {
  const std::vector<double> tail = tail_distribution(state);
  const double scale = 1.0 + tail.front();
  const double dx = state.grid.dx();
  const std::size_t n = state.f.size();
  std::vector<double> out;
  out.reserve(abscissa.size());
  for (double x : abscissa) {
    const double y = scaling == ProfileScaling::kDivide ? x / scale : x * scale;
    double value = 0.0;
    if (y <= 0.0) {
      value = tail.front();
    } else if (y < state.grid.x_max) {
      const double s = y / dx;
      const auto j = std::min(static_cast<std::size_t>(s), n - 1);
      const double w = s - static_cast<double>(j);
      value = (1.0 - w) * tail[j] + w * tail[j + 1];
    }
    out.push_back(value / scale);
  }
  return out;
}

double ResidualSeries::max_abs() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (y.size() != n) throw SchemaError("time_derivative: size mismatch");
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d.front() = (y[1] - y[0]) / (t[1] - t[0]);
  d.back() = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
  return d;
}

ResidualSeries moment_balance_residual(const TimeSeries& series, const RateModel& model, double k) {
  if (!(k == 0.0 || k >= 1.0)) {
    throw DomainError("moment_balance_residual: k must be 0 or >= 1 (negative moments are not recorded)");
  }
  if (series.size() < 2) throw SchemaError("moment_balance_residual needs at least 2 samples");
  ResidualSeries out;
  out.t = series.column("t");
  const std::vector<double> u = series.column("u");
  const std::vector<double> mk = moment_column(series, k);
  const std::vector<double> dm = time_derivative(out.t, mk);

  std::vector<double> rhs(out.t.size(), 0.0);
  if (k == 0.0) {
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      rhs[i] = u[i] > model.phi0() ? eval_nucleation(model, std::max(u[i], 0.0)) : 0.0;
    }
  } else {
    const std::vector<double> ma = moment_column(series, k + model.alpha - 1.0);
    const std::vector<double> mb = moment_column(series, k + model.beta - 1.0);
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      rhs[i] = k * model.a_coef * u[i] * ma[i] - k * model.b_coef * mb[i];
    }
  }
  out.residual.resize(rhs.size());
  out.relative.resize(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    out.residual[i] = dm[i] - rhs[i];
    const double scale = std::max({std::abs(dm[i]), std::abs(rhs[i]), 1e-300});
    out.relative[i] = out.residual[i] / scale;
  }
  return out;
}

SeriesRecorder::SeriesRecorder(const Grid& grid, const RateModel& model, const DiagnosticsOptions& options)
    : grid_(grid), model_(model), invertible_(model.alpha < model.beta) {
  columns_ = {"t", "u", "M0", "M1", "M2", "Ma"};
  if (invertible_) {
    columns_.push_back("H");
    columns_.push_back("D");
  }
  columns_.push_back("Dphi");
  columns_.push_back("budget");

  const std::size_t n = grid.n_cells;
  x_.resize(n);
  x2_.resize(n);
  a_.resize(n);
  phi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.center(i);
    x_[i] = x;
    x2_[i] = x * x;
    a_[i] = eval_a(model, x);
    phi_[i] = eval_phi(model, x);
  }
  for (const auto& choice : options.extra_lyapunov) {
    if (choice == LyapunovChoice::quadratic()) continue;
    if (!invertible_) throw ConstantPhiError("Lyapunov functional '" + choice.name() + "'");
    Extra e{choice, std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      e.k[i] = lyapunov_k(model, choice, x_[i]);
      e.kp[i] = lyapunov_k_prime(model, choice, x_[i]);
    }
    columns_.push_back("H_" + choice.name());
    columns_.push_back("D_" + choice.name());
    extras_.push_back(std::move(e));
  }
  for (double theta : options.fractional_moments) {
    if (!(theta >= 0.0)) throw ConfigError("fractional moment orders must be >= 0");
    if (theta == 0.0 || theta == 1.0 || theta == 2.0) continue;
    const std::string name = moment_column_name(theta);
    if (std::find(columns_.begin(), columns_.end(), name) != columns_.end()) continue;
    columns_.push_back(name);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(x_[i], theta);
    frac_.push_back(std::move(w));
  }
}

std::vector<double> SeriesRecorder::row(const SimState& state, double budget_residual) const {
  const double dx = grid_.dx();
  const std::size_t n = state.f.size();
  const double u = monomer(state);
  CompensatedSum m0, m1, m2, ma, dphi;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = state.f[i] * dx;
    if (w == 0.0) continue;
    m0.add(w);
    m1.add(x_[i] * w);
    m2.add(x2_[i] * w);
    ma.add(a_[i] * w);
    const double gap = u - phi_[i];
    dphi.add(gap * gap * a_[i] * w);
  }
  std::vector<double> r = {state.t, u, m0.value(), m1.value(), m2.value(), ma.value()};
  if (invertible_) {
    const double uc = std::max(u, 0.0);
    const double x_crit = eval_phi_inverse(model_, uc);
    CompensatedSum d;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = state.f[i] * dx;
      if (w == 0.0) continue;
      d.add((x_crit - x_[i]) * (u - phi_[i]) * a_[i] * w);
    }
    r.push_back(0.5 * m2.value() + antiderivative_Psi(model_, uc));
    r.push_back(d.value());
  }
  r.push_back(dphi.value());
  r.push_back(budget_residual);

  for (const auto& e : extras_) {
    const double uc = std::max(u, 0.0);
    const double kp_crit = e.choice.kind == LyapunovChoice::Kind::kPhiPrimitive
                               ? u
                               : lyapunov_k_prime(model_, e.choice, eval_phi_inverse(model_, uc));
    CompensatedSum h, d;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = state.f[i] * dx;
      if (w == 0.0) continue;
      h.add(e.k[i] * w);
      d.add((kp_crit - e.kp[i]) * (u - phi_[i]) * a_[i] * w);
    }
    r.push_back(h.value() + capital_K(model_, e.choice, uc));
    r.push_back(d.value());
  }
  for (const auto& w : frac_) {
    CompensatedSum m;
    for (std::size_t i = 0; i < n; ++i) m.add(w[i] * state.f[i] * dx);
    r.push_back(m.value());
  }
  return r;
}

}  // namespace lsn
