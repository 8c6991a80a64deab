#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "errors.hpp"

namespace lsn {

namespace {

using Gauss7 = boost::math::quadrature::gauss<double, 7>;

/// a(A^{-1}(v)), the speed factor at the end of a characteristic of A-length v.
double a_of_A_inverse(const RateModel& m, double v) {
  if (m.alpha == 0.0) return m.a_coef;
  if (v <= 0.0) return 0.0;
  const double e = 1.0 - m.alpha;
  return m.a_coef * std::pow(m.a_coef * e * v, m.alpha / e);
}

/// n(phi0 + w) / w, the nucleated density per unit gamma.
double nucleation_per_gap(const RateModel& m, double phi0, double w) {
  if (w > 0.0) return eval_nucleation(m, phi0 + w) / w;
  if (m.shifted_nucleation && m.i0 == 1) return m.n_coef;
  return 0.0;
}

std::size_t segment_of(const std::vector<double>& nodes, double v) {
  auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
  std::size_t j = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  return std::min(j, nodes.size() - 2);
}

void require_in_range(const OracleSolution& sol, double t, const char* what) {
  if (!(t >= 0.0 && t <= sol.t_end() * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << what << ": t=" << t << " outside the oracle history [0, " << sol.t_end() << "]";
    throw DomainError(os.str());
  }
}

class HistoryIntegrator {
 public:
  HistoryIntegrator(const RateModel& m, const InitialDensity& f_in)
      : m_(m), constant_a_(m.alpha == 0.0), f_in_(f_in) {
    for (std::size_t j = 0; j < f_in.values.size(); ++j) {
      if (f_in.values[j] != 0.0) {
        occupied_.push_back(j);
        a_len_.push_back(antiderivative_A(m, f_in.center(j)));
      }
    }
    initial_count_ = f_in.moment(0.0);
  }

  /// int f_in(x) a(X(t;0,x)) dx by the midpoint rule.
  double transported(double gamma) const {
    if (constant_a_) return m_.a_coef * initial_count_;
    double s = 0.0;
    for (std::size_t k = 0; k < occupied_.size(); ++k) {
      s += f_in_.values[occupied_[k]] * a_of_A_inverse(m_, a_len_[k] + gamma);
    }
    return s * f_in_.h;
  }

  /// Trapezoid of n(u_j) a(A^{-1}(gamma - gamma_j)) over the stored history,
  /// plus an optional partial panel ending at (gamma_end, nuc_end) of width h_end.
  double nucleated(double gamma, const std::vector<double>& gammas, const std::vector<double>& nucs, double dt,
                   double h_end, double nuc_end) const {
    const std::size_t n = gammas.size();
    double s = 0.0;
    if (constant_a_) {
      s = cumulative_ * m_.a_coef;
    } else if (n > 1) {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        if (nucs[j] != 0.0) s += w * nucs[j] * a_of_A_inverse(m_, gamma - gammas[j]);
      }
      s *= dt;
    }
    if (h_end > 0.0) {
      s += 0.5 * h_end *
           (nucs.back() * a_of_A_inverse(m_, gamma - gammas.back()) + nuc_end * a_of_A_inverse(m_, 0.0));
    }
    return s;
  }

  void push(const std::vector<double>& nucs, double dt) {
    const std::size_t n = nucs.size();
    if (n >= 2) cumulative_ += 0.5 * dt * (nucs[n - 2] + nucs[n - 1]);
  }

 private:
  RateModel m_;
  bool constant_a_;
  const InitialDensity& f_in_;
  std::vector<std::size_t> occupied_;
  std::vector<double> a_len_;
  double initial_count_ = 0.0;
  double cumulative_ = 0.0;
};

OracleSolution integrate_history(const RateModel& model, const InitialDensity& f_in, double rho, double t_end,
                                 double dt, bool& failed) {
  failed = false;
  OracleSolution sol;
  sol.model = model;
  sol.rho = rho;
  sol.phi0 = model.phi0();
  sol.dt = dt;
  sol.f_in = f_in;

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = steps == 0 ? dt : t_end / static_cast<double>(steps);
  sol.dt = h;

  HistoryIntegrator hist(model, sol.f_in);
  std::vector<double> nucs;
  const double phi0 = sol.phi0;

  double w = rho - f_in.moment(1.0) - phi0;
  double gamma = 0.0;
  sol.times.push_back(0.0);
  sol.u_hist.push_back(phi0 + w);
  sol.gamma_hist.push_back(0.0);
  nucs.push_back(eval_nucleation(model, phi0 + w));
  double ma = hist.transported(0.0) + hist.nucleated(0.0, sol.gamma_hist, nucs, h, 0.0, 0.0);
  sol.ma_hist.push_back(ma);

  for (std::size_t n = 0; n < steps; ++n) {
    const double w_mid = w - 0.5 * h * w * ma;
    const double g_mid = gamma + 0.5 * h * w;
    if (!(w_mid > 0.0)) {
      failed = true;
      return sol;
    }
    const double nuc_mid = eval_nucleation(model, phi0 + w_mid);
    const double ma_mid =
        hist.transported(g_mid) + hist.nucleated(g_mid, sol.gamma_hist, nucs, h, 0.5 * h, nuc_mid);

    w = w - h * w_mid * ma_mid;
    gamma = gamma + h * w_mid;
    if (!(w > 0.0)) {
      failed = true;
      return sol;
    }
    sol.slope.push_back(w_mid);
    sol.times.push_back(static_cast<double>(n + 1) * h);
    sol.u_hist.push_back(phi0 + w);
    sol.gamma_hist.push_back(gamma);
    nucs.push_back(eval_nucleation(model, phi0 + w));
    hist.push(nucs, h);
    ma = hist.transported(gamma) + hist.nucleated(gamma, sol.gamma_hist, nucs, h, 0.0, 0.0);
    sol.ma_hist.push_back(ma);
  }
  if (steps > 0) sol.times.back() = t_end;
  return sol;
}

}  // namespace

InitialDensity InitialDensity::sample(const std::function<double(double)>& f, double x_max, std::size_t n) {
  if (n == 0 || !(x_max > 0.0)) throw ConfigError("initial density sampling needs n > 0 and x_max > 0");
  InitialDensity d;
  d.h = x_max / static_cast<double>(n);
  d.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    d.values[j] = f(d.center(j));
    if (!(d.values[j] >= 0.0)) throw ConfigError("initial density must be nonnegative");
  }
  return d;
}

InitialDensity InitialDensity::from_state(const SimState& state) {
  InitialDensity d;
  d.h = state.grid.dx();
  d.values = state.f;
  return d;
}

double InitialDensity::eval(double x) const {
  if (values.empty() || x < 0.0) return 0.0;
  const double s = x / h - 0.5;
  if (s <= 0.0) return values.front();
  const auto j = static_cast<std::size_t>(s);
  if (j + 1 >= values.size()) return j + 1 == values.size() && s == static_cast<double>(j) ? values.back() : 0.0;
  const double w = s - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

double InitialDensity::moment(double k) const {
  CompensatedSum acc;
  for (std::size_t j = 0; j < values.size(); ++j) acc.add(std::pow(center(j), k) * values[j] * h);
  return acc.value();
}

double OracleSolution::u_at(double t) const {
  require_in_range(*this, t, "u_at");
  if (times.size() == 1) return u_hist.front();
  const std::size_t j = segment_of(times, t);
  const double w = (t - times[j]) / (times[j + 1] - times[j]);
  return (1.0 - w) * u_hist[j] + w * u_hist[j + 1];
}

double OracleSolution::gamma_at(double t) const {
  require_in_range(*this, t, "gamma_at");
  if (times.size() == 1) return gamma_hist.front();
  const std::size_t j = segment_of(times, t);
  const double w = (t - times[j]) / (times[j + 1] - times[j]);
  return (1.0 - w) * gamma_hist[j] + w * gamma_hist[j + 1];
}

double OracleSolution::gamma_inverse(double g) const {
  if (times.size() == 1) return 0.0;
  if (!(g >= 0.0 && g <= gamma_hist.back() * (1.0 + 1e-14))) throw DomainError("gamma_inverse: value outside history");
  const std::size_t j = segment_of(gamma_hist, g);
  return times[j] + (g - gamma_hist[j]) / slope[j];
}

double OracleSolution::slope_at_gamma(double g) const {
  if (slope.empty()) return u_hist.front() - phi0;
  return slope[segment_of(gamma_hist, g)];
}

double OracleSolution::x_c(double t) const { return antiderivative_A_inverse(model, gamma_at(t)); }

OracleSolution solve_history(const RateModel& model, const InitialDensity& f_in, double rho, double t_end, double dt) {
  if (!model.constant_phi()) throw ConfigError("characteristics oracle requires alpha == beta (constant Phi)");
  if (!(model.alpha < 1.0)) throw HypothesisError("characteristics oracle requires alpha < 1");
  if (!(t_end >= 0.0) || !(dt > 0.0)) throw ConfigError("oracle needs t_end >= 0 and dt > 0");
  const double phi0 = model.phi0();
  if (eval_nucleation(model, phi0) != 0.0) {
    throw ConfigError("oracle requires n(phi0) = 0; enable model.shifted_nucleation for constant-Phi runs");
  }
  if (!(rho - f_in.moment(1.0) > phi0)) throw ConfigError("oracle requires u(0) = rho - M1(f_in) > phi0");

  double h = dt;
  for (int attempt = 0; attempt < 5; ++attempt, h *= 0.5) {
    bool failed = false;
    OracleSolution sol = integrate_history(model, f_in, rho, t_end, h, failed);
    if (!failed) return sol;
  }
  throw SolverError("oracle: u reached phi0 numerically even after reducing dt");
}

double characteristic_X(const OracleSolution& sol, double t, double x) {
  if (!(x >= 0.0)) throw DomainError("characteristic_X: x must be >= 0");
  return antiderivative_A_inverse(sol.model, antiderivative_A(sol.model, x) + sol.gamma_at(t));
}

double sigma_inverse(const OracleSolution& sol, double t, double s) {
  if (!(s >= 0.0) || s > t) throw DomainError("sigma_inverse: need 0 <= s <= t");
  return antiderivative_A_inverse(sol.model, std::max(sol.gamma_at(t) - sol.gamma_at(s), 0.0));
}

double density_at(const OracleSolution& sol, double t, double x) {
  if (!(x > 0.0)) throw DomainError("density_at: x must be > 0");
  const RateModel& m = sol.model;
  const double gamma_t = sol.gamma_at(t);
  const double ax = antiderivative_A(m, x);
  if (ax <= gamma_t) {
    const double g = gamma_t - ax;
    const double s = sol.gamma_inverse(g);
    const double w = sol.slope_at_gamma(g);
    return eval_nucleation(m, sol.u_at(s)) / (eval_a(m, x) * w);
  }
  const double y = antiderivative_A_inverse(m, ax - gamma_t);
  return sol.f_in.eval(y) * eval_a(m, y) / eval_a(m, x);
}

double mild_functional(const OracleSolution& sol, double t, const std::function<double(double)>& phi) {
  const RateModel& m = sol.model;
  const double gamma_t = sol.gamma_at(t);

  double nucleated = 0.0;
  for (std::size_t j = 0; j + 1 < sol.times.size() && sol.times[j] < t; ++j) {
    const double lo = sol.times[j];
    const double hi = std::min(sol.times[j + 1], t);
    nucleated += Gauss7::integrate(
        [&](double s) {
          const double g = std::max(gamma_t - sol.gamma_at(s), 0.0);
          return eval_nucleation(m, sol.u_at(s)) * phi(antiderivative_A_inverse(m, g));
        },
        lo, hi);
  }

  const InitialDensity& fi = sol.f_in;
  auto transported = [&](double y) { return fi.eval(y) * phi(antiderivative_A_inverse(m, antiderivative_A(m, y) + gamma_t)); };
  double initial = 0.0;
  if (!fi.values.empty()) {
    if (fi.values.front() != 0.0) initial += Gauss7::integrate(transported, 0.0, fi.center(0));
    for (std::size_t j = 0; j + 1 < fi.values.size(); ++j) {
      if (fi.values[j] == 0.0 && fi.values[j + 1] == 0.0) continue;
      initial += Gauss7::integrate(transported, fi.center(j), fi.center(j + 1));
    }
  }
  return nucleated + initial;
}

double limit_gamma(const OracleSolution& sol) {
  const double w_end = sol.u_hist.back() - sol.phi0;
  const double ma_end = sol.ma_hist.back();
  if (!(ma_end > 0.0)) return sol.gamma_hist.back();
  return sol.gamma_hist.back() + w_end / ma_end;
}

double limit_density_at(const OracleSolution& sol, double gamma_bar, double x) {
  if (!(x > 0.0)) throw DomainError("limit_density_at: x must be > 0");
  const RateModel& m = sol.model;
  const double ax = antiderivative_A(m, x);
  if (ax <= gamma_bar) {
    const double g = gamma_bar - ax;
    const double gamma_end = sol.gamma_hist.back();
    if (g <= gamma_end) {
      const double s = sol.gamma_inverse(g);
      return eval_nucleation(m, sol.u_at(s)) / (eval_a(m, x) * sol.slope_at_gamma(g));
    }
    // Past the history u - phi0 decays like exp(-M_a(T)(s - T)), which makes
    // it linear in gamma.
    const double w = std::max(sol.u_hist.back() - sol.phi0 - sol.ma_hist.back() * (g - gamma_end), 0.0);
    return nucleation_per_gap(m, sol.phi0, w) / eval_a(m, x);
  }
  const double y = antiderivative_A_inverse(m, ax - gamma_bar);
  return sol.f_in.eval(y) * eval_a(m, y) / eval_a(m, x);
}

double limit_functional(const OracleSolution& sol, const std::function<double(double)>& phi) {
  const RateModel& m = sol.model;
  const double gamma_bar = limit_gamma(sol);

  double nucleated = 0.0;
  for (std::size_t j = 0; j + 1 < sol.times.size(); ++j) {
    nucleated += Gauss7::integrate(
        [&](double s) {
          const double g = std::max(gamma_bar - sol.gamma_at(s), 0.0);
          return eval_nucleation(m, sol.u_at(s)) * phi(antiderivative_A_inverse(m, g));
        },
        sol.times[j], sol.times[j + 1]);
  }
  // Tail past t_end in the variable w = u - phi0: ds = -dw / (M w).
  const double w_end = sol.u_hist.back() - sol.phi0;
  const double ma_end = sol.ma_hist.back();
  if (w_end > 0.0 && ma_end > 0.0) {
    nucleated += Gauss7::integrate(
        [&](double w) {
          const double g = std::max(gamma_bar - (sol.gamma_hist.back() + (w_end - w) / ma_end), 0.0);
          return nucleation_per_gap(m, sol.phi0, w) / ma_end * phi(antiderivative_A_inverse(m, g));
        },
        0.0, w_end);
  }

  const InitialDensity& fi = sol.f_in;
  auto transported = [&](double y) {
    return fi.eval(y) * phi(antiderivative_A_inverse(m, antiderivative_A(m, y) + gamma_bar));
  };
  double initial = 0.0;
  if (!fi.values.empty()) {
    if (fi.values.front() != 0.0) initial += Gauss7::integrate(transported, 0.0, fi.center(0));
    for (std::size_t j = 0; j + 1 < fi.values.size(); ++j) {
      if (fi.values[j] == 0.0 && fi.values[j + 1] == 0.0) continue;
      initial += Gauss7::integrate(transported, fi.center(j), fi.center(j + 1));
    }
  }
  return nucleated + initial;
}

LimitDensity limit_density(const OracleSolution& sol, const std::vector<double>& xs) {
  LimitDensity out;
  out.gamma_bar = limit_gamma(sol);
  out.x_c_bar = antiderivative_A_inverse(sol.model, out.gamma_bar);
  out.extrapolation_residual = out.gamma_bar - sol.gamma_hist.back();
  out.unconverged_gap = sol.u_hist.back() - sol.phi0;
  out.x = xs;
  out.fbar.reserve(xs.size());
  for (double x : xs) out.fbar.push_back(limit_density_at(sol, out.gamma_bar, x));
  out.mass = limit_functional(sol, [](double x) { return x; });
  out.mass_defect = sol.rho - sol.phi0 - out.mass;
  return out;
}

std::vector<double> limit_density_grid(const OracleSolution& sol, double x_max, std::size_t points) {
  if (points < 2 || !(x_max > 0.0)) throw ConfigError("limit density grid needs x_max > 0 and >= 2 points");
  const double xc = antiderivative_A_inverse(sol.model, limit_gamma(sol));
  std::vector<double> xs;
  xs.reserve(points + 2);
  for (std::size_t i = 1; i <= points; ++i) xs.push_back(x_max * static_cast<double>(i) / static_cast<double>(points));
  if (xc > 0.0 && xc < x_max) {
    const double eps = 1e-9 * std::max(xc, 1.0);
    xs.push_back(xc - eps);
    xs.push_back(xc + eps);
    std::sort(xs.begin(), xs.end());
  }
  return xs;
}

std::vector<double> oracle_cell_averages(const OracleSolution& sol, double t, const Grid& grid) {
  // 4-point Gauss-Legendre nodes on [-1, 1].
  static constexpr double kNodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                       0.8611363115940526};
  static constexpr double kWeights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                         0.3478548451374538};
  const double dx = grid.dx();
  std::vector<double> avg(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double c = grid.center(i);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += kWeights[q] * density_at(sol, t, c + 0.5 * dx * kNodes[q]);
    avg[i] = 0.5 * s;
  }
  return avg;
}

OracleComparison compare_with_fv(const OracleSolution& sol, const RateModel& fv_model, const TimeSeries& fv_series,
                                 const SimState& fv_final) {
  if (!(fv_model == sol.model)) throw ConfigError("compare_with_fv: finite-volume and oracle models differ");
  if (std::abs(fv_final.rho - sol.rho) > 1e-12 * sol.rho) throw ConfigError("compare_with_fv: rho differs");
  if (fv_series.empty()) throw ConfigError("compare_with_fv: empty finite-volume series");
  const std::vector<double> t = fv_series.column("t");
  if (t.back() > sol.t_end() * (1.0 + 1e-12)) throw ConfigError("compare_with_fv: run extends past the oracle history");
  const double u0 = fv_series.at(0, "u");
  if (std::abs(u0 - sol.u_hist.front()) > 1e-6) {
    throw ConfigError("compare_with_fv: initial monomer concentrations differ (different initial data?)");
  }

  OracleComparison out;
  const std::vector<double> u = fv_series.column("u");
  const double ma0 = fv_series.at(0, "Ma");
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.u_sup_error = std::max(out.u_sup_error, std::abs(u[i] - sol.u_at(t[i])));
    const double bound = (u0 - sol.phi0) * std::exp(-ma0 * t[i]) * (1.0 + 1e-8);
    if (u[i] - sol.phi0 > bound) ++out.exponential_bound_violations;
  }
  out.samples = t.size();

  out.compared_time = fv_final.t;
  const std::vector<double> ref = oracle_cell_averages(sol, fv_final.t, fv_final.grid);
  CompensatedSum l1;
  for (std::size_t i = 0; i < ref.size(); ++i) l1.add(std::abs(fv_final.f[i] - ref[i]) * fv_final.grid.dx());
  out.density_l1_error = l1.value();
  return out;
}

}  // namespace lsn
