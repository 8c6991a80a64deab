#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "oracle.hpp"

using namespace lsn;

namespace {

RateModel constant_model(double alpha, double a, double b, double c, int i0) {
  RateModel m;
  m.alpha = alpha;
  m.beta = alpha;
  m.a_coef = a;
  m.b_coef = b;
  m.n_coef = c;
  m.i0 = i0;
  m.shifted_nucleation = true;
  return m;
}

double bump(double x) { return std::max(-2000.0 * (x - 0.2) * (x - 0.3), 0.0); }

InitialDensity bump_density(double x_max = 1.0, std::size_t n = 2000) {
  return InitialDensity::sample(bump, x_max, n);
}

// Composite 8-point Gauss-Legendre on [lo, hi] split into `pieces`.
double gauss(const std::function<double(double)>& g, double lo, double hi, int pieces = 1) {
  static const double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
  static const double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  double total = 0.0;
  const double h = (hi - lo) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double c = lo + (p + 0.5) * h;
    const double r = 0.5 * h;
    for (int k = 0; k < 4; ++k) total += ws[k] * r * (g(c - r * xs[k]) + g(c + r * xs[k]));
  }
  return total;
}

// int density_at(t, x) phi(x) dx with breakpoints at the images of the
// oracle's time nodes and of the initial-data sample centers.
double integrate_density(const OracleSolution& sol, double t, const std::function<double(double)>& phi,
                         double x_hi) {
  std::vector<double> bp{0.0};
  const double gt = sol.gamma_at(t);
  for (std::size_t j = 0; j < sol.times.size() && sol.times[j] <= t; ++j) {
    bp.push_back(antiderivative_A_inverse(sol.model, gt - sol.gamma_hist[j]));
  }
  bp.push_back(antiderivative_A_inverse(sol.model, gt));
  for (std::size_t j = 0; j < sol.f_in.values.size(); ++j) {
    const double x = characteristic_X(sol, t, sol.f_in.center(j));
    if (x < x_hi) bp.push_back(x);
  }
  bp.push_back(x_hi);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    if (bp[k + 1] - bp[k] < 1e-15) continue;
    if (k == 0) {
      // a(x)^{-1} may blow up like x^{-alpha} at the origin; x = z^2 tames it.
      total += gauss([&](double z) { return density_at(sol, t, z * z) * phi(z * z) * 2.0 * z; }, 0.0,
                     std::sqrt(bp[1]));
    } else {
      total += gauss([&](double x) { return density_at(sol, t, x) * phi(x); }, bp[k], bp[k + 1]);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("empty system keeps u at rho") {
  RateModel m = constant_model(0.0, 1.0, 0.5, 0.0, 2);
  InitialDensity empty;
  empty.h = 1e-3;
  empty.values.assign(100, 0.0);
  const OracleSolution sol = solve_history(m, empty, 1.0, 2.0, 0.01);
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    CHECK(sol.u_hist[j] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sol.gamma_hist[j] == doctest::Approx(0.5 * sol.times[j]).epsilon(1e-13));
    CHECK(sol.ma_hist[j] == 0.0);
  }
}

TEST_CASE("constant a without nucleation decays exactly exponentially") {
  // a = 1, n = 0: M_a = M0(f_in) = m0, u - phi0 = (u0 - phi0) exp(-m0 t).
  RateModel m = constant_model(0.0, 1.0, 0.5, 0.0, 2);
  const InitialDensity f_in = bump_density();
  const double m0 = f_in.moment(0.0);
  const double u0 = 1.0 - f_in.moment(1.0);
  const OracleSolution sol = solve_history(m, f_in, 1.0, 5.0, 1e-4);
  double worst = 0.0;
  for (std::size_t j = 0; j < sol.times.size(); j += 97) {
    const double exact = 0.5 + (u0 - 0.5) * std::exp(-m0 * sol.times[j]);
    worst = std::max(worst, std::abs(sol.u_hist[j] - exact) / exact);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("exponential bound holds when a is nondecreasing") {
  for (double alpha : {0.0, 0.5}) {
    RateModel m = constant_model(alpha, 1.0, 0.5, 1.0, 2);
    const InitialDensity f_in = bump_density();
    const OracleSolution sol = solve_history(m, f_in, 1.0, 5.0, 2e-3);
    const double w0 = sol.u_hist.front() - sol.phi0;
    for (std::size_t j = 0; j < sol.times.size(); ++j) {
      CHECK(sol.u_hist[j] - sol.phi0 <= w0 * std::exp(-sol.ma_hist.front() * sol.times[j]) * (1.0 + 1e-8));
    }
  }
}

TEST_CASE("history is monotone and bounded") {
  RateModel m = constant_model(0.5, 1.0, 0.5, 1.0, 2);
  const InitialDensity f_in = bump_density();
  const OracleSolution a = solve_history(m, f_in, 1.0, 8.0, 4e-3);
  for (std::size_t j = 1; j < a.times.size(); ++j) {
    CHECK(a.u_hist[j] < a.u_hist[j - 1]);
    CHECK(a.gamma_hist[j] > a.gamma_hist[j - 1]);
    CHECK(a.u_hist[j] > a.phi0);
  }
  // gamma(T) - gamma(T/2) shrinks when T doubles.
  const OracleSolution b = solve_history(m, f_in, 1.0, 16.0, 4e-3);
  const double gap_a = a.gamma_at(8.0) - a.gamma_at(4.0);
  const double gap_b = b.gamma_at(16.0) - b.gamma_at(8.0);
  CHECK(gap_b < 0.5 * gap_a);
}

TEST_CASE("characteristics") {
  RateModel m = constant_model(0.0, 1.0, 0.5, 1.0, 2);
  const InitialDensity f_in = bump_density();
  const OracleSolution sol = solve_history(m, f_in, 1.0, 2.0, 1e-3);
  SUBCASE("identity at t = 0") { CHECK(characteristic_X(sol, 0.0, 0.37) == doctest::Approx(0.37)); }
  SUBCASE("translation when a = 1") {
    CHECK(characteristic_X(sol, 1.5, 0.2) == doctest::Approx(0.2 + sol.gamma_at(1.5)).epsilon(1e-14));
    CHECK(sigma_inverse(sol, 1.5, 0.5) == doctest::Approx(sol.gamma_at(1.5) - sol.gamma_at(0.5)).epsilon(1e-14));
  }
  SUBCASE("birth map endpoints") {
    CHECK(sigma_inverse(sol, 1.2, 1.2) == 0.0);
    CHECK(sigma_inverse(sol, 1.2, 0.0) == doctest::Approx(sol.x_c(1.2)).epsilon(1e-14));
    CHECK(characteristic_X(sol, 1.2, 0.0) == doctest::Approx(sol.x_c(1.2)).epsilon(1e-14));
    CHECK(sigma_inverse(sol, 1.2, 0.3) > sigma_inverse(sol, 1.2, 0.9));
    CHECK_THROWS_AS(sigma_inverse(sol, 1.0, 1.5), DomainError);
  }
}

TEST_CASE("characteristic X matches the ODE for alpha = beta = 1/2") {
  RateModel m = constant_model(0.5, 1.0, 0.5, 1.0, 2);
  const OracleSolution sol = solve_history(m, bump_density(), 1.0, 2.0, 1e-3);
  // Closed form ((2 sqrt x + gamma) / 2)^2.
  const double x0 = 0.3, t = 1.7;
  const double closed = std::pow((2.0 * std::sqrt(x0) + sol.gamma_at(t)) / 2.0, 2.0);
  CHECK(characteristic_X(sol, t, x0) == doctest::Approx(closed).epsilon(1e-12));
  // RK4 on dX/ds = (u(s) - phi0) a(X), with u - phi0 taken as the piecewise
  // constant slope of gamma so the ODE and the oracle see the same driver.
  double x = x0;
  const double h = 1e-3;
  for (std::size_t j = 0; j + 1 < sol.times.size() && sol.times[j] < t - 1e-12; ++j) {
    const double w = sol.slope[j];
    const double step = std::min(h, t - sol.times[j]);
    auto rhs = [&](double y) { return w * std::sqrt(y); };
    const double k1 = rhs(x), k2 = rhs(x + 0.5 * step * k1), k3 = rhs(x + 0.5 * step * k2), k4 = rhs(x + step * k3);
    x += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(x == doctest::Approx(characteristic_X(sol, t, x0)).epsilon(1e-10));
}

TEST_CASE("density reconstruction") {
  SUBCASE("no nucleation leaves the left branch empty and translates the bump") {
    RateModel m = constant_model(0.0, 1.0, 0.5, 0.0, 2);
    const InitialDensity f_in = bump_density();
    const OracleSolution sol = solve_history(m, f_in, 1.0, 1.0, 1e-3);
    const double g = sol.gamma_at(1.0);
    CHECK(density_at(sol, 1.0, 0.5 * g) == 0.0);
    for (double x : {0.25, 0.27, 0.31}) CHECK(density_at(sol, 1.0, x + g) == doctest::Approx(f_in.eval(x)));
  }
  SUBCASE("mass is conserved by the reconstruction") {
    for (double alpha : {0.0, 0.5}) {
      RateModel m = constant_model(alpha, 1.0, 0.5, 1.0, 2);
      const OracleSolution sol = solve_history(m, bump_density(), 1.0, 3.0, 1e-3);
      for (double t : {0.5, 1.5, 3.0}) {
        const double mass = integrate_density(sol, t, [](double x) { return x; }, 3.0);
        CHECK(std::abs(mass + sol.u_at(t) - 1.0) < 1e-5);
      }
    }
  }
  SUBCASE("two-branch density reproduces the mild formulation") {
    for (double alpha : {0.0, 0.5}) {
      RateModel m = constant_model(alpha, 1.0, 0.5, 1.0, 2);
      const OracleSolution sol = solve_history(m, bump_density(), 1.0, 2.0, 1e-2);
      const std::vector<std::function<double(double)>> phis = {
          [](double) { return 1.0; }, [](double x) { return x; }, [&](double x) { return eval_a(m, x); }};
      for (const auto& phi : phis) {
        const double lhs = integrate_density(sol, 2.0, phi, 3.0);
        const double rhs = mild_functional(sol, 2.0, phi);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
      }
    }
  }
}

TEST_CASE("limit density") {
  SUBCASE("no nucleation is pure transport of the initial data") {
    RateModel m = constant_model(0.0, 1.0, 0.5, 0.0, 2);
    const InitialDensity f_in = bump_density();
    const OracleSolution sol = solve_history(m, f_in, 1.0, 20.0, 1e-2);
    const double gb = limit_gamma(sol);
    CHECK(limit_density_at(sol, gb, 0.5 * gb) == 0.0);
    CHECK(limit_density_at(sol, gb, 0.25 + gb) == doctest::Approx(f_in.eval(0.25)));
  }
  SUBCASE("no initial data gives support below x_c only") {
    RateModel m = constant_model(0.0, 1.0, 0.5, 1.0, 2);
    InitialDensity empty;
    empty.h = 1e-3;
    empty.values.assign(1000, 0.0);
    const OracleSolution sol = solve_history(m, empty, 1.0, 20.0, 1e-2);
    const LimitDensity lim = limit_density(sol, limit_density_grid(sol, 3.0, 300));
    CHECK(lim.x_c_bar > 0.0);
    for (std::size_t i = 0; i < lim.x.size(); ++i) {
      if (lim.x[i] > lim.x_c_bar) CHECK(lim.fbar[i] == 0.0);
    }
    CHECK(std::abs(lim.mass_defect) < 1e-4);
  }
  SUBCASE("weak limit agrees with the late-time density") {
    RateModel m = constant_model(0.0, 1.0, 0.5, 1.0, 2);
    const OracleSolution sol = solve_history(m, bump_density(), 1.0, 40.0, 1e-2);
    const std::vector<std::function<double(double)>> phis = {
        [](double) { return 1.0; }, [](double x) { return x; }, [](double x) { return std::min(x, 1.0); }};
    for (const auto& phi : phis) {
      const double late = integrate_density(sol, 40.0, phi, 4.0);
      CHECK(std::abs(limit_functional(sol, phi) - late) < 1e-3);
    }
    const LimitDensity lim = limit_density(sol, limit_density_grid(sol, 4.0, 100));
    CHECK(lim.unconverged_gap > 0.0);
    CHECK(lim.extrapolation_residual >= 0.0);
    // One sample on each side of the jump.
    const auto it = std::lower_bound(lim.x.begin(), lim.x.end(), lim.x_c_bar);
    REQUIRE(it != lim.x.begin());
    REQUIRE(it != lim.x.end());
  }
}

TEST_CASE("preconditions") {
  RateModel m = constant_model(0.0, 1.0, 0.5, 1.0, 2);
  RateModel unshifted = m;
  unshifted.shifted_nucleation = false;
  CHECK_THROWS_AS(solve_history(unshifted, bump_density(), 1.0, 1.0, 1e-3), ConfigError);
  RateModel algebraic;  // alpha < beta
  CHECK_THROWS_AS(solve_history(algebraic, bump_density(), 1.0, 1.0, 1e-3), ConfigError);
  // u(0) = 0.4 < phi0 = 0.5.
  CHECK_THROWS_AS(solve_history(m, bump_density(), 1.0 / 12.0 + 0.4, 1.0, 1e-3), ConfigError);
}

TEST_CASE("comparison with a finite-volume run") {
  RateModel m = constant_model(0.0, 1.0, 0.5, 0.0, 2);
  Grid grid(1.0, 100);
  SimState empty(grid, 1.0);
  const OracleSolution sol = solve_history(m, InitialDensity::from_state(empty), 1.0, 1.0, 1e-2);
  TimeSeries series({"t", "u", "Ma"});
  series.append({0.0, 1.0, 0.0});
  series.append({0.5, 1.0, 0.0});
  series.append({1.0, 1.0, 0.0});
  SimState final_state = empty;
  final_state.t = 1.0;
  const OracleComparison c = compare_with_fv(sol, m, series, final_state);
  CHECK(c.u_sup_error == 0.0);
  CHECK(c.density_l1_error == 0.0);
  CHECK(c.exponential_bound_violations == 0);

  RateModel other = m;
  other.b_coef = 0.25;
  CHECK_THROWS_AS(compare_with_fv(sol, other, series, final_state), ConfigError);
  SimState heavier(grid, 2.0);
  heavier.t = 1.0;
  CHECK_THROWS_AS(compare_with_fv(sol, m, series, heavier), ConfigError);
}
