#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "fv_solver.hpp"

using namespace lsn;

namespace {

RateModel fig1() { return RateModel{}; }

SimState random_state(std::uint32_t seed, std::size_t n = 200, double x_max = 2.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Grid g(x_max, n);
  std::vector<double> f(n);
  for (auto& v : f) v = unif(gen) < 0.3 ? 0.0 : unif(gen);
  SimState s(g, f, 1.0);
  s.rho = moment(s, 1.0) + 0.05 + unif(gen);
  return s;
}

}  // namespace

TEST_CASE("Lyapunov choices") {
  CHECK(LyapunovChoice::parse("quadratic") == LyapunovChoice::quadratic());
  CHECK(LyapunovChoice::parse("phi_primitive").name() == "phi_primitive");
  CHECK(LyapunovChoice::parse("power:1.5").eta == 1.5);
  CHECK(LyapunovChoice::power(3.0).name() == "power:3");
  CHECK_THROWS_AS(LyapunovChoice::parse("power:0.5"), ConfigError);
  CHECK_THROWS_AS(LyapunovChoice::parse("power:x"), ConfigError);
  CHECK_THROWS_AS(LyapunovChoice::parse("cubic"), ConfigError);
}

TEST_CASE("K") {
  const RateModel m = fig1();
  CHECK(capital_K(m, LyapunovChoice::phi_primitive(), 2.0) == 2.0);
  CHECK(capital_K(m, LyapunovChoice::quadratic(), 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  for (auto c : {LyapunovChoice::quadratic(), LyapunovChoice::phi_primitive(), LyapunovChoice::power(1.7)}) {
    CHECK(capital_K(m, c, 0.0) == 0.0);
  }
  RateModel flat = m;
  flat.beta = flat.alpha;
  CHECK_THROWS_AS(capital_K(flat, LyapunovChoice::quadratic(), 1.0), ConstantPhiError);

  // Power weight against Simpson on eta Phi^{-1}(z)^(eta-1).
  RateModel other = m;
  other.a_coef = 1.5;
  other.b_coef = 0.7;
  const double eta = 2.5, v = 1.3;
  const int n = 20000;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * eta * std::pow(eval_phi_inverse(other, v * k / n), eta - 1.0);
  }
  s *= v / n / 3.0;
  CHECK(capital_K(other, LyapunovChoice::power(eta), v) == doctest::Approx(s).epsilon(1e-9));
}

TEST_CASE("H and D") {
  const RateModel m = fig1();
  SimState empty(Grid(1.0, 100), 1.0);
  CHECK(lyapunov_H(empty, m, LyapunovChoice::quadratic()) == doctest::Approx(0.25).epsilon(1e-14));
  SimState heavy(Grid(1.0, 100), 2.0);
  CHECK(lyapunov_H(heavy, m, LyapunovChoice::quadratic()) == doctest::Approx(antiderivative_Psi(m, 2.0)));
  for (auto c : {LyapunovChoice::quadratic(), LyapunovChoice::phi_primitive(), LyapunovChoice::power(3.0)}) {
    CHECK(dissipation_D(empty, m, c) == 0.0);
  }

  SUBCASE("single cell at the critical size") {
    Grid g(1.0, 100);
    SimState s(g, 1.0);
    s.f[37] = 3.0;
    s.rho = eval_phi(m, g.center(37)) + moment(s, 1.0);
    for (auto c : {LyapunovChoice::quadratic(), LyapunovChoice::phi_primitive(), LyapunovChoice::power(2.0)}) {
      CHECK(std::abs(dissipation_D(s, m, c)) < 1e-15);
    }
  }

  SUBCASE("phi_primitive against a direct sum") {
    const SimState s = random_state(7);
    const double u = monomer(s);
    double direct = 0.0;
    for (std::size_t i = 0; i < s.f.size(); ++i) {
      const double x = (i + 0.5) * s.grid.dx();
      const double gap = u - std::cbrt(x);  // Phi(x) = x^(1/3)
      direct += gap * gap * std::cbrt(x) * s.f[i] * s.grid.dx();
    }
    CHECK(dissipation_D(s, m, LyapunovChoice::phi_primitive()) == doctest::Approx(direct).epsilon(1e-12));
  }

  SUBCASE("D is nonnegative") {
    for (std::uint32_t seed = 1; seed < 20; ++seed) {
      const SimState s = random_state(seed);
      for (auto c : {LyapunovChoice::quadratic(), LyapunovChoice::phi_primitive(), LyapunovChoice::power(1.0),
                     LyapunovChoice::power(4.0)}) {
        CHECK(dissipation_D(s, m, c) >= 0.0);
      }
    }
  }

  SUBCASE("phi_primitive D in the constant-Phi regime") {
    RateModel flat = m;
    flat.alpha = flat.beta = 0.0;
    flat.b_coef = 0.25;
    const SimState s = random_state(3);
    const double u = monomer(s);
    CHECK(dissipation_D(s, flat, LyapunovChoice::phi_primitive()) ==
          doctest::Approx((u - 0.25) * (u - 0.25) * moment(s, 0.0)).epsilon(1e-12));
    CHECK_THROWS_AS(dissipation_D(s, flat, LyapunovChoice::quadratic()), ConstantPhiError);
  }
}

TEST_CASE("tail distribution") {
  SimState empty(Grid(1.0, 10), 1.0);
  for (double v : tail_distribution(empty)) CHECK(v == 0.0);

  Grid g(1.0, 10);
  SimState one(g, 1.0);
  one.f[4] = 7.0;
  const auto step_fn = tail_distribution(one);
  for (std::size_t j = 0; j <= 10; ++j) CHECK(step_fn[j] == (j <= 4 ? doctest::Approx(0.7) : doctest::Approx(0.0)));

  const SimState s = random_state(11);
  const auto tail = tail_distribution(s);
  CHECK(tail.back() == 0.0);
  CHECK(tail.front() == doctest::Approx(moment(s, 0.0)).epsilon(1e-15));
  for (std::size_t j = 1; j < tail.size(); ++j) CHECK(tail[j] <= tail[j - 1]);
}

TEST_CASE("normalized profile") {
  const auto xs = profile_abscissa(1e-3, 10.0, 50);
  CHECK(xs.front() == 1e-3);
  CHECK(xs.back() == 10.0);
  CHECK(xs[1] / xs[0] == doctest::Approx(xs[49] / xs[48]));
  CHECK_THROWS_AS(profile_abscissa(0.0, 1.0, 10), ConfigError);

  SimState empty(Grid(1.0, 10), 1.0);
  for (double v : normalized_profile(empty, xs)) CHECK(v == 0.0);

  // Direct oracle: F(y) = int_y^xmax f for piecewise-constant f.
  const SimState s = random_state(5, 40, 2.0);
  auto tail_at = [&](double y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.f.size(); ++i) {
      const double lo = std::max(y, s.grid.face(i));
      const double hi = (i + 1) * s.grid.dx();
      if (hi > lo) acc += s.f[i] * (hi - lo);
    }
    return acc;
  };
  const double scale = 1.0 + moment(s, 0.0);
  const auto divide = normalized_profile(s, xs);
  const auto multiply = normalized_profile(s, xs, ProfileScaling::kMultiply);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    CHECK(divide[k] == doctest::Approx(tail_at(xs[k] / scale) / scale).epsilon(1e-12));
    CHECK(multiply[k] == doctest::Approx(tail_at(xs[k] * scale) / scale).epsilon(1e-12));
  }
}

TEST_CASE("time derivative") {
  std::vector<double> t, y;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(0.1 * i);
    y.push_back(t.back() * t.back());
  }
  const auto d = time_derivative(t, y);
  for (int i = 1; i < 10; ++i) CHECK(d[i] == doctest::Approx(2.0 * t[i]).epsilon(1e-12));
  CHECK(d.front() == doctest::Approx(0.1));
  CHECK_THROWS_AS(time_derivative(t, {1.0}), SchemaError);
}

TEST_CASE("moment balance residual") {
  const RateModel m = fig1();
  SUBCASE("static series") {
    TimeSeries s({"t", "u", "M0", "M1", "M_0.3333333333", "M_0.6666666667"});
    for (int i = 0; i < 5; ++i) s.append({double(i), 0.0, 2.0, 1.0, 0.0, 0.0});
    CHECK(moment_balance_residual(s, m, 0.0).max_abs() == 0.0);
    CHECK(moment_balance_residual(s, m, 1.0).max_abs() == 0.0);
  }
  SUBCASE("missing columns") {
    TimeSeries s({"t", "u", "M0", "M1"});
    for (int i = 0; i < 5; ++i) s.append({double(i), 0.5, 2.0, 1.0});
    CHECK_THROWS_AS(moment_balance_residual(s, m, 1.0), SchemaError);
    CHECK_THROWS_AS(moment_balance_residual(s, m, 0.5), DomainError);
  }
  SUBCASE("count law converges with dt") {
    SimState s(Grid(1.0, 200), 1.0);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
      SolverConfig cfg;
      cfg.dt = 2e-3 / (1 << level);
      cfg.t_end = 2.0;
      cfg.series_stride = 1;
      const RunResult r = run(s, m, cfg);
      REQUIRE(r.ok);
      const double res = moment_balance_residual(r.series, m, 0.0).max_abs();
      if (level > 0) CHECK(res < 0.6 * prev);
      prev = res;
    }
  }
  SUBCASE("first moment law on a resolved run") {
    DiagnosticsOptions opts;
    opts.fractional_moments = {1.0 / 3.0, 2.0 / 3.0};
    SimState s(Grid(1.0, 2000), 1.0);
    SolverConfig cfg;
    cfg.t_end = 3.0;
    cfg.series_stride = 20;
    const RunResult r = run(s, m, cfg, opts);
    REQUIRE(r.ok);
    const ResidualSeries res = moment_balance_residual(r.series, m, 1.0);
    // Late samples: the discrete mass law matches the continuous one up to O(dx).
    double worst = 0.0;
    for (std::size_t i = res.t.size() / 2; i < res.t.size(); ++i) worst = std::max(worst, std::abs(res.relative[i]));
    CHECK(worst < 0.05);
  }
}

TEST_CASE("recorder rows match the free functions") {
  DiagnosticsOptions opts;
  opts.fractional_moments = {0.5};
  opts.extra_lyapunov = {LyapunovChoice::power(1.5)};
  const SimState s = random_state(21);
  SeriesRecorder rec(s.grid, fig1(), opts);
  TimeSeries series = rec.make_series();
  series.append(rec.row(s, 0.0));
  CHECK(series.at(0, "u") == doctest::Approx(monomer(s)).epsilon(1e-14));
  CHECK(series.at(0, "M0") == doctest::Approx(moment(s, 0.0)).epsilon(1e-14));
  CHECK(series.at(0, "M2") == doctest::Approx(moment(s, 2.0)).epsilon(1e-14));
  CHECK(series.at(0, "M_0.5") == doctest::Approx(moment(s, 0.5)).epsilon(1e-14));
  CHECK(series.at(0, "Ma") == doctest::Approx(moment(s, 1.0 / 3.0)).epsilon(1e-13));
  CHECK(series.at(0, "H") == doctest::Approx(lyapunov_H(s, fig1(), LyapunovChoice::quadratic())).epsilon(1e-13));
  CHECK(series.at(0, "D") == doctest::Approx(dissipation_D(s, fig1(), LyapunovChoice::quadratic())).epsilon(1e-12));
  CHECK(series.at(0, "Dphi") ==
        doctest::Approx(dissipation_D(s, fig1(), LyapunovChoice::phi_primitive())).epsilon(1e-12));
  CHECK(series.at(0, "H_power:1.5") ==
        doctest::Approx(lyapunov_H(s, fig1(), LyapunovChoice::power(1.5))).epsilon(1e-13));

  RateModel flat = fig1();
  flat.beta = flat.alpha;
  SeriesRecorder flat_rec(s.grid, flat, {});
  CHECK(std::find(flat_rec.columns().begin(), flat_rec.columns().end(), "H") == flat_rec.columns().end());
}

TEST_CASE("H decreases along a short run") {
  SimState s(Grid(1.0, 500), 1.0);
  SolverConfig cfg;
  cfg.t_end = 10.0;
  cfg.series_stride = 10;
  const RunResult r = run(s, fig1(), cfg);
  REQUIRE(r.ok);
  const auto h = r.series.column("H");
  const auto d = r.series.column("D");
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-6 * h[0]);
  for (double v : d) CHECK(v >= 0.0);
}
