#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "kinetics.hpp"

using namespace lsn;

namespace {

RateModel fig1() { return RateModel{}; }

RateModel make(double a, double alpha, double b, double beta, double c = 1.0, int i0 = 2) {
  RateModel m;
  m.a_coef = a;
  m.alpha = alpha;
  m.b_coef = b;
  m.beta = beta;
  m.n_coef = c;
  m.i0 = i0;
  return m;
}

}  // namespace

TEST_CASE("rates") {
  const RateModel m = fig1();
  CHECK(eval_a(m, 1.0) == 1.0);
  CHECK(eval_a(m, 0.0) == 0.0);
  CHECK(eval_a(m, 8.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_b(m, 1.0) == 1.0);
  CHECK(eval_b(m, 0.0) == 0.0);
  CHECK(eval_b(m, 8.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_a(m, -1.0), DomainError);
  CHECK_THROWS_AS(eval_b(m, -1e-300), DomainError);
}

TEST_CASE("Phi and its inverse") {
  const RateModel m = fig1();
  CHECK(eval_phi(m, 8.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_phi_inverse(m, 2.0) == doctest::Approx(8.0).epsilon(1e-14));
  const RateModel flat = make(2.0, 0.4, 1.0, 0.4);
  for (double x : {1e-3, 1.0, 50.0}) CHECK(eval_phi(flat, x) == 0.5);
  CHECK(flat.phi0() == 0.5);
  CHECK(m.phi0() == 0.0);
  CHECK_THROWS_AS(eval_phi_inverse(flat, 1.0), ConstantPhiError);

  const RateModel other = make(1.7, 0.2, 0.3, 0.9);
  for (double x = 1e-6; x <= 1e6; x *= 3.7) {
    CHECK(std::abs(eval_phi_inverse(other, eval_phi(other, x)) / x - 1.0) < 1e-12);
  }
}

TEST_CASE("nucleation") {
  const RateModel m = fig1();
  CHECK(eval_nucleation(m, 1.0) == 1.0);
  CHECK(eval_nucleation(m, 0.0) == 0.0);
  CHECK(eval_nucleation(m, 0.5) == 0.25);
  double prev = 0.0;
  for (double u = 0.0; u <= 1.0; u += 0.01) {
    const double n = eval_nucleation(m, u);
    CHECK(n >= prev);
    prev = n;
  }
  RateModel shifted = make(1.0, 0.0, 0.5, 0.0, 3.0, 2);
  shifted.shifted_nucleation = true;
  CHECK(eval_nucleation(shifted, shifted.phi0()) == 0.0);
  CHECK(eval_nucleation(shifted, 0.3) == 0.0);
  CHECK(eval_nucleation(shifted, 0.75) == doctest::Approx(3.0 * 0.0625));
}

TEST_CASE("primitives") {
  CHECK(antiderivative_A(make(1.0, 0.0, 1.0, 1.0), 0.37) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(antiderivative_A(make(1.0, 0.5, 1.0, 1.0), 4.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(antiderivative_A(fig1(), 0.0) == 0.0);
  CHECK_THROWS_AS(antiderivative_A(make(1.0, 1.2, 1.0, 1.2), 1.0), HypothesisError);

  const RateModel m = make(0.7, 0.3, 1.0, 0.8);
  double prev = -1.0;
  for (double x = 1e-6; x <= 1e6; x *= 2.3) {
    const double a = antiderivative_A(m, x);
    CHECK(a > prev);
    prev = a;
    CHECK(std::abs(antiderivative_A_inverse(m, a) / x - 1.0) < 1e-12);
  }

  CHECK(antiderivative_Psi(fig1(), 0.0) == 0.0);
  for (double v : {0.3, 1.0, 2.5}) {
    CHECK(antiderivative_Psi(make(1.0, 0.0, 1.0, 1.0), v) == doctest::Approx(v * v / 2.0).epsilon(1e-14));
  }
  CHECK(antiderivative_Psi(fig1(), 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(antiderivative_Psi(make(1.0, 0.5, 1.0, 0.5), 1.0), ConstantPhiError);
}

TEST_CASE("Psi is the primitive of Phi inverse") {
  // Simpson on Phi^{-1} as an independent oracle.
  const RateModel m = make(1.3, 0.25, 0.6, 0.75);
  const double v = 1.7;
  const int n = 20000;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * eval_phi_inverse(m, v * k / n);
  }
  s *= v / n / 3.0;
  CHECK(antiderivative_Psi(m, v) == doctest::Approx(s).epsilon(1e-9));
}

TEST_CASE("sublinear rate bound") {
  const RateModel m = make(1.4, 1.0 / 3.0, 0.8, 2.0 / 3.0);
  for (double x = 1e-8; x <= 1e8; x *= 1.9) {
    CHECK(eval_a(m, x) + eval_b(m, x) <= (m.a_coef + m.b_coef) * (1.0 + x) * (1.0 + 1e-15));
  }
}

TEST_CASE("hypothesis report") {
  const HypothesisReport ok = validate_hypotheses(fig1());
  CHECK(ok.all_pass());
  CHECK(ok.checks.size() == 6);

  const HypothesisReport flat = validate_hypotheses(make(1.0, 0.0, 1.0, 0.0));
  REQUIRE(flat.find("H1") != nullptr);
  CHECK(flat.find("H1")->status == HypothesisStatus::kConstantPhi);
  CHECK(flat.constant_phi_regime());
  CHECK(std::string(to_string(HypothesisStatus::kConstantPhi)) == "constant-Phi regime");

  const HypothesisReport steep = validate_hypotheses(make(1.0, 1.2, 1.0, 1.5));
  CHECK(steep.find("H3")->status == HypothesisStatus::kFail);
  CHECK_FALSE(steep.all_pass());

  CHECK(validate_hypotheses(make(1.0, 0.0, 1.0, 1.0, 0.0)).find("H5")->status == HypothesisStatus::kFail);
}
