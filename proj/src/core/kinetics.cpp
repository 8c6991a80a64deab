#include "kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace lsn {

namespace {

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << what << ": argument must be >= 0, got " << x;
    throw DomainError(os.str());
  }
}

void require_invertible_phi(const RateModel& model, const char* what) {
  if (model.constant_phi()) throw ConstantPhiError(std::string(what) + " requires alpha < beta");
  if (model.alpha > model.beta) {
    throw HypothesisError(std::string(what) + " requires alpha < beta (Phi must increase)");
  }
}

void require_integrable_inverse_a(const RateModel& model, const char* what) {
  if (!(model.alpha < 1.0)) {
    throw HypothesisError(std::string(what) + ": 1/a is not integrable at 0 (alpha >= 1)");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double RateModel::phi0() const {
  if (alpha < beta) return 0.0;
  if (alpha == beta) return b_coef / a_coef;
  return std::numeric_limits<double>::infinity();
}

double eval_a(const RateModel& model, double x) {
  require_nonnegative(x, "eval_a");
  return model.a_coef * std::pow(x, model.alpha);
}

double eval_b(const RateModel& model, double x) {
  require_nonnegative(x, "eval_b");
  return model.b_coef * std::pow(x, model.beta);
}

double eval_phi(const RateModel& model, double x) {
  require_nonnegative(x, "eval_phi");
  if (model.constant_phi()) return model.b_coef / model.a_coef;
  if (x == 0.0) return model.phi0();
  return (model.b_coef / model.a_coef) * std::pow(x, model.beta - model.alpha);
}

double eval_phi_inverse(const RateModel& model, double y) {
  require_invertible_phi(model, "eval_phi_inverse");
  require_nonnegative(y, "eval_phi_inverse");
  return std::pow(model.a_coef * y / model.b_coef, 1.0 / (model.beta - model.alpha));
}

double eval_nucleation(const RateModel& model, double u) {
  require_nonnegative(u, "eval_nucleation");
  double base = u;
  if (model.shifted_nucleation) base = std::max(u - model.phi0(), 0.0);
  double out = model.n_coef;
  for (int k = 0; k < model.i0; ++k) out *= base;
  return out;
}

double antiderivative_A(const RateModel& model, double x) {
  require_integrable_inverse_a(model, "antiderivative_A");
  require_nonnegative(x, "antiderivative_A");
  const double e = 1.0 - model.alpha;
  return std::pow(x, e) / (model.a_coef * e);
}

double antiderivative_A_inverse(const RateModel& model, double v) {
  require_integrable_inverse_a(model, "antiderivative_A_inverse");
  require_nonnegative(v, "antiderivative_A_inverse");
  const double e = 1.0 - model.alpha;
  return std::pow(model.a_coef * e * v, 1.0 / e);
}

double antiderivative_Psi(const RateModel& model, double v) {
  require_invertible_phi(model, "antiderivative_Psi");
  require_nonnegative(v, "antiderivative_Psi");
  const double p = 1.0 / (model.beta - model.alpha);
  return std::pow(model.a_coef / model.b_coef, p) * std::pow(v, p + 1.0) / (p + 1.0);
}

bool HypothesisReport::all_pass() const {
  for (const auto& c : checks) {
    if (c.status != HypothesisStatus::kPass) return false;
  }
  return true;
}

bool HypothesisReport::constant_phi_regime() const {
  for (const auto& c : checks) {
    if (c.status == HypothesisStatus::kConstantPhi) return true;
  }
  return false;
}

const HypothesisCheck* HypothesisReport::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const char* to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::kPass: return "pass";
    case HypothesisStatus::kFail: return "fail";
    case HypothesisStatus::kConstantPhi: return "constant-Phi regime";
  }
  return "unknown";
}

HypothesisReport validate_hypotheses(const RateModel& m) {
  using S = HypothesisStatus;
  HypothesisReport r;
  auto pass_if = [](bool ok) { return ok ? S::kPass : S::kFail; };

  r.checks.push_back({"H0", pass_if(m.a_coef > 0.0 && m.b_coef > 0.0 && m.alpha >= 0.0 && m.alpha <= m.beta),
                      "a_coef=" + fmt(m.a_coef) + " > 0, Phi(0+) finite requires alpha <= beta"});

  if (m.constant_phi()) {
    r.checks.push_back({"H1", S::kConstantPhi, "alpha == beta: Phi is constant = " + fmt(m.phi0())});
  } else {
    r.checks.push_back({"H1", pass_if(m.alpha < m.beta), "Phi strictly increasing iff alpha < beta"});
  }

  r.checks.push_back({"H2", pass_if(m.alpha <= 1.0 && m.beta <= 1.0),
                      "a', b' bounded on (eps, inf) iff alpha, beta <= 1 (alpha=" + fmt(m.alpha) +
                          ", beta=" + fmt(m.beta) + ")"});

  r.checks.push_back({"H3", pass_if(m.alpha >= 0.0 && m.alpha < 1.0),
                      "1/a integrable at 0 iff alpha < 1 (alpha=" + fmt(m.alpha) + ")"});

  const double bphi_exp = 2.0 * m.beta - m.alpha;
  r.checks.push_back({"H4", pass_if(bphi_exp <= 2.0),
                      "b(x)Phi(x) ~ x^(2beta-alpha), exponent " + fmt(bphi_exp) + " <= 2"});

  r.checks.push_back({"H5", pass_if(m.n_coef > 0.0 && m.i0 >= 1),
                      "n(z) >= c z^i0 with c=" + fmt(m.n_coef) + ", i0=" + std::to_string(m.i0)});
  return r;
}

}  // namespace lsn
