#pragma once

#include <string>
#include <vector>

namespace lsn {

/// Power-law kinetic rates of the Lifshitz-Slyozov model with nucleation.
///
///   a(x) = a_coef * x^alpha        (monomer attachment)
///   b(x) = b_coef * x^beta         (monomer detachment)
///   n(u) = n_coef * u^i0           (nucleation flux at x = 0)
///
/// With `shifted_nucleation` the nucleation becomes n_coef * (u - phi0)_+^i0,
/// which vanishes at the activation threshold. Only meaningful when
/// alpha == beta, where phi0 = b_coef / a_coef is positive.
struct RateModel {
  double a_coef = 1.0;
  double alpha = 1.0 / 3.0;
  double b_coef = 1.0;
  double beta = 2.0 / 3.0;
  double n_coef = 1.0;
  int i0 = 2;
  bool shifted_nucleation = false;

  /// Limit of Phi at 0+: 0 for alpha < beta, b_coef/a_coef for alpha == beta,
  /// +inf when alpha > beta (hypothesis violation).
  double phi0() const;

  bool constant_phi() const { return alpha == beta; }

  bool operator==(const RateModel&) const = default;
};

double eval_a(const RateModel& model, double x);
double eval_b(const RateModel& model, double x);

double eval_phi(const RateModel& model, double x);
double eval_phi_inverse(const RateModel& model, double y);

double eval_nucleation(const RateModel& model, double u);

/// A(x) = int_0^x 1/a.
double antiderivative_A(const RateModel& model, double x);
double antiderivative_A_inverse(const RateModel& model, double v);

/// Psi(v) = int_0^v Phi^{-1}.
double antiderivative_Psi(const RateModel& model, double v);

enum class HypothesisStatus { kPass, kFail, kConstantPhi };

struct HypothesisCheck {
  std::string id;
  HypothesisStatus status;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_pass() const;
  bool constant_phi_regime() const;
  const HypothesisCheck* find(const std::string& id) const;
};

/// Advisory check of H0..H5 specialised to power laws. Never throws.
HypothesisReport validate_hypotheses(const RateModel& model);

const char* to_string(HypothesisStatus status);

}  // namespace lsn
