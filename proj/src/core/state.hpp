#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "kinetics.hpp"

namespace lsn {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Uniform mesh on [0, x_max]: cell i spans [i*dx, (i+1)*dx].
struct Grid {
  double x_max = 1.0;
  std::size_t n_cells = 1000;

  Grid() = default;
  Grid(double x_max_, std::size_t n_cells_);

  double dx() const { return x_max / static_cast<double>(n_cells); }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx(); }
  double face(std::size_t i) const { return static_cast<double>(i) * dx(); }

  bool operator==(const Grid&) const = default;
};

/// Cell-averaged number density at time t for a system of total mass rho.
///
/// `outflow_mass` and `outflow_count` accumulate what left through x = x_max;
/// that mass is still accounted for by the conservation law, so it does not
/// reappear as monomers.
struct SimState {
  Grid grid;
  std::vector<double> f;
  double t = 0.0;
  double rho = 1.0;
  double outflow_mass = 0.0;
  double outflow_count = 0.0;

  SimState() = default;
  SimState(Grid g, double rho_);
  SimState(Grid g, std::vector<double> density, double rho_, double t_ = 0.0);
};

enum class MonomerStatus { kOk, kAtOrBelowThreshold, kNegative };

/// u = rho - sum x_i f_i dx - outflow_mass (midpoint quadrature).
double monomer(const SimState& state);

/// Classifies u against phi0 without clamping it.
MonomerStatus check_monomer(const SimState& state, const RateModel& model);

/// M_k = sum x_i^k f_i dx, k >= 0.
double moment(const SimState& state, double k);

double weighted_moment(const SimState& state, const std::function<double(double)>& w);

/// Fraction of the aggregate mass carried by cells with center below eps.
double mass_concentration(const SimState& state, double eps);

}  // namespace lsn
