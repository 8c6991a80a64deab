#include "state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace lsn {

Grid::Grid(double x_max_, std::size_t n_cells_) : x_max(x_max_), n_cells(n_cells_) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ConfigError("grid.x_max must be positive");
  if (n_cells == 0) throw ConfigError("grid.n_cells must be positive");
}

SimState::SimState(Grid g, double rho_) : grid(g), f(g.n_cells, 0.0), rho(rho_) {
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
}

SimState::SimState(Grid g, std::vector<double> density, double rho_, double t_)
    : grid(g), f(std::move(density)), t(t_), rho(rho_) {
  if (f.size() != grid.n_cells) {
    std::ostringstream os;
    os << "density has " << f.size() << " entries, grid has " << grid.n_cells << " cells";
    throw ConfigError(os.str());
  }
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0)) {
      std::ostringstream os;
      os << "density must be nonnegative (cell " << i << " = " << f[i] << ")";
      throw ConfigError(os.str());
    }
  }
}

double monomer(const SimState& state) {
  const double dx = state.grid.dx();
  CompensatedSum m1;
  for (std::size_t i = 0; i < state.f.size(); ++i) m1.add(state.grid.center(i) * state.f[i] * dx);
  return state.rho - m1.value() - state.outflow_mass;
}

MonomerStatus check_monomer(const SimState& state, const RateModel& model) {
  const double u = monomer(state);
  if (u < 0.0) return MonomerStatus::kNegative;
  if (u <= model.phi0()) return MonomerStatus::kAtOrBelowThreshold;
  return MonomerStatus::kOk;
}

double moment(const SimState& state, double k) {
  if (!(k >= 0.0)) throw DomainError("moment order must be >= 0");
  const double dx = state.grid.dx();
  CompensatedSum acc;
  if (k == 0.0) {
    for (double fi : state.f) acc.add(fi * dx);
  } else if (k == 1.0) {
    for (std::size_t i = 0; i < state.f.size(); ++i) acc.add(state.grid.center(i) * state.f[i] * dx);
  } else {
    for (std::size_t i = 0; i < state.f.size(); ++i) {
      acc.add(std::pow(state.grid.center(i), k) * state.f[i] * dx);
    }
  }
  return acc.value();
}

double weighted_moment(const SimState& state, const std::function<double(double)>& w) {
  const double dx = state.grid.dx();
  CompensatedSum acc;
  for (std::size_t i = 0; i < state.f.size(); ++i) acc.add(w(state.grid.center(i)) * state.f[i] * dx);
  return acc.value();
}

double mass_concentration(const SimState& state, double eps) {
  if (!(eps > 0.0)) throw DomainError("mass_concentration: eps must be positive");
  constexpr double kFloor = 1e-300;
  const double dx = state.grid.dx();
  CompensatedSum below;
  CompensatedSum total;
  for (std::size_t i = 0; i < state.f.size(); ++i) {
    const double x = state.grid.center(i);
    const double m = x * state.f[i] * dx;
    total.add(m);
    if (x < eps) below.add(m);
  }
  const double denom = std::max(total.value(), kFloor);
  if (total.value() <= kFloor) return 0.0;
  return std::clamp(below.value() / denom, 0.0, 1.0);
}

}  // namespace lsn
