#include "fv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace lsn {

namespace {

constexpr double kDensityFloor = 1e-200;

std::string describe_negative(std::size_t cell, double value, double t) {
  std::ostringstream os;
  os << "negative density " << value << " in cell " << cell << " at t=" << t << " (CFL violated?)";
  return os.str();
}

std::string describe_underflow(double u, double t) {
  std::ostringstream os;
  os << "monomer concentration underflow u=" << u << " at t=" << t;
  return os.str();
}

}  // namespace

NegativeDensityError::NegativeDensityError(std::size_t cell, double value, double t)
    : SolverError(describe_negative(cell, value, t)), cell_(cell) {}

MonomerUnderflowError::MonomerUnderflowError(double u, double t) : SolverError(describe_underflow(u, t)) {}

void SolverConfig::validate() const {
  if (dt && !(*dt > 0.0)) throw ConfigError("solver.dt must be positive or \"auto\"");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("solver.cfl_safety must lie in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver.t_end must be >= 0");
  if (series_stride == 0) throw ConfigError("solver.series_stride must be positive");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (!(sample_times[i] >= 0.0 && sample_times[i] <= t_end)) {
      throw ConfigError("solver.sample_times must lie in [0, t_end]");
    }
    if (i > 0 && !(sample_times[i] > sample_times[i - 1])) {
      throw ConfigError("solver.sample_times must be strictly increasing");
    }
  }
}

double face_velocity(const RateModel& model, double u, double x) {
  return eval_a(model, x) * u - eval_b(model, x);
}

std::vector<double> upwind_fluxes(const SimState& state, const RateModel& model) {
  const std::size_t n = state.f.size();
  const double u = monomer(state);
  std::vector<double> flux(n + 1, 0.0);
  flux[0] = u > model.phi0() ? eval_nucleation(model, u) : 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double v = face_velocity(model, u, state.grid.face(j));
    flux[j] = v > 0.0 ? v * state.f[j - 1] : v * state.f[j];
  }
  const double v_right = face_velocity(model, u, state.grid.x_max);
  flux[n] = v_right > 0.0 ? v_right * state.f[n - 1] : 0.0;
  return flux;
}

double cfl_dt(const SimState& state, const RateModel& model, double safety, double remaining) {
  const double u = monomer(state);
  double vmax = 0.0;
  for (std::size_t j = 0; j <= state.grid.n_cells; ++j) {
    vmax = std::max(vmax, std::abs(face_velocity(model, u, state.grid.face(j))));
  }
  if (vmax == 0.0) return remaining;
  return std::min(safety * state.grid.dx() / vmax, remaining);
}

UpwindStepper::UpwindStepper(const Grid& grid, const RateModel& model)
    : grid_(grid),
      model_(model),
      phi0_(model.phi0()),
      a_face_(grid.n_cells + 1),
      b_face_(grid.n_cells + 1),
      x_(grid.n_cells),
      flux_(grid.n_cells + 1),
      next_(grid.n_cells) {
  for (std::size_t j = 0; j <= grid.n_cells; ++j) {
    const double x = j == grid.n_cells ? grid.x_max : grid.face(j);
    a_face_[j] = eval_a(model, x);
    b_face_[j] = eval_b(model, x);
  }
  for (std::size_t i = 0; i < grid.n_cells; ++i) x_[i] = grid.center(i);
}

double UpwindStepper::max_speed(double u) const {
  double vmax = 0.0;
  for (std::size_t j = 0; j < a_face_.size(); ++j) vmax = std::max(vmax, std::abs(a_face_[j] * u - b_face_[j]));
  return vmax;
}

StepBudget UpwindStepper::advance(SimState& state, double dt) { return advance(state, dt, monomer(state)); }

StepBudget UpwindStepper::advance(SimState& state, double dt, double u) {
  const std::size_t n = grid_.n_cells;
  const double dx = grid_.dx();
  const double lambda = dt / dx;
  if (u < 0.0) throw MonomerUnderflowError(u, state.t);

  const std::vector<double>& f = state.f;
  flux_[0] = u > phi0_ ? eval_nucleation(model_, u) : 0.0;
  CompensatedSum interior;
  for (std::size_t j = 1; j < n; ++j) {
    const double v = a_face_[j] * u - b_face_[j];
    const double flux = v > 0.0 ? v * f[j - 1] : v * f[j];
    flux_[j] = flux;
    interior.add(flux);
  }
  const double v_right = a_face_[n] * u - b_face_[n];
  flux_[n] = v_right > 0.0 ? v_right * f[n - 1] : 0.0;

  CompensatedSum m1;
  for (std::size_t i = 0; i < n; ++i) {
    double g = f[i] - lambda * (flux_[i + 1] - flux_[i]);
    if (g < 0.0) {
      // Cancellation in an exactly emptied cell; anything larger is a real violation.
      const double scale = f[i] + lambda * (std::abs(flux_[i]) + std::abs(flux_[i + 1]));
      const double tol = 8.0 * std::numeric_limits<double>::epsilon() * scale + std::numeric_limits<double>::min();
      if (g < -tol) throw NegativeDensityError(i, g, state.t + dt);
      g = 0.0;
    }
    // Upwind smearing ahead of a front decays geometrically into subnormals,
    // which are orders of magnitude slower to compute with.
    if (g < kDensityFloor) g = 0.0;
    next_[i] = g;
    m1.add(x_[i] * g * dx);
  }

  StepBudget budget;
  budget.dt = dt;
  budget.u_before = u;
  budget.nucleation_flux = flux_[0];
  budget.monomer_change = -dt * (x_[0] * flux_[0] + dx * interior.value());
  budget.outflow_count = dt * flux_[n];
  budget.outflow_mass = dt * x_[n - 1] * flux_[n];

  const double u_after = state.rho - m1.value() - (state.outflow_mass + budget.outflow_mass);
  if (u_after < 0.0) throw MonomerUnderflowError(u_after, state.t + dt);
  budget.u_after = u_after;

  state.f.swap(next_);
  state.t += dt;
  state.outflow_mass += budget.outflow_mass;
  state.outflow_count += budget.outflow_count;
  return budget;
}

SimState step(const SimState& state, const RateModel& model, double dt, StepBudget* budget) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  SimState next = state;
  UpwindStepper stepper(state.grid, model);
  const StepBudget b = stepper.advance(next, dt);
  if (budget) *budget = b;
  return next;
}

RunResult run(const SimState& initial, const RateModel& model, const SolverConfig& cfg,
              const DiagnosticsOptions& diagnostics) {
  cfg.validate();
  RunResult result;
  SeriesRecorder recorder(initial.grid, model, diagnostics);
  result.series = recorder.make_series();

  SimState state = initial;
  UpwindStepper stepper(state.grid, model);

  // Snapshot targets: every requested sample time in (t0, t_end], then t_end.
  std::vector<double> targets;
  for (double s : cfg.sample_times) {
    if (s > state.t) targets.push_back(s);
  }
  if (targets.empty() || targets.back() < cfg.t_end) targets.push_back(cfg.t_end);

  double u = monomer(state);
  double budget_u = u;
  auto budget_residual = [&] { return budget_u + moment(state, 1.0) + state.outflow_mass - state.rho; };

  result.series.append(recorder.row(state, 0.0));
  result.snapshots.push_back(state);

  std::size_t target_index = 0;
  bool last_row_is_current = true;
  // With a fixed dt, time is anchor + k dt rather than a running sum, so the
  // step that reaches a target does not degenerate into a rounding sliver.
  double anchor = state.t;
  std::size_t since_anchor = 0;
  try {
    while (target_index < targets.size() && state.t < cfg.t_end) {
      const double target = targets[target_index];
      const double remaining = target - state.t;
      double dt = 0.0;
      if (cfg.dt) {
        dt = std::min(*cfg.dt, remaining);
      } else {
        const double vmax = stepper.max_speed(u);
        dt = vmax > 0.0 ? std::min(cfg.cfl_safety * state.grid.dx() / vmax, remaining) : remaining;
      }
      // Avoid a sliver step just before a target.
      bool hit = dt >= remaining * (1.0 - 1e-12);
      if (!hit && remaining - dt < 1e-9 * dt) {
        dt = remaining;
        hit = true;
      }

      const StepBudget b = stepper.advance(state, dt, u);
      u = b.u_after;
      ++since_anchor;
      if (hit) {
        state.t = target;
        anchor = target;
        since_anchor = 0;
      } else if (cfg.dt) {
        state.t = anchor + static_cast<double>(since_anchor) * *cfg.dt;
      }
      budget_u += b.monomer_change;
      ++result.steps;
      last_row_is_current = false;

      const bool final_step = hit && target_index + 1 == targets.size();
      if (result.steps % cfg.series_stride == 0 || final_step) {
        const double r = budget_residual();
        result.max_budget_residual = std::max(result.max_budget_residual, std::abs(r));
        result.series.append(recorder.row(state, r));
        last_row_is_current = true;
      }
      if (hit) {
        result.snapshots.push_back(state);
        ++target_index;
      }
    }
  } catch (const SolverError& e) {
    result.ok = false;
    result.failure = e.what();
    result.failure_time = state.t;
    if (!last_row_is_current) {
      result.series.append(recorder.row(state, budget_residual()));
    }
  }
  if (result.ok && !result.series.all_finite()) {
    result.ok = false;
    result.failure = "non-finite value in the diagnostic series";
    result.failure_time = state.t;
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace lsn
