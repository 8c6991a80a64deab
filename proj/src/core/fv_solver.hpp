#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "kinetics.hpp"
#include "series.hpp"
#include "state.hpp"

namespace lsn {

struct SolverConfig {
  std::optional<double> dt;  // empty: CFL-controlled step
  double cfl_safety = 0.9;
  double t_end = 1.0;
  std::vector<double> sample_times;
  std::size_t series_stride = 10;

  void validate() const;
};

class NegativeDensityError : public SolverError {
 public:
  NegativeDensityError(std::size_t cell, double value, double t);
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

class MonomerUnderflowError : public SolverError {
 public:
  MonomerUnderflowError(double u, double t);
};

/// Transport speed a(x) u - b(x).
double face_velocity(const RateModel& model, double u, double x);

/// Fluxes on the n_cells + 1 faces. Face 0 carries the nucleation flux
/// n(u) (only while u > phi0); the last face uses a zero ghost cell.
std::vector<double> upwind_fluxes(const SimState& state, const RateModel& model);

/// safety * dx / max_faces |v|, or `remaining` when every speed vanishes.
double cfl_dt(const SimState& state, const RateModel& model, double safety, double remaining);

/// Flux bookkeeping of one explicit step.
struct StepBudget {
  double dt = 0.0;
  double u_before = 0.0;
  double nucleation_flux = 0.0;
  double monomer_change = 0.0;  // -dt (x_0 F_0 + dx sum_interior F)
  double outflow_mass = 0.0;
  double outflow_count = 0.0;
  double u_after = 0.0;  // equals monomer() of the advanced state
};

/// Explicit Euler upwind stepper with rates cached on the faces.
class UpwindStepper {
 public:
  UpwindStepper(const Grid& grid, const RateModel& model);

  double max_speed(double u) const;

  /// Advances in place. On failure the state is left untouched.
  StepBudget advance(SimState& state, double dt);
  /// Same, with u = monomer(state) already known.
  StepBudget advance(SimState& state, double dt, double u);

 private:
  Grid grid_;
  RateModel model_;
  double phi0_;
  std::vector<double> a_face_;
  std::vector<double> b_face_;
  std::vector<double> x_;
  std::vector<double> flux_;
  std::vector<double> next_;
};

SimState step(const SimState& state, const RateModel& model, double dt, StepBudget* budget = nullptr);

struct RunResult {
  TimeSeries series;
  std::vector<SimState> snapshots;  // t = 0, each sample time, t_end
  bool ok = true;
  std::string failure;
  double failure_time = 0.0;
  std::size_t steps = 0;
  double max_budget_residual = 0.0;
  SimState final_state;
};

/// Integrates to cfg.t_end. Step failures end the run early with ok = false;
/// the partial series and snapshots are kept.
RunResult run(const SimState& initial, const RateModel& model, const SolverConfig& cfg,
              const DiagnosticsOptions& diagnostics = {});

}  // namespace lsn
