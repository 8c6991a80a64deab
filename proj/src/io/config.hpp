#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotics.hpp"
#include "diagnostics.hpp"
#include "fv_solver.hpp"
#include "kinetics.hpp"
#include "state.hpp"

namespace lsn {

/// One of: zero, poly_bump (-c (x - r1)(x - r2))_+, or a two-column x,f table.
struct InitialCondition {
  enum class Kind { kZero, kPolyBump, kTable };
  Kind kind = Kind::kZero;
  double c = 2000.0;
  double r1 = 0.2;
  double r2 = 0.3;
  std::string path;  // table only, resolved to an absolute path on load

  static InitialCondition zero() { return {}; }
  static InitialCondition poly_bump(double c, double r1, double r2) { return {Kind::kPolyBump, c, r1, r2, {}}; }

  /// Short label used for sweep directory names.
  std::string label() const;
  bool operator==(const InitialCondition&) const = default;
};

/// Exact cell averages of the initial condition on `grid`.
std::vector<double> initial_cell_averages(const InitialCondition& ic, const Grid& grid);

struct OracleConfig {
  bool enabled = false;
  double dt = 1e-3;
  std::optional<double> t_end;       // defaults to the solver t_end
  std::size_t f_in_cells = 0;        // 0: sample f_in on the run grid
  std::size_t fbar_points = 400;
};

struct RunConfig {
  std::optional<std::string> preset;
  RateModel model;
  double rho = 1.0;
  InitialCondition initial;
  Grid grid{1.0, 1000};
  SolverConfig solver;
  DiagnosticsOptions diagnostics;
  FitWindow fit;
  OracleConfig oracle;
  /// Initial conditions for sweeps; empty means {zero, poly_bump(2000, 0.2, 0.3)}.
  std::vector<InitialCondition> sweep;
  std::string output = "out";

  void validate() const;
};

/// Raw JSON defaults of a named preset ("fig1", "fig1_bump").
nlohmann::json preset_json(const std::string& name);
std::vector<std::string> preset_names();

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Resolves presets, applies overrides and parses strictly (unknown keys are
/// rejected with their key path). Relative table paths resolve against `base_dir`.
RunConfig config_from_json(nlohmann::json doc, const std::vector<std::string>& overrides = {},
                           const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Fully resolved document; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const RunConfig& cfg);
nlohmann::json model_to_json(const RateModel& model);
RateModel model_from_json(const nlohmann::json& j, const std::string& where = "model");

SimState initial_state(const RunConfig& cfg);

}  // namespace lsn
