#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "fv_solver.hpp"
#include "oracle.hpp"

namespace lsn {

/// Process exit codes shared by the CLI and the C API.
enum class ExitStatus : int { kOk = 0, kConfig = 2, kSolver = 3, kFit = 4 };

struct RunOptions {
  bool assert_exponents = false;
  /// Exponent tolerance; unset means 0.05 when dx <= 1e-4 and 0.08 otherwise.
  std::optional<double> tolerance;
};

struct Outcome {
  ExitStatus status = ExitStatus::kOk;
  nlohmann::json summary;
};

double default_exponent_tolerance(const Grid& grid);

/// Fit of u and M0 against the conjectured exponents. In the constant-Phi
/// regime the report only records that no algebraic rate applies.
nlohmann::json fit_report(const TimeSeries& series, const RateModel& model, const FitWindow& window,
                          std::optional<double> tolerance = std::nullopt);
/// True when every fitted exponent in the report is within tolerance.
bool fit_report_passes(const nlohmann::json& report);

/// File-name form of a time ("0.5", "400").
std::string time_tag(double t);

/// Everything a single run produces, kept in memory so callers can inspect
/// results without re-reading the files.
struct SingleRun {
  RunConfig config;
  RunResult result;
  std::optional<OracleSolution> oracle;
  std::optional<OracleComparison> comparison;
  nlohmann::json fit;
  nlohmann::json run_info;
};

/// Runs the solver (and oracle when enabled) and writes every artifact into
/// cfg.output.
SingleRun execute(const RunConfig& cfg);

Outcome run_single(const RunConfig& cfg, const RunOptions& options = {});

enum class RefineMode { kBoth, kDx, kDt };
RefineMode parse_refine_mode(const std::string& text);

/// Level k halves dx (and an explicit dt) k times; kDt halves only dt. Levels
/// run concurrently into <output>/level_<k>; convergence.csv collects errors
/// against the oracle when enabled, else against the finest level.
Outcome run_refinement(const RunConfig& cfg, std::size_t levels, RefineMode mode = RefineMode::kBoth,
                       const RunOptions& options = {});

/// One run per initial condition into <output>/<k>_<label>, plus sweep.json
/// with the normalized-profile distances to the first run at every common
/// snapshot time.
Outcome run_sweep(const RunConfig& cfg, const RunOptions& options = {});

/// Hypothesis report and resolved config, no simulation.
nlohmann::json validate_report(const RunConfig& cfg);

/// Worker count: LS_THREADS if set, else hardware concurrency, capped by jobs.
std::size_t worker_count(std::size_t jobs);

}  // namespace lsn
