#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "asymptotics.hpp"
#include "csv.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"

namespace lsn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Runs fn(0..jobs-1) on a small pool; the first exception (by job index) is rethrown.
template <class Fn>
void parallel_for(std::size_t jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n = worker_count(jobs);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

json hypotheses_json(const RateModel& model) {
  const HypothesisReport report = validate_hypotheses(model);
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"id", c.id}, {"status", to_string(c.status)}, {"detail", c.detail}});
  }
  return {{"checks", checks}, {"all_pass", report.all_pass()}, {"constant_phi_regime", report.constant_phi_regime()}};
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_state_files(const fs::path& dir, const SimState& s, const DiagnosticsOptions& diag) {
  const std::string tag = time_tag(s.t);
  const Grid& g = s.grid;

  std::vector<double> x(g.n_cells);
  for (std::size_t i = 0; i < g.n_cells; ++i) x[i] = g.center(i);
  write_columns(dir / ("snapshot_" + tag + ".csv"), {"x", "f"}, {&x, &s.f});

  std::vector<double> faces(g.n_cells + 1);
  for (std::size_t j = 0; j <= g.n_cells; ++j) faces[j] = j == g.n_cells ? g.x_max : g.face(j);
  const std::vector<double> tail = tail_distribution(s);
  write_columns(dir / ("tail_" + tag + ".csv"), {"x", "F"}, {&faces, &tail});

  const std::vector<double> abscissa = profile_abscissa(diag.profile_x_min, diag.profile_x_max, diag.profile_points);
  const std::vector<double> profile = normalized_profile(s, abscissa, diag.profile_scaling);
  write_columns(dir / ("profile_" + tag + ".csv"), {"x", "Fnorm"}, {&abscissa, &profile});
}

InitialDensity oracle_initial_density(const RunConfig& cfg, const Grid& run_grid) {
  const Grid g = cfg.oracle.f_in_cells > 0 ? Grid(cfg.grid.x_max, cfg.oracle.f_in_cells) : run_grid;
  InitialDensity d;
  d.h = g.dx();
  d.values = initial_cell_averages(cfg.initial, g);
  return d;
}

OracleSolution solve_oracle(const RunConfig& cfg, const Grid& run_grid) {
  return solve_history(cfg.model, oracle_initial_density(cfg, run_grid), cfg.rho,
                       cfg.oracle.t_end.value_or(cfg.solver.t_end), cfg.oracle.dt);
}

/// Averages `fine` (n * factor cells) down to n cells.
std::vector<double> coarsen(const std::vector<double>& fine, std::size_t factor) {
  std::vector<double> out(fine.size() / factor, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < factor; ++k) s += fine[i * factor + k];
    out[i] = s / static_cast<double>(factor);
  }
  return out;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

SingleRun execute_with(const RunConfig& cfg, const OracleSolution* shared_oracle) {
  cfg.validate();
  const fs::path dir = cfg.output;
  fs::create_directories(dir);

  SingleRun out;
  out.config = cfg;
  const SimState initial = initial_state(cfg);
  out.result = run(initial, cfg.model, cfg.solver, cfg.diagnostics);
  const RunResult& r = out.result;

  write_series(dir / "timeseries.csv", r.series);
  for (const auto& snap : r.snapshots) write_state_files(dir, snap, cfg.diagnostics);

  out.fit = fit_report(r.series, cfg.model, cfg.fit, default_exponent_tolerance(cfg.grid));
  write_json(dir / "fit_report.json", out.fit);

  json info;
  info["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) {
    info["failure"] = r.failure;
    info["failure_time"] = r.failure_time;
  }
  info["steps"] = r.steps;
  info["t_final"] = r.final_state.t;
  info["u_final"] = monomer(r.final_state);
  info["M0_final"] = moment(r.final_state, 0.0);
  info["mass_concentration_final"] = mass_concentration(r.final_state, cfg.diagnostics.concentration_eps);
  info["max_budget_residual"] = r.max_budget_residual;
  info["outflow_mass"] = r.final_state.outflow_mass;
  info["outflow_count"] = r.final_state.outflow_count;
  info["metadata"] = {{"x_max", cfg.grid.x_max},
                      {"n_cells", cfg.grid.n_cells},
                      {"dx", cfg.grid.dx()},
                      {"dt", cfg.solver.dt ? json(*cfg.solver.dt) : json("auto")},
                      {"t_end", cfg.solver.t_end}};
  info["hypotheses"] = hypotheses_json(cfg.model);

  if (cfg.oracle.enabled) {
    try {
      out.oracle = shared_oracle ? *shared_oracle : solve_oracle(cfg, cfg.grid);
      const OracleSolution& sol = *out.oracle;
      write_columns(dir / "oracle.csv", {"t", "u", "gamma", "Ma"},
                    {&sol.times, &sol.u_hist, &sol.gamma_hist, &sol.ma_hist});
      const LimitDensity lim = limit_density(sol, limit_density_grid(sol, cfg.grid.x_max, cfg.oracle.fbar_points));
      write_columns(dir / "fbar.csv", {"x", "fbar"}, {&lim.x, &lim.fbar});

      json cmp = {{"gamma_bar", lim.gamma_bar},
                  {"x_c_bar", lim.x_c_bar},
                  {"extrapolation_residual", lim.extrapolation_residual},
                  {"unconverged_gap", lim.unconverged_gap},
                  {"limit_mass", lim.mass},
                  {"mass_defect", lim.mass_defect}};
      if (r.ok) {
        out.comparison = compare_with_fv(sol, cfg.model, r.series, r.final_state);
        cmp["u_sup_error"] = out.comparison->u_sup_error;
        cmp["density_l1_error"] = out.comparison->density_l1_error;
        cmp["compared_time"] = out.comparison->compared_time;
        cmp["exponential_bound_violations"] = out.comparison->exponential_bound_violations;
        cmp["samples"] = out.comparison->samples;
      }
      write_json(dir / "compare.json", cmp);
    } catch (const Error& e) {
      info["status"] = "failed";
      info["oracle_error"] = e.what();
    }
  }
  info["config"] = config_to_json(cfg);
  out.run_info = info;
  write_json(dir / "run.json", info);
  return out;
}

bool run_ok(const SingleRun& s) { return s.run_info.value("status", "") == "ok"; }

}  // namespace

double default_exponent_tolerance(const Grid& grid) { return grid.dx() <= 1e-4 * (1.0 + 1e-9) ? 0.05 : 0.08; }

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", t);
  return buf;
}

json fit_report(const TimeSeries& series, const RateModel& model, const FitWindow& window,
                std::optional<double> tolerance) {
  json report;
  if (model.constant_phi()) {
    report["regime"] = "constant_phi";
    report["note"] = "u - phi0 decays exponentially; no algebraic exponents are fitted";
    return report;
  }
  if (model.alpha > model.beta) {
    report["regime"] = "alpha_above_beta";
    report["note"] = "no conjectured exponents outside alpha < beta";
    return report;
  }
  const ConjecturedExponents conj = conjectured_exponents(model);
  const std::vector<double> t = series.column("t");

  auto one = [&](const std::vector<double>& y, std::optional<double> expected) {
    json e;
    try {
      const PowerLawFit fit = fit_power_law(t, y, window);
      e["exponent"] = fit.exponent;
      e["log_prefactor"] = fit.log_prefactor;
      e["window"] = {fit.t_lo, fit.t_hi};
      e["rms_residual"] = fit.rms_residual;
      e["n_points"] = fit.n_points;
      if (expected) {
        e["conjectured"] = *expected;
        e["abs_error"] = std::abs(fit.exponent - *expected);
        if (tolerance) {
          e["tolerance"] = *tolerance;
          e["pass"] = std::abs(fit.exponent - *expected) <= *tolerance;
        }
      }
    } catch (const FitError& err) {
      e["error"] = err.what();
      if (expected) e["pass"] = false;
    }
    return e;
  };

  report["u"] = one(series.column("u"), conj.u);
  report["M0"] = one(series.column("M0"), conj.m0);
  const ProductSeries prod = invariant_product(series, model, 1.0);
  report["u_M0_product"] = one(prod.value, std::nullopt);
  return report;
}

bool fit_report_passes(const json& report) {
  bool any = false;
  for (const char* key : {"u", "M0"}) {
    if (!report.contains(key)) continue;
    const json& e = report.at(key);
    if (!e.contains("pass") || !e.at("pass").get<bool>()) return false;
    any = true;
  }
  return any;
}

SingleRun execute(const RunConfig& cfg) { return execute_with(cfg, nullptr); }

Outcome run_single(const RunConfig& cfg, const RunOptions& options) {
  SingleRun s = execute(cfg);
  Outcome out;
  json fit = options.tolerance ? fit_report(s.result.series, cfg.model, cfg.fit, options.tolerance) : s.fit;
  if (options.tolerance) write_json(fs::path(cfg.output) / "fit_report.json", fit);
  out.summary = {{"output", cfg.output}, {"run", s.run_info}, {"fit", fit}};
  out.summary["run"].erase("config");
  if (!run_ok(s)) {
    out.status = ExitStatus::kSolver;
  } else if (options.assert_exponents && !fit_report_passes(fit)) {
    out.status = ExitStatus::kFit;
  }
  return out;
}

RefineMode parse_refine_mode(const std::string& text) {
  if (text == "both") return RefineMode::kBoth;
  if (text == "dx") return RefineMode::kDx;
  if (text == "dt") return RefineMode::kDt;
  throw ConfigError("refinement mode must be both | dx | dt");
}

Outcome run_refinement(const RunConfig& cfg, std::size_t levels, RefineMode mode, const RunOptions& options) {
  if (levels == 0 || levels > 12) throw ConfigError("refinement needs between 1 and 12 levels");
  if (mode == RefineMode::kDt && !cfg.solver.dt) {
    throw ConfigError("dt refinement needs an explicit solver.dt (not \"auto\")");
  }
  std::vector<RunConfig> cfgs(levels, cfg);
  for (std::size_t k = 0; k < levels; ++k) {
    const double factor = std::ldexp(1.0, static_cast<int>(k));
    if (mode != RefineMode::kDt) cfgs[k].grid = Grid(cfg.grid.x_max, cfg.grid.n_cells << k);
    if (mode != RefineMode::kDx && cfg.solver.dt) cfgs[k].solver.dt = *cfg.solver.dt / factor;
    cfgs[k].output = (fs::path(cfg.output) / ("level_" + std::to_string(k))).string();
    cfgs[k].validate();
  }
  fs::create_directories(cfg.output);

  std::optional<OracleSolution> oracle;
  if (cfg.oracle.enabled) oracle = solve_oracle(cfg, cfgs.back().grid);

  std::vector<SingleRun> runs(levels);
  parallel_for(levels, [&](std::size_t k) { runs[k] = execute_with(cfgs[k], oracle ? &*oracle : nullptr); });

  const SingleRun& finest = runs.back();
  std::vector<double> level, n_cells, dx, dt, steps, u_final, m0_final, budget, count_res, u_err, l1_err;
  bool all_ok = true;
  for (std::size_t k = 0; k < levels; ++k) {
    const SingleRun& s = runs[k];
    all_ok = all_ok && run_ok(s);
    const SimState& fs_state = s.result.final_state;
    level.push_back(static_cast<double>(k));
    n_cells.push_back(static_cast<double>(fs_state.grid.n_cells));
    dx.push_back(fs_state.grid.dx());
    const double mean_dt = s.result.steps ? fs_state.t / static_cast<double>(s.result.steps) : 0.0;
    dt.push_back(s.config.solver.dt.value_or(mean_dt));
    steps.push_back(static_cast<double>(s.result.steps));
    u_final.push_back(monomer(fs_state));
    m0_final.push_back(moment(fs_state, 0.0));
    budget.push_back(s.result.max_budget_residual);
    count_res.push_back(s.result.series.size() >= 2
                            ? moment_balance_residual(s.result.series, s.config.model, 0.0).max_abs()
                            : 0.0);
    if (s.comparison) {
      u_err.push_back(s.comparison->u_sup_error);
      l1_err.push_back(s.comparison->density_l1_error);
    } else {
      const SimState& ref = finest.result.final_state;
      u_err.push_back(std::abs(monomer(fs_state) - monomer(ref)));
      const std::size_t factor = ref.grid.n_cells / fs_state.grid.n_cells;
      const std::vector<double> ref_avg = coarsen(ref.f, std::max<std::size_t>(factor, 1));
      double l1 = 0.0;
      for (std::size_t i = 0; i < fs_state.f.size() && i < ref_avg.size(); ++i) {
        l1 += std::abs(fs_state.f[i] - ref_avg[i]) * fs_state.grid.dx();
      }
      l1_err.push_back(l1);
    }
  }
  write_columns(fs::path(cfg.output) / "convergence.csv",
                {"level", "n_cells", "dx", "dt", "steps", "u_final", "M0_final", "max_budget_residual",
                 "count_residual", "u_sup_error", "density_l1_error"},
                {&level, &n_cells, &dx, &dt, &steps, &u_final, &m0_final, &budget, &count_res, &u_err, &l1_err});

  Outcome out;
  out.summary = {{"output", cfg.output},
                 {"levels", levels},
                 {"reference", cfg.oracle.enabled ? "oracle" : "finest_level"},
                 {"count_residual", count_res},
                 {"u_sup_error", u_err},
                 {"density_l1_error", l1_err}};
  json fit = options.tolerance ? fit_report(finest.result.series, cfg.model, cfg.fit, options.tolerance) : finest.fit;
  out.summary["finest_fit"] = fit;
  if (!all_ok) {
    out.status = ExitStatus::kSolver;
  } else if (options.assert_exponents && !fit_report_passes(fit)) {
    out.status = ExitStatus::kFit;
  }
  return out;
}

Outcome run_sweep(const RunConfig& cfg, const RunOptions& options) {
  std::vector<InitialCondition> ics = cfg.sweep;
  if (ics.empty()) ics = {InitialCondition::zero(), InitialCondition::poly_bump(2000.0, 0.2, 0.3)};
  std::vector<RunConfig> cfgs(ics.size(), cfg);
  for (std::size_t k = 0; k < ics.size(); ++k) {
    cfgs[k].initial = ics[k];
    cfgs[k].sweep.clear();
    cfgs[k].output = (fs::path(cfg.output) / (std::to_string(k) + "_" + ics[k].label())).string();
    cfgs[k].validate();
  }
  fs::create_directories(cfg.output);

  std::vector<SingleRun> runs(ics.size());
  parallel_for(ics.size(), [&](std::size_t k) { runs[k] = execute(cfgs[k]); });

  const auto& diag = cfg.diagnostics;
  const std::vector<double> abscissa = profile_abscissa(diag.profile_x_min, diag.profile_x_max, diag.profile_points);
  json run_list = json::array();
  json distances = json::array();
  bool all_ok = true;
  bool fits_pass = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    all_ok = all_ok && run_ok(runs[k]);
    const json fit =
        options.tolerance ? fit_report(runs[k].result.series, cfg.model, cfg.fit, options.tolerance) : runs[k].fit;
    fits_pass = fits_pass && fit_report_passes(fit);
    run_list.push_back({{"initial_condition", ics[k].label()},
                        {"output", cfgs[k].output},
                        {"status", runs[k].run_info.value("status", "")}});
    if (k == 0) continue;
    const auto& a = runs[0].result.snapshots;
    const auto& b = runs[k].result.snapshots;
    for (std::size_t s = 0; s < std::min(a.size(), b.size()); ++s) {
      if (a[s].t != b[s].t) continue;
      const std::vector<double> pa = normalized_profile(a[s], abscissa, diag.profile_scaling);
      const std::vector<double> pb = normalized_profile(b[s], abscissa, diag.profile_scaling);
      double d = 0.0;
      for (std::size_t i = 0; i < pa.size(); ++i) d = std::max(d, std::abs(pa[i] - pb[i]));
      const double norm = sup_abs(pa);
      distances.push_back({{"run", k},
                           {"t", a[s].t},
                           {"sup_distance", d},
                           {"reference_sup", norm},
                           {"relative", norm > 0.0 ? d / norm : 0.0}});
    }
  }
  json sweep = {{"runs", run_list}, {"profile_distance", distances}};
  write_json(fs::path(cfg.output) / "sweep.json", sweep);

  Outcome out;
  out.summary = sweep;
  out.summary["output"] = cfg.output;
  if (!all_ok) {
    out.status = ExitStatus::kSolver;
  } else if (options.assert_exponents && !fits_pass) {
    out.status = ExitStatus::kFit;
  }
  return out;
}

json validate_report(const RunConfig& cfg) {
  json report;
  report["model"] = model_to_json(cfg.model);
  report["phi0"] = cfg.model.phi0();
  report["hypotheses"] = hypotheses_json(cfg.model);
  if (!cfg.model.constant_phi() && cfg.model.alpha < cfg.model.beta) {
    const ConjecturedExponents c = conjectured_exponents(cfg.model);
    report["conjectured"] = {{"M0", c.m0}, {"u", c.u}};
  }
  report["config"] = config_to_json(cfg);
  return report;
}

}  // namespace lsn
