#include "lsn/lsn.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "fv_solver.hpp"
#include "runner.hpp"

struct lsn_config {
  lsn::RunConfig cfg;
  nlohmann::json doc;  // unresolved document, so overrides compose with presets
  std::filesystem::path base_dir;
};

struct lsn_model {
  lsn::RateModel model;
};

struct lsn_sim {
  lsn::RateModel model;
  lsn::SimState state;
  lsn::UpwindStepper stepper;
};

namespace {

thread_local std::string g_last_error;

lsn_status fail(lsn_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

lsn_status from_code(lsn::ErrorCode c) {
  switch (c) {
    case lsn::ErrorCode::kConfig: return LSN_ERR_CONFIG;
    case lsn::ErrorCode::kSolver: return LSN_ERR_SOLVER;
    case lsn::ErrorCode::kFit: return LSN_ERR_FIT;
    case lsn::ErrorCode::kDomain: return LSN_ERR_DOMAIN;
    case lsn::ErrorCode::kConstantPhi: return LSN_ERR_CONSTANT_PHI;
    case lsn::ErrorCode::kHypothesis: return LSN_ERR_HYPOTHESIS;
    case lsn::ErrorCode::kSchema: return LSN_ERR_SCHEMA;
    case lsn::ErrorCode::kIo: return LSN_ERR_IO;
  }
  return LSN_ERR_INTERNAL;
}

template <class Fn>
lsn_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const lsn::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LSN_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(LSN_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LSN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LSN_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lsn_status emit(const nlohmann::json& j, char** out) {
  if (out) *out = dup_string(j.dump(2));
  return LSN_OK;
}

lsn_status from_exit(lsn::ExitStatus s, const nlohmann::json& summary) {
  switch (s) {
    case lsn::ExitStatus::kOk: return LSN_OK;
    case lsn::ExitStatus::kConfig: return fail(LSN_ERR_CONFIG, "configuration error");
    case lsn::ExitStatus::kSolver: return fail(LSN_ERR_SOLVER, "solver failure (see run.json)");
    case lsn::ExitStatus::kFit: return fail(LSN_ERR_FIT, "fitted exponents outside tolerance");
  }
  (void)summary;
  return LSN_ERR_INTERNAL;
}

lsn::RunOptions options(int assert_exponents, double tolerance) {
  lsn::RunOptions o;
  o.assert_exponents = assert_exponents != 0;
  if (tolerance > 0.0) o.tolerance = tolerance;
  return o;
}

#define LSN_REQUIRE(cond, what)                            \
  do {                                                     \
    if (!(cond)) return fail(LSN_ERR_ARGUMENT, what);      \
  } while (0)

}  // namespace

extern "C" {

const char* lsn_last_error(void) { return g_last_error.c_str(); }

const char* lsn_version(void) { return "1.0.0"; }

void lsn_string_free(char* s) { std::free(s); }

lsn_status lsn_config_load(const char* path, lsn_config** out) {
  LSN_REQUIRE(path && out, "lsn_config_load: null argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw lsn::ConfigError(std::string("cannot open config file ") + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw lsn::ConfigError(std::string(path) + ": not valid JSON");
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto* h = new lsn_config{lsn::config_from_json(doc, {}, base), doc, base};
    *out = h;
    return LSN_OK;
  });
}

lsn_status lsn_config_from_json(const char* json_text, lsn_config** out) {
  LSN_REQUIRE(json_text && out, "lsn_config_from_json: null argument");
  return guarded([&] {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) throw lsn::ConfigError("config text is not valid JSON");
    *out = new lsn_config{lsn::config_from_json(doc), doc, {}};
    return LSN_OK;
  });
}

lsn_status lsn_config_from_preset(const char* name, lsn_config** out) {
  LSN_REQUIRE(name && out, "lsn_config_from_preset: null argument");
  return guarded([&] {
    nlohmann::json doc = {{"preset", name}};
    *out = new lsn_config{lsn::config_from_json(doc), doc, {}};
    return LSN_OK;
  });
}

lsn_status lsn_config_override(lsn_config* cfg, const char* assignment) {
  LSN_REQUIRE(cfg && assignment, "lsn_config_override: null argument");
  return guarded([&] {
    nlohmann::json doc = cfg->doc;
    lsn::apply_override(doc, assignment);
    cfg->cfg = lsn::config_from_json(doc, {}, cfg->base_dir);
    cfg->doc = std::move(doc);
    return LSN_OK;
  });
}

lsn_status lsn_config_set_output(lsn_config* cfg, const char* dir) {
  LSN_REQUIRE(cfg && dir && *dir, "lsn_config_set_output: null or empty argument");
  return guarded([&] {
    cfg->doc["output"] = dir;
    cfg->cfg.output = dir;
    return LSN_OK;
  });
}

lsn_status lsn_config_to_json(const lsn_config* cfg, char** out_json) {
  LSN_REQUIRE(cfg && out_json, "lsn_config_to_json: null argument");
  return guarded([&] { return emit(lsn::config_to_json(cfg->cfg), out_json); });
}

void lsn_config_free(lsn_config* cfg) { delete cfg; }

lsn_status lsn_model_create(double a_coef, double alpha, double b_coef, double beta, double n_coef, int i0,
                            int shifted_nucleation, lsn_model** out) {
  LSN_REQUIRE(out, "lsn_model_create: null argument");
  return guarded([&] {
    nlohmann::json j = {{"a_coef", a_coef}, {"alpha", alpha}, {"b_coef", b_coef},
                        {"beta", beta},     {"n_coef", n_coef}, {"i0", i0},
                        {"shifted_nucleation", shifted_nucleation != 0}};
    lsn::RateModel m = lsn::model_from_json(j);
    if (!(m.a_coef > 0.0 && m.b_coef > 0.0 && m.n_coef >= 0.0)) {
      throw lsn::ConfigError("model: need a_coef > 0, b_coef > 0, n_coef >= 0");
    }
    *out = new lsn_model{m};
    return LSN_OK;
  });
}

lsn_status lsn_model_from_config(const lsn_config* cfg, lsn_model** out) {
  LSN_REQUIRE(cfg && out, "lsn_model_from_config: null argument");
  return guarded([&] {
    *out = new lsn_model{cfg->cfg.model};
    return LSN_OK;
  });
}

lsn_status lsn_model_eval(const lsn_model* model, lsn_quantity q, double x, double* out) {
  LSN_REQUIRE(model && out, "lsn_model_eval: null argument");
  return guarded([&] {
    const lsn::RateModel& m = model->model;
    switch (q) {
      case LSN_RATE_A: *out = lsn::eval_a(m, x); break;
      case LSN_RATE_B: *out = lsn::eval_b(m, x); break;
      case LSN_PHI: *out = lsn::eval_phi(m, x); break;
      case LSN_PHI_INVERSE: *out = lsn::eval_phi_inverse(m, x); break;
      case LSN_NUCLEATION: *out = lsn::eval_nucleation(m, x); break;
      case LSN_A_PRIMITIVE: *out = lsn::antiderivative_A(m, x); break;
      case LSN_A_INVERSE: *out = lsn::antiderivative_A_inverse(m, x); break;
      case LSN_PSI: *out = lsn::antiderivative_Psi(m, x); break;
      default: return fail(LSN_ERR_ARGUMENT, "lsn_model_eval: unknown quantity");
    }
    return LSN_OK;
  });
}

lsn_status lsn_model_phi0(const lsn_model* model, double* out) {
  LSN_REQUIRE(model && out, "lsn_model_phi0: null argument");
  *out = model->model.phi0();
  return LSN_OK;
}

lsn_status lsn_model_conjectured_exponents(const lsn_model* model, double* p_m0, double* p_u) {
  LSN_REQUIRE(model && p_m0 && p_u, "lsn_model_conjectured_exponents: null argument");
  return guarded([&] {
    const lsn::ConjecturedExponents c = lsn::conjectured_exponents(model->model);
    *p_m0 = c.m0;
    *p_u = c.u;
    return LSN_OK;
  });
}

lsn_status lsn_model_validate(const lsn_model* model, char** out_json) {
  LSN_REQUIRE(model && out_json, "lsn_model_validate: null argument");
  return guarded([&] {
    lsn::RunConfig cfg;
    cfg.model = model->model;
    nlohmann::json r = lsn::validate_report(cfg);
    r.erase("config");
    return emit(r, out_json);
  });
}

void lsn_model_free(lsn_model* model) { delete model; }

lsn_status lsn_sim_create(const lsn_model* model, double x_max, size_t n_cells, double rho, const double* density,
                          lsn_sim** out) {
  LSN_REQUIRE(model && out, "lsn_sim_create: null argument");
  return guarded([&] {
    const lsn::Grid grid(x_max, n_cells);
    std::vector<double> f(n_cells, 0.0);
    if (density) f.assign(density, density + n_cells);
    lsn::SimState state(grid, std::move(f), rho, 0.0);
    *out = new lsn_sim{model->model, state, lsn::UpwindStepper(grid, model->model)};
    return LSN_OK;
  });
}

lsn_status lsn_sim_from_config(const lsn_config* cfg, lsn_sim** out) {
  LSN_REQUIRE(cfg && out, "lsn_sim_from_config: null argument");
  return guarded([&] {
    const lsn::RunConfig& c = cfg->cfg;
    *out = new lsn_sim{c.model, lsn::initial_state(c), lsn::UpwindStepper(c.grid, c.model)};
    return LSN_OK;
  });
}

lsn_status lsn_sim_step(lsn_sim* sim, double dt) {
  LSN_REQUIRE(sim, "lsn_sim_step: null argument");
  return guarded([&] {
    if (!(dt > 0.0)) {
      const double vmax = sim->stepper.max_speed(lsn::monomer(sim->state));
      if (vmax == 0.0) throw lsn::DomainError("lsn_sim_step: all speeds vanish; pass an explicit dt");
      dt = 0.9 * sim->state.grid.dx() / vmax;
    }
    sim->stepper.advance(sim->state, dt);
    return LSN_OK;
  });
}

lsn_status lsn_sim_cfl_dt(const lsn_sim* sim, double safety, double* out) {
  LSN_REQUIRE(sim && out, "lsn_sim_cfl_dt: null argument");
  LSN_REQUIRE(safety > 0.0 && safety <= 1.0, "lsn_sim_cfl_dt: safety must lie in (0, 1]");
  return guarded([&] {
    *out = lsn::cfl_dt(sim->state, sim->model, safety, HUGE_VAL);
    return LSN_OK;
  });
}

lsn_status lsn_sim_time(const lsn_sim* sim, double* out) {
  LSN_REQUIRE(sim && out, "lsn_sim_time: null argument");
  *out = sim->state.t;
  return LSN_OK;
}

lsn_status lsn_sim_monomer(const lsn_sim* sim, double* out) {
  LSN_REQUIRE(sim && out, "lsn_sim_monomer: null argument");
  *out = lsn::monomer(sim->state);
  return LSN_OK;
}

lsn_status lsn_sim_moment(const lsn_sim* sim, double k, double* out) {
  LSN_REQUIRE(sim && out, "lsn_sim_moment: null argument");
  return guarded([&] {
    *out = lsn::moment(sim->state, k);
    return LSN_OK;
  });
}

lsn_status lsn_sim_outflow_mass(const lsn_sim* sim, double* out) {
  LSN_REQUIRE(sim && out, "lsn_sim_outflow_mass: null argument");
  *out = sim->state.outflow_mass;
  return LSN_OK;
}

size_t lsn_sim_size(const lsn_sim* sim) { return sim ? sim->state.f.size() : 0; }

lsn_status lsn_sim_density(const lsn_sim* sim, double* out, size_t len) {
  LSN_REQUIRE(sim && (out || len == 0), "lsn_sim_density: null argument");
  const size_t n = std::min(len, sim->state.f.size());
  std::copy(sim->state.f.begin(), sim->state.f.begin() + static_cast<std::ptrdiff_t>(n), out);
  return LSN_OK;
}

void lsn_sim_free(lsn_sim* sim) { delete sim; }

lsn_status lsn_run_single(const lsn_config* cfg, int assert_exponents, double tolerance, char** out_json) {
  LSN_REQUIRE(cfg, "lsn_run_single: null argument");
  return guarded([&] {
    const lsn::Outcome o = lsn::run_single(cfg->cfg, options(assert_exponents, tolerance));
    emit(o.summary, out_json);
    return from_exit(o.status, o.summary);
  });
}

lsn_status lsn_run_refinement(const lsn_config* cfg, size_t levels, lsn_refine_mode mode, int assert_exponents,
                              double tolerance, char** out_json) {
  LSN_REQUIRE(cfg, "lsn_run_refinement: null argument");
  return guarded([&] {
    lsn::RefineMode m = lsn::RefineMode::kBoth;
    if (mode == LSN_REFINE_DX) m = lsn::RefineMode::kDx;
    if (mode == LSN_REFINE_DT) m = lsn::RefineMode::kDt;
    const lsn::Outcome o = lsn::run_refinement(cfg->cfg, levels, m, options(assert_exponents, tolerance));
    emit(o.summary, out_json);
    return from_exit(o.status, o.summary);
  });
}

lsn_status lsn_run_sweep(const lsn_config* cfg, int assert_exponents, double tolerance, char** out_json) {
  LSN_REQUIRE(cfg, "lsn_run_sweep: null argument");
  return guarded([&] {
    const lsn::Outcome o = lsn::run_sweep(cfg->cfg, options(assert_exponents, tolerance));
    emit(o.summary, out_json);
    return from_exit(o.status, o.summary);
  });
}

lsn_status lsn_validate(const lsn_config* cfg, char** out_json) {
  LSN_REQUIRE(cfg && out_json, "lsn_validate: null argument");
  return guarded([&] { return emit(lsn::validate_report(cfg->cfg), out_json); });
}

lsn_status lsn_fit_series(const lsn_config* cfg, const char* series_csv, double tolerance, char** out_json) {
  LSN_REQUIRE(cfg && series_csv && out_json, "lsn_fit_series: null argument");
  return guarded([&] {
    const lsn::TimeSeries series = lsn::read_series(series_csv);
    const double tol = tolerance > 0.0 ? tolerance : lsn::default_exponent_tolerance(cfg->cfg.grid);
    const nlohmann::json report = lsn::fit_report(series, cfg->cfg.model, cfg->cfg.fit, tol);
    emit(report, out_json);
    if (!cfg->cfg.model.constant_phi() && !lsn::fit_report_passes(report)) {
      return fail(LSN_ERR_FIT, "fitted exponents outside tolerance");
    }
    return LSN_OK;
  });
}

}  // extern "C"
