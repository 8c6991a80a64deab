// Command-line front end over the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsn/lsn.h"

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--preset", c.preset, "named preset (fig1, fig1_bump, const_phi)");
  cmd->add_option("--override", c.overrides, "dotted key=value applied on top of the config")->allow_extra_args(false);
  cmd->add_option("--out", c.out, "output directory");
}

int exit_code(lsn_status s, bool fit_is_error) {
  switch (s) {
    case LSN_OK: return 0;
    case LSN_ERR_SOLVER:
    case LSN_ERR_INTERNAL: return 3;
    case LSN_ERR_FIT: return fit_is_error ? 4 : 0;
    default: return 2;
  }
}

int report(lsn_status s, char* json, bool fit_is_error) {
  if (json) {
    std::printf("%s\n", json);
    lsn_string_free(json);
  }
  if (s != LSN_OK && (s != LSN_ERR_FIT || fit_is_error)) std::fprintf(stderr, "error: %s\n", lsn_last_error());
  return exit_code(s, fit_is_error);
}

/// Builds the config handle; returns a nonzero exit code on failure.
int make_config(const Common& c, lsn_config** cfg) {
  lsn_status s = LSN_OK;
  if (!c.config.empty()) {
    s = lsn_config_load(c.config.c_str(), cfg);
    if (s == LSN_OK && !c.preset.empty()) s = lsn_config_override(*cfg, ("preset=" + c.preset).c_str());
  } else if (!c.preset.empty()) {
    s = lsn_config_from_preset(c.preset.c_str(), cfg);
  } else {
    s = lsn_config_from_json("{}", cfg);
  }
  for (const auto& o : c.overrides) {
    if (s != LSN_OK) break;
    s = lsn_config_override(*cfg, o.c_str());
  }
  if (s == LSN_OK && !c.out.empty()) s = lsn_config_set_output(*cfg, c.out.c_str());
  if (s != LSN_OK) {
    std::fprintf(stderr, "error: %s\n", lsn_last_error());
    lsn_config_free(*cfg);
    *cfg = nullptr;
    return exit_code(s, true);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifshitz-Slyozov simulator with nucleation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lsn_version()));

  Common run_opts, refine_opts, sweep_opts, validate_opts, fit_opts;
  bool assert_run = false, assert_refine = false, assert_sweep = false, assert_fit = false;
  double tol_run = 0.0, tol_refine = 0.0, tol_sweep = 0.0, tol_fit = 0.0;
  std::size_t levels = 3;
  std::string mode = "both";
  std::string series;

  auto* run = app.add_subcommand("run", "single simulation");
  add_common(run, run_opts);
  run->add_flag("--assert-exponents", assert_run, "exit 4 when fitted exponents miss the conjecture");
  run->add_option("--tolerance", tol_run, "exponent tolerance (default 0.05 at dx <= 1e-4, else 0.08)");

  auto* refine = app.add_subcommand("refine", "refinement study");
  add_common(refine, refine_opts);
  refine->add_option("--levels", levels, "number of levels")->check(CLI::Range(1, 12));
  refine->add_option("--mode", mode, "both | dx | dt")->check(CLI::IsMember({"both", "dx", "dt"}));
  refine->add_flag("--assert-exponents", assert_refine, "check exponents on the finest level");
  refine->add_option("--tolerance", tol_refine, "exponent tolerance");

  auto* sweep = app.add_subcommand("sweep", "one run per initial condition, with profile distances");
  add_common(sweep, sweep_opts);
  sweep->add_flag("--assert-exponents", assert_sweep, "check exponents of every run");
  sweep->add_option("--tolerance", tol_sweep, "exponent tolerance");

  auto* validate = app.add_subcommand("validate", "hypothesis report and resolved config");
  add_common(validate, validate_opts);

  auto* fit = app.add_subcommand("fit", "re-fit an existing timeseries.csv");
  add_common(fit, fit_opts);
  fit->add_option("--series", series, "timeseries.csv to fit")->required()->check(CLI::ExistingFile);
  fit->add_flag("--assert-exponents", assert_fit, "exit 4 when fitted exponents miss the conjecture");
  fit->add_option("--tolerance", tol_fit, "exponent tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Common& common = run->parsed()      ? run_opts
                         : refine->parsed()   ? refine_opts
                         : sweep->parsed()    ? sweep_opts
                         : validate->parsed() ? validate_opts
                                              : fit_opts;
  lsn_config* cfg = nullptr;
  if (const int rc = make_config(common, &cfg); rc != 0) return rc;

  char* json = nullptr;
  lsn_status st = LSN_OK;
  bool fit_is_error = false;
  if (run->parsed()) {
    st = lsn_run_single(cfg, assert_run, tol_run, &json);
    fit_is_error = assert_run;
  } else if (refine->parsed()) {
    const lsn_refine_mode m = mode == "dx" ? LSN_REFINE_DX : mode == "dt" ? LSN_REFINE_DT : LSN_REFINE_BOTH;
    st = lsn_run_refinement(cfg, levels, m, assert_refine, tol_refine, &json);
    fit_is_error = assert_refine;
  } else if (sweep->parsed()) {
    st = lsn_run_sweep(cfg, assert_sweep, tol_sweep, &json);
    fit_is_error = assert_sweep;
  } else if (validate->parsed()) {
    st = lsn_validate(cfg, &json);
  } else {
    st = lsn_fit_series(cfg, series.c_str(), tol_fit, &json);
    fit_is_error = assert_fit;
  }
  const int rc = report(st, json, fit_is_error);
  lsn_config_free(cfg);
  return rc;
}
