#ifndef LSN_LSN_H
#define LSN_LSN_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(LSN_BUILDING)
#    define LSN_API __declspec(dllexport)
#  else
#    define LSN_API __declspec(dllimport)
#  endif
#else
#  define LSN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 0, 2, 3 and 4 double as CLI exit codes. */
typedef enum lsn_status {
  LSN_OK = 0,
  LSN_ERR_CONFIG = 2,
  LSN_ERR_SOLVER = 3,
  LSN_ERR_FIT = 4,
  LSN_ERR_DOMAIN = 5,
  LSN_ERR_CONSTANT_PHI = 6,
  LSN_ERR_HYPOTHESIS = 7,
  LSN_ERR_SCHEMA = 8,
  LSN_ERR_IO = 9,
  LSN_ERR_ARGUMENT = 10,
  LSN_ERR_INTERNAL = 11
} lsn_status;

typedef struct lsn_config lsn_config;
typedef struct lsn_model lsn_model;
typedef struct lsn_sim lsn_sim;

typedef enum lsn_quantity {
  LSN_RATE_A = 0,          /* a(x) */
  LSN_RATE_B = 1,          /* b(x) */
  LSN_PHI = 2,             /* b(x) / a(x) */
  LSN_PHI_INVERSE = 3,     /* Phi^{-1}(y) */
  LSN_NUCLEATION = 4,      /* n(u) */
  LSN_A_PRIMITIVE = 5,     /* A(x) = int_0^x 1/a */
  LSN_A_INVERSE = 6,       /* A^{-1}(v) */
  LSN_PSI = 7              /* Psi(v) = int_0^v Phi^{-1} */
} lsn_quantity;

typedef enum lsn_refine_mode { LSN_REFINE_BOTH = 0, LSN_REFINE_DX = 1, LSN_REFINE_DT = 2 } lsn_refine_mode;

/* Message of the last failing call on this thread; never NULL. */
LSN_API const char* lsn_last_error(void);
LSN_API const char* lsn_version(void);
/* Frees strings returned through char** out-parameters. */
LSN_API void lsn_string_free(char* s);

/* Configuration. Overrides use dotted keys: "solver.t_end=200". */
LSN_API lsn_status lsn_config_load(const char* path, lsn_config** out);
LSN_API lsn_status lsn_config_from_json(const char* json_text, lsn_config** out);
LSN_API lsn_status lsn_config_from_preset(const char* name, lsn_config** out);
LSN_API lsn_status lsn_config_override(lsn_config* cfg, const char* assignment);
LSN_API lsn_status lsn_config_set_output(lsn_config* cfg, const char* dir);
LSN_API lsn_status lsn_config_to_json(const lsn_config* cfg, char** out_json);
LSN_API void lsn_config_free(lsn_config* cfg);

/* Rate models. */
LSN_API lsn_status lsn_model_create(double a_coef, double alpha, double b_coef, double beta, double n_coef, int i0,
                                    int shifted_nucleation, lsn_model** out);
LSN_API lsn_status lsn_model_from_config(const lsn_config* cfg, lsn_model** out);
LSN_API lsn_status lsn_model_eval(const lsn_model* model, lsn_quantity q, double x, double* out);
LSN_API lsn_status lsn_model_phi0(const lsn_model* model, double* out);
LSN_API lsn_status lsn_model_conjectured_exponents(const lsn_model* model, double* p_m0, double* p_u);
/* JSON hypothesis report. */
LSN_API lsn_status lsn_model_validate(const lsn_model* model, char** out_json);
LSN_API void lsn_model_free(lsn_model* model);

/* Simulation handles. density may be NULL for f = 0. */
LSN_API lsn_status lsn_sim_create(const lsn_model* model, double x_max, size_t n_cells, double rho,
                                  const double* density, lsn_sim** out);
LSN_API lsn_status lsn_sim_from_config(const lsn_config* cfg, lsn_sim** out);
/* dt <= 0 takes one CFL-controlled step with safety 0.9. */
LSN_API lsn_status lsn_sim_step(lsn_sim* sim, double dt);
LSN_API lsn_status lsn_sim_cfl_dt(const lsn_sim* sim, double safety, double* out);
LSN_API lsn_status lsn_sim_time(const lsn_sim* sim, double* out);
LSN_API lsn_status lsn_sim_monomer(const lsn_sim* sim, double* out);
LSN_API lsn_status lsn_sim_moment(const lsn_sim* sim, double k, double* out);
LSN_API lsn_status lsn_sim_outflow_mass(const lsn_sim* sim, double* out);
LSN_API size_t lsn_sim_size(const lsn_sim* sim);
/* Copies min(len, n_cells) cell averages. */
LSN_API lsn_status lsn_sim_density(const lsn_sim* sim, double* out, size_t len);
LSN_API void lsn_sim_free(lsn_sim* sim);

/* Orchestration. Each writes its artifacts under the configured output
 * directory and returns a JSON summary. assert_exponents makes a fitted
 * exponent outside tolerance return LSN_ERR_FIT; tolerance <= 0 picks the
 * resolution-dependent default. */
LSN_API lsn_status lsn_run_single(const lsn_config* cfg, int assert_exponents, double tolerance, char** out_json);
LSN_API lsn_status lsn_run_refinement(const lsn_config* cfg, size_t levels, lsn_refine_mode mode,
                                      int assert_exponents, double tolerance, char** out_json);
LSN_API lsn_status lsn_run_sweep(const lsn_config* cfg, int assert_exponents, double tolerance, char** out_json);
LSN_API lsn_status lsn_validate(const lsn_config* cfg, char** out_json);
/* Re-fits u and M0 of an existing timeseries.csv with the config's model and window. */
LSN_API lsn_status lsn_fit_series(const lsn_config* cfg, const char* series_csv, double tolerance, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
