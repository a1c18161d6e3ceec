/* C interface to the sibling-survival estimation library.
 *
 * All functions return a sibsurv_status; on failure, a thread-local message
 * is available through sibsurv_last_error(). Objects returned through out
 * parameters are owned by the caller and released with the matching _free
 * function. Passing NULL for any out parameter is an error.
 */
#ifndef SIBSURV_H
#define SIBSURV_H

#include <stddef.h>

#if defined(_WIN32)
#define SIBSURV_API __declspec(dllexport)
#else
#define SIBSURV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sibsurv_status {
  SIBSURV_OK = 0,
  SIBSURV_ERR_IO = 1,
  SIBSURV_ERR_PARSE = 2,
  SIBSURV_ERR_VALIDATION = 3,   /* row-level input violations */
  SIBSURV_ERR_ZERO_EXPOSURE = 4,
  SIBSURV_ERR_OVERLAPPING_CELLS = 5,
  SIBSURV_ERR_SINGLETON_STRATUM = 6,
  SIBSURV_ERR_BAD_ARGUMENT = 7,
  SIBSURV_ERR_INTERNAL = 8
} sibsurv_status;

typedef struct sibsurv_dataset sibsurv_dataset;
typedef struct sibsurv_table sibsurv_table;

SIBSURV_API const char* sibsurv_version(void);

/* Message describing the most recent failure on this thread. */
SIBSURV_API const char* sibsurv_last_error(void);

/* --------------------------------------------------------------------- */
/* Datasets                                                               */
/* --------------------------------------------------------------------- */

/* frame_spec examples: "f15-49" (females 15-49), "m15-59", "fm15-49". */
SIBSURV_API sibsurv_status sibsurv_dataset_load(const char* respondents_csv,
                                                const char* siblings_csv,
                                                const char* frame_spec,
                                                sibsurv_dataset** out);
SIBSURV_API void sibsurv_dataset_free(sibsurv_dataset* ds);

SIBSURV_API long sibsurv_dataset_n_respondents(const sibsurv_dataset* ds);
SIBSURV_API long sibsurv_dataset_n_siblings(const sibsurv_dataset* ds);

/* --------------------------------------------------------------------- */
/* Estimation                                                             */
/* --------------------------------------------------------------------- */

typedef struct sibsurv_estimate_opts {
  /* Comma list of agg_excl, agg_incl, ind_excl, ind_incl. NULL for the
   * default "agg_excl,ind_excl". */
  const char* estimators;
  /* Cell spec, e.g. "5y" or "10y:15-54". NULL for "5y" over the frame. */
  const char* cells;
  /* window_years > 0 selects a per-respondent window of that many years
   * before the interview; otherwise the absolute CMC window below is used. */
  int window_years;
  int window_start_cmc;
  int window_end_cmc;
  /* "person-years" (default when NULL) or "headcount". */
  const char* exposure;
  /* 0 disables the bootstrap; otherwise the replicate count. */
  int bootstrap_reps;
  unsigned long long seed;
  /* Nonzero: cells with zero exposure get blank estimates instead of
   * failing with SIBSURV_ERR_ZERO_EXPOSURE. */
  int allow_empty;
  /* Optional debug dump paths; NULL to skip. */
  const char* tallies_out;
  const char* replicates_out;
} sibsurv_estimate_opts;

/* Fills *opts with defaults. */
SIBSURV_API void sibsurv_estimate_opts_init(sibsurv_estimate_opts* opts);

/* Table columns: cell,estimator,point,se,ci_lo,ci_hi,n_reports. */
SIBSURV_API sibsurv_status sibsurv_estimate(const sibsurv_dataset* ds,
                                            const sibsurv_estimate_opts* opts,
                                            sibsurv_table** out);

/* --------------------------------------------------------------------- */
/* Diagnostics                                                            */
/* --------------------------------------------------------------------- */

/* Internal-consistency checks; columns: age,delta,ci_lo,ci_hi. age_lo/hi
 * bound the single-year ages; bootstrap_reps 0 leaves the CI blank. */
SIBSURV_API sibsurv_status sibsurv_ic_checks(const sibsurv_dataset* ds,
                                             int age_lo, int age_hi,
                                             int bootstrap_reps,
                                             unsigned long long seed,
                                             sibsurv_table** out);

/* Invisibility report; columns: band,fraction. bands like "5y" or
 * "5y:15-49" (NULL for "5y" over the frame ages). */
SIBSURV_API sibsurv_status sibsurv_invisibility(const sibsurv_dataset* ds,
                                                const char* bands,
                                                sibsurv_table** out);

/* --------------------------------------------------------------------- */
/* Sensitivity surface                                                    */
/* --------------------------------------------------------------------- */

/* Grids are "lo:hi:step" (or a single value); param is "deaths" or
 * "exposure". Columns: K,p,rel_error. */
SIBSURV_API sibsurv_status sibsurv_sensitivity_surface(const char* k_grid,
                                                       const char* p_grid,
                                                       const char* param,
                                                       sibsurv_table** out);

/* --------------------------------------------------------------------- */
/* Simulation                                                             */
/* --------------------------------------------------------------------- */

/* Runs the scenario described by a flat key=value config file. On success
 * *results has columns tau_d,tau_n,f,rep,estimator,cell,estimate,truth and
 * *summary has tau_d,tau_n,f,estimator,cell,truth,rel_mse,rel_bias_sq,
 * rel_var. Either out pointer may be NULL to skip that table. */
SIBSURV_API sibsurv_status sibsurv_simulate(const char* config_path,
                                            sibsurv_table** results,
                                            sibsurv_table** summary);

/* --------------------------------------------------------------------- */
/* Tables                                                                 */
/* --------------------------------------------------------------------- */

SIBSURV_API long sibsurv_table_n_rows(const sibsurv_table* t);
SIBSURV_API long sibsurv_table_n_cols(const sibsurv_table* t);
SIBSURV_API const char* sibsurv_table_column_name(const sibsurv_table* t,
                                                  long col);

/* Copies the cell's text into buf (always NUL-terminated when buflen > 0)
 * and returns the full text length, snprintf style. Empty cells yield "". */
SIBSURV_API long sibsurv_table_cell(const sibsurv_table* t, long row, long col,
                                    char* buf, size_t buflen);

/* path NULL or "" writes to stdout. */
SIBSURV_API sibsurv_status sibsurv_table_write_csv(const sibsurv_table* t,
                                                   const char* path);
SIBSURV_API sibsurv_status sibsurv_table_write_json(const sibsurv_table* t,
                                                    const char* path);
SIBSURV_API void sibsurv_table_free(sibsurv_table* t);

#ifdef __cplusplus
}
#endif

#endif /* SIBSURV_H */
