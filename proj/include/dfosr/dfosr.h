/* dfosr: dynamic function-on-scalars regression engine.
 *
 * C interface to the fitting, simulation-study and summary machinery.
 * All functions return a status code; on failure dfosr_last_error() gives a
 * thread-local message. Handles are opaque and must be released with the
 * matching _free function.
 */
#ifndef DFOSR_H
#define DFOSR_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dfosr_status {
  DFOSR_OK = 0,
  DFOSR_ERR_INVALID_ARGUMENT = 1,
  DFOSR_ERR_PARSE = 2,
  DFOSR_ERR_IO = 3,
  DFOSR_ERR_NUMERICAL = 4,
  DFOSR_ERR_INTERNAL = 5
} dfosr_status;

typedef enum dfosr_variant {
  DFOSR_VARIANT_HS = 0,   /* dynamic coefficients, nested horseshoe */
  DFOSR_VARIANT_NIG = 1,  /* dynamic coefficients, normal-inverse-gamma */
  DFOSR_VARIANT_FOSR_AR = 2 /* static coefficients, AR(1) errors */
} dfosr_variant;

typedef struct dfosr_dataset dfosr_dataset;
typedef struct dfosr_draws dfosr_draws;

typedef struct dfosr_fit_config {
  int32_t k;              /* number of factors */
  int64_t n_iter;
  int64_t burn_in;
  int64_t thin;
  int32_t variant;        /* dfosr_variant */
  int32_t sv_enabled;     /* stochastic volatility for the noise variance */
  int32_t stationary_phi; /* Beta(5,2) prior on (phi+1)/2 vs flat */
  uint64_t seed;
} dfosr_fit_config;

/* Last error message for the calling thread (empty string if none). */
const char* dfosr_last_error(void);

/* Fill a config with the default fit settings. */
void dfosr_fit_config_init(dfosr_fit_config* config);

/* Wide-format response CSV (first column a time label, remaining columns
 * named by observation point, empty cells missing) plus an optional T x p
 * predictor CSV with header. center_scale standardizes predictor columns. */
dfosr_status dfosr_dataset_load(const char* response_csv,
                                const char* predictor_csv_or_null,
                                int center_scale, dfosr_dataset** out);
dfosr_status dfosr_dataset_save(const dfosr_dataset* dataset,
                                const char* response_csv,
                                const char* predictor_csv_or_null);
dfosr_status dfosr_dataset_dims(const dfosr_dataset* dataset, int64_t* n_times,
                                int64_t* n_points, int64_t* n_predictors);
void dfosr_dataset_free(dfosr_dataset* dataset);

/* Run the Gibbs sampler; the returned handle owns the retained draws. */
dfosr_status dfosr_fit(const dfosr_dataset* dataset,
                       const dfosr_fit_config* config, dfosr_draws** out);

dfosr_status dfosr_draws_save(const dfosr_draws* draws, const char* path);
dfosr_status dfosr_draws_load(const char* path, dfosr_draws** out);
dfosr_status dfosr_draws_count(const dfosr_draws* draws, int64_t* n);

/* Write tidy CSV summaries (posterior means, pointwise and simultaneous
 * credible bands for regression surfaces, fitted curves, loading curves, the
 * noise-sd path, imputed cells) and a JSON run manifest into out_dir.
 * grid_points > M adds dense-grid fitted and loading summaries. */
dfosr_status dfosr_summarize(const dfosr_draws* draws, const char* out_dir,
                             double band_level, int64_t grid_points);
void dfosr_draws_free(dfosr_draws* draws);

/* Export the spline basis matrix, penalty and knots of a dataset's
 * observation grid as CSV files, for debugging. */
dfosr_status dfosr_export_basis(const dfosr_dataset* dataset,
                                const char* out_dir);

/* Paired simulation study on one of the section-5 designs:
 * "dynamic-small" (T=50, M=20), "dynamic-large" (T=200, M=100),
 * "static-small", "static-large". Each replicate shares its simulated data
 * across all methods; the metric table is written to out_csv. method_names
 * may be NULL, in which case variant names are used. */
dfosr_status dfosr_run_study(const char* design, int64_t n_reps, uint64_t seed,
                             const dfosr_fit_config* methods,
                             const char* const* method_names,
                             int64_t n_methods, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* DFOSR_H */
