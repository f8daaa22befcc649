/* C API for the two-phase sampling bootstrap library.
 *
 * All functions return a tpb_status code; on failure a human-readable
 * message is available from tpb_last_error() (thread local). Objects are
 * opaque handles released with the matching _free function.
 */
#ifndef TWOPHASEBOOT_H
#define TWOPHASEBOOT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tpb_status {
  TPB_OK = 0,
  TPB_ERROR_INVALID_ARGUMENT = 1,
  TPB_ERROR_DATA = 2,
  TPB_ERROR_NUMERIC = 3,
  TPB_ERROR_IO = 4,
  TPB_ERROR_INTERNAL = 5
} tpb_status;

const char* tpb_version(void);
const char* tpb_status_name(int status);

/* Message describing the most recent failure on this thread. */
const char* tpb_last_error(void);

/* ---------------------------------------------------------------- samples */

typedef struct tpb_sample tpb_sample;

int tpb_sample_read_csv(const char* path, tpb_sample** out);
int tpb_sample_write_csv(const tpb_sample* sample, const char* path);
int tpb_sample_validate(const tpb_sample* sample);
void tpb_sample_free(tpb_sample* sample);

int tpb_sample_n_units(const tpb_sample* sample, int64_t* out);
int tpb_sample_n_strata(const tpb_sample* sample, int64_t* out);
int tpb_sample_n_sampled(const tpb_sample* sample, int64_t* out);
/* events = units with delta == 1 */
int tpb_sample_n_events(const tpb_sample* sample, int64_t* out);

/* ------------------------------------------------------------- simulation */

typedef struct tpb_sim_config {
  int64_t n;
  double theta;
  double lambda0;
  double cens_upper;
  double sensitivity;
  double specificity;
  double exposure_prev;
  double phase2_fraction;
  uint64_t seed;
} tpb_sim_config;

void tpb_sim_config_init(tpb_sim_config* config); /* fills the defaults */
int tpb_simulate(const tpb_sim_config* config, tpb_sample** out);

/* -------------------------------------------------------------------- fit */

typedef struct tpb_fit_result tpb_fit_result;

typedef struct tpb_fit_options {
  const char* calibration; /* "none", "c", "cc", "wcc" */
  const char* cal_columns; /* comma-separated, e.g. "y" */
  double cal_tol;
  double grad_tol;
  int max_iter;
} tpb_fit_options;

void tpb_fit_options_init(tpb_fit_options* options);
int tpb_cox_fit(const tpb_sample* sample, const tpb_fit_options* options, tpb_fit_result** out);
void tpb_fit_result_free(tpb_fit_result* result);

int tpb_fit_result_dim(const tpb_fit_result* result, int64_t* out);
int tpb_fit_result_theta(const tpb_fit_result* result, int64_t index, double* out);
int tpb_fit_result_se(const tpb_fit_result* result, int64_t index, double* out);
int tpb_fit_result_converged(const tpb_fit_result* result, int* out);
int tpb_fit_result_n_events(const tpb_fit_result* result, int64_t* out);
int tpb_fit_result_write_json(const tpb_fit_result* result, const char* path);

/* -------------------------------------------------------------- bootstrap */

typedef struct tpb_boot_result tpb_boot_result;

typedef struct tpb_boot_options {
  int64_t B;
  uint64_t seed;
  int workers;
  const char* estimator;        /* "cox", "ipw-mean" */
  const char* calibration;      /* "none", "c", "cc", "wcc" */
  const char* boot_calibration; /* "none", "bc", "bcc", "bsc", "bscc" */
  const char* cal_columns;      /* comma-separated */
  const char* panel_column;     /* ipw-mean estimator */
  double cal_tol;
  double max_failure_fraction;
  const char* weight_dump_path; /* optional replicate-weight CSV; NULL disables */
} tpb_boot_options;

void tpb_boot_options_init(tpb_boot_options* options);
int tpb_bootstrap(const tpb_sample* sample, const tpb_boot_options* options,
                  tpb_boot_result** out);
void tpb_boot_result_free(tpb_boot_result* result);

int tpb_boot_result_dim(const tpb_boot_result* result, int64_t* out);
int tpb_boot_result_failures(const tpb_boot_result* result, int64_t* out);
int tpb_boot_result_mean(const tpb_boot_result* result, int64_t index, double* out);
int tpb_boot_result_variance(const tpb_boot_result* result, int64_t row, int64_t col,
                             double* out);
int tpb_boot_result_center_plain(const tpb_boot_result* result, int64_t index, double* out);
/* returns TPB_ERROR_INVALID_ARGUMENT when the run was not calibrated */
int tpb_boot_result_center_calibrated(const tpb_boot_result* result, int64_t index, double* out);
int tpb_boot_result_write_summary_json(const tpb_boot_result* result, const char* path);
int tpb_boot_result_write_replicates_csv(const tpb_boot_result* result, const char* path);

/* ------------------------------------------------------------- validation */

typedef struct tpb_validate_options {
  int64_t covariance_replicates;
  int64_t pmf_draws;
  int64_t moment_draws;
  uint64_t seed;
} tpb_validate_options;

void tpb_validate_options_init(tpb_validate_options* options);
/* Runs the oracle-vs-Monte-Carlo suite; writes a JSON report when
 * report_path is non-NULL; *all_pass receives 1 or 0. */
int tpb_validate(const tpb_validate_options* options, const char* report_path, int* all_pass);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TWOPHASEBOOT_H */
