/* C interface to the log-symmetric cure-rate library.
 *
 * Every call returns an lsc_status; on failure lsc_last_error() describes the
 * problem for the calling thread. Strings handed out through char** must be
 * released with lsc_string_free, handles with their matching *_free. */
#ifndef LOGSYMCURE_H
#define LOGSYMCURE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define LSC_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define LSC_API __attribute__((visibility("default")))
#else
#  define LSC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsc_status {
  LSC_OK = 0,
  LSC_ERROR_ARGUMENT = 1, /* bad option, unknown family, parameter out of range */
  LSC_ERROR_INPUT = 2,    /* malformed or invalid data */
  LSC_ERROR_FIT = 3,      /* every optimizer start failed */
  LSC_ERROR_INTERNAL = 4
} lsc_status;

typedef struct lsc_table lsc_table;
typedef struct lsc_fit lsc_fit;

typedef struct lsc_model {
  const char* incidence; /* "bernoulli", "poisson", "geometric" */
  const char* latency;   /* "lognormal", "logt", "bs", "loglog1", "loglog2", "lpe", "weibull" */
  const char* link;      /* NULL for the incidence default, or "logistic" / "log" */
  double extra;          /* nu, alpha or k; read only when has_extra != 0 */
  int has_extra;
} lsc_model;

typedef struct lsc_fit_options {
  int max_iterations;
  double gradient_tolerance;
  double step_tolerance;
  int n_starts;
  uint64_t seed;
  int threads; /* 0 = hardware concurrency */
} lsc_fit_options;

LSC_API const char* lsc_version(void);
LSC_API const char* lsc_last_error(void);
LSC_API void lsc_string_free(char* s);
LSC_API void lsc_fit_options_init(lsc_fit_options* options);

/* Tables hold a numeric CSV with at least "time" and "status" columns. */
LSC_API lsc_status lsc_table_read_csv(const char* path, lsc_table** out);
LSC_API lsc_status lsc_table_parse_csv(const char* text, lsc_table** out);
/* The 263-row synthetic leprosy-like cohort. */
LSC_API lsc_status lsc_table_demo(uint64_t seed, lsc_table** out);
/* comment may hold several lines separated by '\n'; each becomes a '# ' line. */
LSC_API lsc_status lsc_table_write_csv(const lsc_table* table, const char* path, const char* comment);
LSC_API size_t lsc_table_rows(const lsc_table* table);
/* {"columns": [...], "n": .., "events": .., "censored_fraction": ..}; validates the data. */
LSC_API lsc_status lsc_table_describe(const lsc_table* table, char** json);
LSC_API void lsc_table_free(lsc_table* table);

/* covariates: NULL for every non time/status column, "none", or "a,b,c". */
LSC_API lsc_status lsc_fit_model(const lsc_table* table, const char* covariates, const lsc_model* model,
                                 const lsc_fit_options* options, lsc_fit** out);
LSC_API lsc_status lsc_fit_to_json(const lsc_fit* fit, char** json);
LSC_API lsc_status lsc_fit_from_json(const char* json, lsc_fit** out);
LSC_API lsc_status lsc_fit_loglik(const lsc_fit* fit, double* out);
/* x includes the leading 1 for the intercept. */
LSC_API lsc_status lsc_fit_cure_fraction(const lsc_fit* fit, const double* x, size_t length, double* out);
LSC_API lsc_status lsc_lr_test(const lsc_fit* full, const lsc_fit* reduced, double* statistic, int* df,
                               double* p_value);
LSC_API void lsc_fit_free(lsc_fit* fit);
/* Cure fraction for every distinct covariate profile present in the table
 * when all fit covariates are 0/1 indicators; an intercept-only fit yields a
 * single profile. JSON array of {profile, size, cure_fraction}; empty when
 * some covariate is not an indicator. */
LSC_API lsc_status lsc_cure_profiles(const lsc_table* table, const lsc_fit* fit, char** json);

/* Candidate grids as JSON arrays of {"incidence","link","latency","extra"}. */
LSC_API lsc_status lsc_grid_builtin(const char* name, char** json);
/* One candidate per line: incidence,latency[,extra]; '#' lines ignored. */
LSC_API lsc_status lsc_grid_parse(const char* text, char** json);
/* criterion: "aic" or "bic". Returns the ranked rows. */
LSC_API lsc_status lsc_select(const lsc_table* table, const char* covariates, const char* grid_json,
                              const char* criterion, const lsc_fit_options* options, char** json);

/* by: NULL or a column name. overlay: NULL or a fit whose covariates exist in
 * the table; adds the averaged fitted population survival per curve. */
LSC_API lsc_status lsc_km(const lsc_table* table, const char* by, const lsc_fit* overlay, char** json);

/* config_json keys: n, incidence, link, latency, extra, eta, phi, beta (or cf
 * = 10/30 for the reference coefficients), cp as a fraction,
 * replicates, seed, design, n_starts. Returns {"censor_bound", "summary", "records"}. */
LSC_API lsc_status lsc_simulate(const char* config_json, int threads, char** json);

#ifdef __cplusplus
}
#endif

#endif
