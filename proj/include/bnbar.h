/* C interface for count time series with feedback intensity dynamics.
 *
 * Every function returns a status code: 0 success, 1 bad input, 2 the
 * request was refused (for example simulating a specification that fails
 * its stationarity check), 3 numeric failure. On any nonzero return
 * bnbar_last_error() describes the problem; the string is thread local
 * and valid until the next library call on the same thread.
 *
 * Strings returned through char** out parameters are heap allocated and
 * must be released with bnbar_string_free. Handles must be released with
 * their matching *_free function; freeing NULL is a no-op.
 */

#ifndef BNBAR_H
#define BNBAR_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bnbar_model bnbar_model;
typedef struct bnbar_path bnbar_path;
typedef struct bnbar_fit bnbar_fit;
typedef struct bnbar_mc bnbar_mc;

const char* bnbar_version(void);
const char* bnbar_last_error(void);
void bnbar_string_free(char* s);

/* -------------------------------------------------------------------- */
/* model handles                                                        */

/* family is one of "bnb-ingarch", "bnb-gas", "nb-ingarch", "nb-gas";
 * alpha is ignored for the nb families */
int bnbar_model_new(const char* family, double r, double alpha, double omega,
                    double phi, double tau, bnbar_model** out);
void bnbar_model_free(bnbar_model* m);

/* log probability of count y under the observation distribution at
 * intensity lambda */
int bnbar_log_pmf(const bnbar_model* m, long long y, double lambda,
                  double* out);

/* smallest y with cdf(y) >= u, u in (0, 1) */
int bnbar_quantile(const bnbar_model* m, double u, double lambda,
                   long long* out);

/* derivative of the observation log density in log lambda */
int bnbar_score(const bnbar_model* m, long long y, double lambda, double* out);

/* strict and weak stationarity checks plus the implied long run level,
 * as a json document */
int bnbar_check_json(const bnbar_model* m, char** out);

/* -------------------------------------------------------------------- */
/* simulation                                                           */

int bnbar_simulate(const bnbar_model* m, long long n, long long burn_in,
                   unsigned long long seed, int allow_nonstationary,
                   bnbar_path** out);

int bnbar_path_length(const bnbar_path* p, long long* out);
int bnbar_path_clamp_hits(const bnbar_path* p, long long* out);

/* copy the n observations / intensities into a caller supplied buffer of
 * at least bnbar_path_length elements */
int bnbar_path_counts(const bnbar_path* p, long long* buf);
int bnbar_path_intensity(const bnbar_path* p, double* buf);

/* copy of the path with counts at the given positions replaced by
 * round(magnitude * mean of the counts); the intensity path is kept */
int bnbar_inject_outliers(const bnbar_path* p, const long long* positions,
                          const double* magnitudes, long long n_outliers,
                          bnbar_path** out);
void bnbar_path_free(bnbar_path* p);

/* -------------------------------------------------------------------- */
/* estimation                                                           */

typedef struct bnbar_fit_options {
  int restarts;                     /* jittered optimizer restarts */
  double tol;                       /* convergence tolerance */
  long long max_iter;               /* per optimizer run */
  unsigned long long jitter_seed;   /* restart jitter stream */
  int compute_se;                   /* 0 skips the curvature pass */
} bnbar_fit_options;

/* fills opts with the library defaults */
int bnbar_fit_options_default(bnbar_fit_options* opts);

/* maximum likelihood fit of the family to n counts; opts may be NULL for
 * the defaults */
int bnbar_fit_series(const char* family, const long long* y, long long n,
                     const bnbar_fit_options* opts, bnbar_fit** out);

/* full result as a json document */
int bnbar_fit_json(const bnbar_fit* f, char** out);

/* estimate / standard error looked up by parameter name: "r", "alpha",
 * "omega", "phi", "tau". Standard errors fail with status 2 when the
 * curvature at the optimum was unusable */
int bnbar_fit_param(const bnbar_fit* f, const char* name, double* out);
int bnbar_fit_se(const bnbar_fit* f, const char* name, double* out);

int bnbar_fit_loglik(const bnbar_fit* f, double* out);
int bnbar_fit_aic(const bnbar_fit* f, double* out);
/* implied long run level of the fitted dynamics */
int bnbar_fit_delta(const bnbar_fit* f, double* out);
/* 1 when the optimizer met its convergence criterion */
int bnbar_fit_converged(const bnbar_fit* f, int* out);

/* one step ahead fitted intensities, buffer of at least n elements */
int bnbar_fit_intensity(const bnbar_fit* f, double* buf);
void bnbar_fit_free(bnbar_fit* f);

/* -------------------------------------------------------------------- */
/* simulation study                                                     */

/* kappa is the natural parameter vector in the order r, alpha, omega,
 * phi, tau (alpha omitted for nb families, so n_kappa is 5 or 4) */
int bnbar_mc_run(const char* family, const double* kappa, long long n_kappa,
                 const long long* sample_sizes, long long n_sizes, int n_reps,
                 unsigned long long seed, int n_workers,
                 const bnbar_fit_options* opts, bnbar_mc** out);

/* columns T,parameter,truth,mean,sd,rmse */
int bnbar_mc_csv(const bnbar_mc* m, char** out);
int bnbar_mc_json(const bnbar_mc* m, char** out);
void bnbar_mc_free(bnbar_mc* m);

/* conditional score curves for a set of alphas plus the nb limit,
 * columns curve,y,score */
int bnbar_score_curve_csv(double lambda, double r, const double* alphas,
                          long long n_alphas, long long y_max, char** out);

#ifdef __cplusplus
}
#endif

#endif /* BNBAR_H */
