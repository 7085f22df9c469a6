#ifndef DLCERT_H
#define DLCERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DLC_API __declspec(dllexport)
#else
#define DLC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dlc_status {
  DLC_OK = 0,
  DLC_E_NULL = 1,      /* required pointer argument was NULL */
  DLC_E_PARAMETER = 2, /* parameter outside its admissible range */
  DLC_E_INPUT = 3,     /* malformed numeric input */
  DLC_E_SPEC = 4,      /* malformed system spec (JSON) */
  DLC_E_MODEL = 5,     /* structurally invalid LMI problem */
  DLC_E_INSTANCE = 6,  /* numerical failure on this instance */
  DLC_E_UNSUPPORTED = 7,
  DLC_E_INTERNAL = 8
} dlc_status;

typedef enum dlc_kind { DLC_GAMMA = 0, DLC_POISSON = 1 } dlc_kind;

typedef enum dlc_condition {
  DLC_PROP1 = 1,
  DLC_PROP2 = 2,
  DLC_PROP3 = 3,
  DLC_REMARK7 = 7
} dlc_condition;

typedef enum dlc_verdict {
  DLC_FEASIBLE = 0,
  DLC_INFEASIBLE = 1,
  DLC_INDETERMINATE = 2
} dlc_verdict;

typedef struct dlc_system dlc_system;
typedef struct dlc_text dlc_text;

DLC_API const char *dlc_version(void);
/* Message of the last failed call on this thread; "" after a success. */
DLC_API const char *dlc_last_error(void);
DLC_API const char *dlc_status_string(dlc_status s);
DLC_API const char *dlc_verdict_string(dlc_verdict v);
DLC_API const char *dlc_condition_string(dlc_condition c);

/* CSV and other generated text. */
DLC_API const char *dlc_text_data(const dlc_text *t);
DLC_API size_t dlc_text_size(const dlc_text *t);
DLC_API void dlc_text_free(dlc_text *t);

/* Systems. Matrices are n*n, row-major. */
DLC_API dlc_status dlc_system_from_json(const char *json, dlc_system **out);
DLC_API dlc_status dlc_system_load(const char *path, dlc_system **out);
DLC_API dlc_status dlc_system_gamma(size_t n, const double *A, const double *A1, int N, double T,
                                    double h, dlc_system **out);
DLC_API dlc_status dlc_system_poisson(size_t n, const double *A, const double *A1,
                                      double lambda, int h, dlc_system **out);
DLC_API dlc_status dlc_system_clone(const dlc_system *s, dlc_system **out);
DLC_API void dlc_system_free(dlc_system *s);
DLC_API dlc_status dlc_system_to_json(const dlc_system *s, dlc_text **out);

typedef struct dlc_system_info {
  dlc_kind kind;
  size_t n;
  int N;          /* gamma shape */
  double scale;   /* T (gamma) or lambda (Poisson) */
  double h;
  size_t equilibria; /* dim ker(A+A1), or ker(A+A1-I) for Poisson */
  int quotient;      /* 1 if the equilibria can be factored out (gamma) */
} dlc_system_info;

DLC_API dlc_status dlc_system_info_get(const dlc_system *s, dlc_system_info *out);
/* Pointer valid while s lives; "" when unlabelled. */
DLC_API const char *dlc_system_label(const dlc_system *s);
DLC_API dlc_status dlc_system_set_scale(dlc_system *s, double scale);
/* Poisson gaps must be integral. */
DLC_API dlc_status dlc_system_set_gap(dlc_system *s, double h);
/* Writes the eigenvalues of A (which=0) or A+A1 (which=1), real and imaginary
   parts, each of length n. */
DLC_API dlc_status dlc_system_eigenvalues(const dlc_system *s, int which, double *re,
                                          double *im);

typedef struct dlc_options {
  double margin_tol;
  double gap_tol;
  int max_iters;
  int stop_when_decided;
  /* Remove constant solutions before building the LMIs: quotient for gamma
     systems, kernel-restricted block for Poisson systems. */
  int reduce;
} dlc_options;

DLC_API void dlc_options_default(dlc_options *o);

typedef struct dlc_certificate {
  dlc_verdict verdict;
  double margin;
  double upper_bound;
  size_t variables;
  size_t state_dim; /* dimension the LMI was built on */
  int reduced;
  int iterations;
  double seconds;
} dlc_certificate;

/* opts may be NULL for defaults. */
DLC_API dlc_status dlc_certify(const dlc_system *s, dlc_condition c, const dlc_options *opts,
                               dlc_certificate *out);

typedef struct dlc_max_scale_result {
  int found;
  double T_max;
  int monotone;
  int solves;
} dlc_max_scale_result;

/* Gamma only: largest T in [T_lo, T_hi] certified at gap h, to tol. */
DLC_API dlc_status dlc_max_scale(const dlc_system *s, dlc_condition c, double h, double T_lo,
                                 double T_hi, double tol, const dlc_options *opts,
                                 dlc_max_scale_result *out);

/* Gamma only. CSV `T,h,prop,verdict,margin`, h-major. */
DLC_API dlc_status dlc_region_csv(const dlc_system *s, dlc_condition c, const double *T_grid,
                                  size_t nT, const double *h_grid, size_t nh,
                                  const dlc_options *opts, dlc_text **out,
                                  size_t *feasible_cells);

/* Poisson only. CSV `lambda,h,variant,verdict,margin`, condition-major. */
DLC_API dlc_status dlc_lambda_scan_csv(const dlc_system *s, const dlc_condition *conds,
                                       size_t nconds, const double *grid, size_t ngrid, int h,
                                       const dlc_options *opts, dlc_text **out,
                                       size_t *feasible_points);

/* CSV `theorem,seed,lhs,rhs_jensen,rhs_extra,gap`. theorems: comma-separated
   names (lemma1,thm1,cor1,thm2,cor2,lemma2_eq19,lemma2_eq20,thm3,cor3) or
   NULL for all. */
DLC_API dlc_status dlc_verify_inequalities_csv(size_t trials, uint64_t seed, double rel_tol,
                                               const char *theorems, dlc_text **out,
                                               size_t *rows, size_t *violations);

typedef struct dlc_sim_options {
  double dt;       /* gamma; 0 picks min(0.005, T/20) */
  double horizon;  /* gamma time units */
  int steps;       /* Poisson steps */
  double tail_eps; /* 0 picks 1e-10 (gamma) / 1e-12 (Poisson) */
  int record_every;
  /* Project phi so that the conserved quantity of the equilibria is zero. */
  int zero_conserved;
  double decay_ratio;
} dlc_sim_options;

DLC_API void dlc_sim_options_default(dlc_sim_options *o);

typedef struct dlc_sim_summary {
  int decayed;
  double initial_norm;
  double final_norm;
  size_t samples;
  int warnings;
  char first_warning[160];
} dlc_sim_summary;

/* Trajectory CSV `t,x1..xn,norm` (gamma) or `k,x1..xn,norm` (Poisson). phi
   has length n. out and summary may each be NULL. */
DLC_API dlc_status dlc_simulate_csv(const dlc_system *s, const double *phi,
                                    const dlc_sim_options *opts, dlc_text **out,
                                    dlc_sim_summary *summary);

#ifdef __cplusplus
}
#endif

#endif
