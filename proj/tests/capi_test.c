/* Exercises the C interface from C, linking only the shared library. */
#include "dlcert/dlcert.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                                     \
  do {                                                                                   \
    if (!(cond)) {                                                                       \
      fprintf(stderr, "%s:%d: expectation failed: %s (last error: %s)\n", __FILE__,      \
              __LINE__, #cond, dlc_last_error());                                        \
      ++failures;                                                                        \
    }                                                                                    \
  } while (0)

static const double kA[4] = {0, 0, 0, 0};
static const double kA1[4] = {-2, 2, 2, -2};
static const double kPA[4] = {-0.5, 0, 0, 1};
static const double kPA1[4] = {-0.5, 0.8, 0.5, -0.2};

static void test_errors(void) {
  dlc_system *s = NULL;
  EXPECT(dlc_system_gamma(2, kA, kA1, 1, 0.1, 0.0, &s) == DLC_E_PARAMETER);
  EXPECT(s == NULL);
  EXPECT(strlen(dlc_last_error()) > 0);
  EXPECT(dlc_system_gamma(2, NULL, kA1, 2, 0.1, 0.0, &s) == DLC_E_NULL);
  EXPECT(dlc_system_poisson(2, kPA, kPA1, -1.0, 0, &s) == DLC_E_PARAMETER);
  EXPECT(dlc_system_from_json("{\"A\": [[1]]", &s) == DLC_E_SPEC);
  EXPECT(dlc_system_load("/nonexistent.json", &s) == DLC_E_SPEC);
  EXPECT(dlc_certify(NULL, DLC_PROP1, NULL, NULL) == DLC_E_NULL);
  EXPECT(strcmp(dlc_status_string(DLC_OK), "ok") == 0);
  EXPECT(strcmp(dlc_verdict_string(DLC_FEASIBLE), "Feasible") == 0);
  EXPECT(strcmp(dlc_condition_string(DLC_REMARK7), "remark7") == 0);
  EXPECT(strlen(dlc_version()) > 0);
  dlc_system_free(NULL);
  dlc_text_free(NULL);
}

static void test_gamma(void) {
  dlc_system *s = NULL;
  dlc_system_info info;
  dlc_certificate cert;
  dlc_options o;
  dlc_max_scale_result ms;
  dlc_text *t = NULL;
  size_t cells = 0;
  double Tg[2] = {0.1, 0.5}, hg[1] = {0.01};
  double re[2], im[2];
  const dlc_condition cond3 = DLC_PROP3;

  EXPECT(dlc_system_gamma(2, kA, kA1, 2, 0.1, 0.01, &s) == DLC_OK);
  EXPECT(dlc_system_info_get(s, &info) == DLC_OK);
  EXPECT(info.kind == DLC_GAMMA && info.n == 2 && info.N == 2);
  EXPECT(info.equilibria == 1 && info.quotient == 1);
  EXPECT(dlc_system_eigenvalues(s, 1, re, im) == DLC_OK);
  EXPECT(fabs(fmin(re[0], re[1]) + 4.0) < 1e-12 && fabs(fmax(re[0], re[1])) < 1e-12);
  EXPECT(im[0] == 0.0 && im[1] == 0.0);

  EXPECT(dlc_certify(s, DLC_PROP1, NULL, &cert) == DLC_OK);
  EXPECT(cert.verdict == DLC_FEASIBLE && cert.margin > 0 && cert.reduced == 1);
  EXPECT(cert.state_dim == 1);

  dlc_options_default(&o);
  o.reduce = 0;
  EXPECT(dlc_certify(s, DLC_PROP1, &o, &cert) == DLC_OK);
  EXPECT(cert.verdict != DLC_FEASIBLE && cert.state_dim == 2);
  EXPECT(dlc_certify(s, DLC_PROP3, NULL, &cert) == DLC_E_PARAMETER);
  EXPECT(dlc_lambda_scan_csv(s, &cond3, 1, Tg, 1, 0, NULL, &t, &cells) == DLC_E_UNSUPPORTED);

  EXPECT(dlc_max_scale(s, DLC_PROP1, 1e-5, 1e-4, 1.0, 1e-3, NULL, &ms) == DLC_OK);
  EXPECT(ms.found && fabs(ms.T_max - 0.305) <= 0.01);

  EXPECT(dlc_region_csv(s, DLC_PROP1, Tg, 2, hg, 1, NULL, &t, &cells) == DLC_OK);
  EXPECT(cells == 1);
  EXPECT(strncmp(dlc_text_data(t), "T,h,prop,verdict,margin\n", 24) == 0);
  EXPECT(dlc_text_size(t) == strlen(dlc_text_data(t)));
  dlc_text_free(t);

  EXPECT(dlc_system_set_scale(s, -1.0) == DLC_E_PARAMETER);
  EXPECT(dlc_system_set_scale(s, 0.2) == DLC_OK);
  EXPECT(dlc_system_info_get(s, &info) == DLC_OK && info.scale == 0.2);
  dlc_system_free(s);
}

static void test_poisson(void) {
  dlc_system *s = NULL, *c = NULL;
  dlc_certificate cert;
  dlc_text *t = NULL;
  dlc_sim_options so;
  dlc_sim_summary sum;
  dlc_condition conds[2] = {DLC_PROP3, DLC_REMARK7};
  double grid[2] = {1.0, 3.0};
  double phi[2] = {1.0, -1.0};
  size_t feasible = 0;

  EXPECT(dlc_system_poisson(2, kPA, kPA1, 1.0, 0, &s) == DLC_OK);
  EXPECT(dlc_system_set_gap(s, 0.5) == DLC_E_PARAMETER);
  EXPECT(dlc_certify(s, DLC_PROP3, NULL, &cert) == DLC_OK);
  EXPECT(cert.verdict == DLC_FEASIBLE);
  EXPECT(cert.variables == 34);

  EXPECT(dlc_lambda_scan_csv(s, conds, 2, grid, 2, 0, NULL, &t, &feasible) == DLC_OK);
  EXPECT(feasible >= 1 && feasible <= 2);
  EXPECT(strncmp(dlc_text_data(t), "lambda,h,variant,verdict,margin\n", 32) == 0);
  dlc_text_free(t);

  EXPECT(dlc_system_clone(s, &c) == DLC_OK);
  EXPECT(dlc_system_to_json(c, &t) == DLC_OK);
  EXPECT(strstr(dlc_text_data(t), "poisson") != NULL);
  dlc_text_free(t);
  dlc_system_free(c);

  dlc_sim_options_default(&so);
  so.steps = 2000;
  EXPECT(dlc_simulate_csv(s, phi, &so, NULL, &sum) == DLC_OK);
  EXPECT(sum.decayed == 1 && sum.samples == 2001);
  so.zero_conserved = 0;
  EXPECT(dlc_simulate_csv(s, phi, &so, &t, &sum) == DLC_OK);
  EXPECT(sum.decayed == 0 && fabs(sum.final_norm - sqrt(0.12 * 0.12 + 0.3 * 0.3)) < 1e-6);
  EXPECT(strncmp(dlc_text_data(t), "k,x1,x2,norm\n", 13) == 0);
  dlc_text_free(t);
  dlc_system_free(s);
}

static void test_inequalities(void) {
  dlc_text *t = NULL;
  size_t rows = 0, viol = 0;
  EXPECT(dlc_verify_inequalities_csv(3, 7, 1e-7, "lemma1,cor3", &t, &rows, &viol) == DLC_OK);
  EXPECT(rows == 6 && viol == 0);
  dlc_text_free(t);
  EXPECT(dlc_verify_inequalities_csv(3, 7, 1e-7, "lemma9", &t, &rows, &viol) == DLC_E_PARAMETER);
}

int main(void) {
  test_errors();
  test_gamma();
  test_poisson();
  test_inequalities();
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
