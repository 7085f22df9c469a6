#pragma once

#include "dlcert/linalg.hpp"
#include "dlcert/sdp.hpp"

#include <vector>

namespace dlcert {

// x(k+1) = A x(k) + A1 sum_{tau>=0} P(tau) x(k - tau - h),
// P(tau) = e^-lambda lambda^tau / tau!.
struct PoissonDelaySystem {
  Matrix A;
  Matrix A1;
  double lambda = 1.0;
  int h = 0;

  Eigen::Index n() const { return A.rows(); }
  double mean_delay() const { return h + lambda; }
  void validate() const;
};

// Sums over Q(i) = e^-lambda lambda^(i+1) / (i+1)!.
struct PoissonMoments {
  double q0 = 0.0;     // sum Q(i)            = 1 - e^-lambda
  double qbar1 = 0.0;  // sum i Q(i)          = lambda - 1 + e^-lambda
  double qbar2 = 0.0;  // sum i^2 Q(i)        = lambda^2 - lambda + 1 - e^-lambda
  double qbar1h = 0.0; // sum (i + h) Q(i)    = lambda + (1 - e^-lambda)(h - 1)
  double p1h = 0.0;    // sum (i + h) P(i)    = lambda + h
};

PoissonMoments poisson_moments(double lambda, int h);

// qbar2 - qbar1^2 / q0, the denominator of the extra G2 term. Positive for
// every lambda > 0; checked numerically before use.
double poisson_correction_denominator(const PoissonMoments &m);

enum class PoissonCondition { Prop3 = 3, Remark7 = 7 };

const char *to_string(PoissonCondition c);

// restrict_equilibria: the -Xihat block must vanish on the augmented constant
// solutions built from ker(A + A1 - I) and be definite on their complement.
FeasibilityProblem build_prop3(const PoissonDelaySystem &sys, bool restrict_equilibria = false);
// Prop. 3 without the -(qbar2 - qbar1^2/q0)^-1 F25^T G2 F25 term.
FeasibilityProblem build_remark7(const PoissonDelaySystem &sys, bool restrict_equilibria = false);
FeasibilityProblem build_poisson_problem(const PoissonDelaySystem &sys, PoissonCondition cond,
                                         bool restrict_equilibria = false);

struct LambdaRecord {
  double lambda = 0.0;
  int h = 0;
  Verdict verdict = Verdict::Indeterminate;
  double margin = 0.0;
  std::optional<Vector> assignment;
};

// One record per grid value, in grid order.
std::vector<LambdaRecord> lambda_scan(const PoissonDelaySystem &tmpl,
                                      const std::vector<double> &lambda_grid, int h,
                                      PoissonCondition cond, bool restrict_equilibria = false,
                                      const SolveOptions &opts = {.stop_when_decided = true});

// The default scan grid: 0.05, 0.10, ..., 3.00.
std::vector<double> default_lambda_grid();

} // namespace dlcert
