#pragma once

#include "dlcert/linalg.hpp"
#include "dlcert/sdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlcert {

// dx/dt = A x(t) + A1 * int_0^inf Gamma(s) x(t - s - h) ds with the gamma
// kernel Gamma(s) = s^(N-1) e^(-s/T) / (T^N (N-1)!).
struct GammaDelaySystem {
  Matrix A;
  Matrix A1;
  int N = 2;
  double T = 1.0;
  double h = 0.0;

  Eigen::Index n() const { return A.rows(); }
  // Throws ParameterError (N < 2, T <= 0, h < 0) or InputError (shapes).
  void validate() const;
};

// Moments of Psi(s) = s^(N-2) e^(-s/T) / (T^N (N-2)!), the kernel of
// rho(t) in the augmented form, plus the constants of the double-integral
// correction term.
struct GammaMoments {
  double psi0 = 0.0;  // 1/T
  double psi1 = 0.0;  // N-1
  double psi2 = 0.0;  // N(N-1)T
  double psi3 = 0.0;  // (N+1)N(N-1)T^2
  double psi1h = 0.0; // h psi0 + psi1
  // Closed form used in the Prop. 2 LMI:
  //   h^3/(2T) + 2 psi3 + (3h^2 psi0 (h psi1 + 2 psi2) - 3 psi2^2) / (2 psi1h)
  // It is exactly six times the double integral of Psi(s) g(u)^2 it bounds
  // (see psi_tilde1_integral); the larger denominator keeps the bound valid.
  double psiTilde1 = 0.0;
  // int_0^inf int_0^(s+h) Psi(s) (u - hbar)^2 du ds, in closed form.
  double psiTilde1_integral = 0.0;
  double hbar = 0.0; // h/2 + (h psi1 + psi2) / (2 psi1h)
};

GammaMoments gamma_moments(int N, double T, double h);

enum class GammaCondition { Prop1 = 1, Prop2 = 2 };

const char *to_string(GammaCondition c);

FeasibilityProblem build_prop1(const GammaDelaySystem &sys);
FeasibilityProblem build_prop2(const GammaDelaySystem &sys);
FeasibilityProblem build_gamma_problem(const GammaDelaySystem &sys, GammaCondition cond);

struct BisectOptions {
  double T_lo = 1e-4;
  double T_hi = 1.0;
  double tol = 1e-3;
  int prescan_points = 8;
  SolveOptions solve{.stop_when_decided = true};
};

struct MaxScaleResult {
  std::optional<double> T_max;
  // false when the coarse pre-scan saw feasibility return after a failure.
  bool monotone = true;
  std::vector<std::pair<double, Verdict>> prescan;
  int solves = 0;
  std::string diagnostic;
};

// Largest T in [T_lo, T_hi] whose LMI is Feasible at gap h, to absolute
// tolerance `tol`. Indeterminate counts as not feasible.
MaxScaleResult max_T_bisect(GammaDelaySystem tmpl, double h, GammaCondition cond,
                            const BisectOptions &opts = {});

struct GammaCell {
  std::size_t T_index = 0;
  std::size_t h_index = 0;
  double T = 0.0;
  double h = 0.0;
  Verdict verdict = Verdict::Indeterminate;
  double margin = 0.0;
};

// Row-major over (h, T): cell k has h_index = k / Tgrid.size().
std::vector<GammaCell> region_sweep_gamma(const GammaDelaySystem &tmpl,
                                          const std::vector<double> &Tgrid,
                                          const std::vector<double> &hgrid, GammaCondition cond,
                                          const SolveOptions &opts = {.stop_when_decided = true});

} // namespace dlcert
