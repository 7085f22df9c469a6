#pragma once

#include "dlcert/linalg.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dlcert {

enum class TestFunctionKind { Polynomial, TrigDamped, PiecewiseRandom };

struct TestFunctionSpec {
  TestFunctionKind kind = TestFunctionKind::Polynomial;
  std::uint64_t seed = 0;
  Eigen::Index n = 1;
};

// Random vector function laid out on [origin, origin + span]:
//   Polynomial       degree <= 3 in u = (s - origin) / span
//   TrigDamped       a e^{-c u} cos(b u + phi) + d per component
//   PiecewiseRandom  continuous piecewise linear, constant outside the knots
class TestFunction {
public:
  TestFunction(const TestFunctionSpec &spec, double origin, double span);
  // A caller-supplied function; breakpoints mark its kinks, if any.
  TestFunction(Eigen::Index n, std::function<Vector(double)> fn,
               std::vector<double> breakpoints = {});

  Vector operator()(double s) const;
  Eigen::Index n() const { return n_; }
  // Kinks of the piecewise-linear kind, empty otherwise.
  const std::vector<double> &breakpoints() const { return knots_; }

private:
  TestFunctionKind kind_;
  Eigen::Index n_;
  double origin_, span_;
  Matrix coef_; // polynomial: n x (deg+1); trig: n x 5; piecewise: n x knots
  std::vector<double> knots_;
  std::function<Vector(double)> fn_;
};

enum class WeightKind {
  None,           // classical Jensen bound only
  FiniteCentered, // a + b - 2u
  AffineCentered, // K0 u - K1 (Cor. 1) or M0 i - M1 (Cor. 3)
  DoubleCentered, // u - (h/2 + (h K1 + K2) / (2 K1h)), u = t - s (Cor. 2)
  Custom          // fn, or a seeded random function; re-centered numerically
};

struct WeightSpec {
  WeightKind kind = WeightKind::None;
  std::uint64_t seed = 0;
  std::function<double(double)> fn;
};

struct GapReport {
  double lhs = 0.0;
  double rhs_jensen = 0.0;
  double rhs_extra = 0.0;
  double gap = 0.0; // lhs - (rhs_jensen + rhs_extra)
  // Normalization of the extra term as used, and the same quantity by
  // brute-force quadrature or summation of the weight squared.
  double denominator = 0.0;
  double denominator_oracle = 0.0;
  // Largest disagreement between redundant evaluations of the extra term
  // (Eq. 2 form for the finite lemma, the two iterated forms of Sigma~).
  double form_mismatch = 0.0;
  std::string instance;
};

// Nonnegative kernel on [0, inf) with a cutoff beyond which the mass of
// kernel times a degree-8 polynomial is below the requested value.
struct Kernel {
  std::string label;
  std::function<double(double)> density;
  std::function<double(double)> cutoff;
  double scale = 1.0; // typical length of the support
};

// Psi(theta) = theta^{N-2} e^{-theta/T} / (T^N (N-2)!).
Kernel gamma_psi_kernel(int N, double T);

// Truncated weights M(0..K) with tail mass below 1e-16.
struct DiscreteWeights {
  std::string label;
  std::vector<double> m;
  int h = 0; // gap used by the double-sum variant
};

// Q(i) = e^-lambda lambda^{i+1} / (i+1)!.
DiscreteWeights poisson_q_weights(double lambda);
// P(i) = e^-lambda lambda^i / i!.
DiscreteWeights poisson_p_weights(double lambda, int h = 0);

// Spec overloads lay the test function out over the natural length of the
// instance: [a, b], three kernel scales (plus h for the double integral) or
// three mean indices for sums.
GapReport check_finite_interval(double a, double b, const TestFunctionSpec &omega,
                                const WeightSpec &g, const Matrix &R);
GapReport check_finite_interval(double a, double b, const TestFunction &omega,
                                const WeightSpec &g, const Matrix &R);
GapReport check_infinite_single(const Kernel &k, const TestFunctionSpec &omega,
                                const WeightSpec &g, const Matrix &R);
GapReport check_infinite_single(const Kernel &k, const TestFunction &omega, const WeightSpec &g,
                                const Matrix &R);
// omega is a function of u = t - s. compare_forms evaluates the second
// iterated form of Sigma~ as well (Cor. 2).
GapReport check_infinite_double(const Kernel &k, double h, const TestFunctionSpec &omega,
                                const WeightSpec &g, const Matrix &R, bool compare_forms = true);
GapReport check_infinite_double(const Kernel &k, double h, const TestFunction &omega,
                                const WeightSpec &g, const Matrix &R, bool compare_forms = true);

enum class SumVariant { Single, Double };
// x is evaluated at integer indices; for the double sum at m = k - 1 - j.
GapReport check_summation(const DiscreteWeights &w, const TestFunctionSpec &x,
                          const WeightSpec &g, const Matrix &R, SumVariant variant);
GapReport check_summation(const DiscreteWeights &w, const TestFunction &x, const WeightSpec &g,
                          const Matrix &R, SumVariant variant);

enum class Theorem { Lemma1, Thm1, Cor1, Thm2, Cor2, Lemma2Eq19, Lemma2Eq20, Thm3, Cor3 };

const std::vector<Theorem> &all_theorems();
const char *to_string(Theorem t);

struct BatteryRow {
  Theorem theorem = Theorem::Lemma1;
  std::uint64_t seed = 0;
  GapReport report;
  bool violation = false;
};

struct BatteryOptions {
  int trials = 1000;
  std::uint64_t seed = 7;
  double rel_tol = 1e-7; // gap below -rel_tol * lhs is a violation
  std::vector<Theorem> theorems = all_theorems();
};

// Rebuilds and checks the instance behind one battery row.
GapReport run_instance(Theorem t, std::uint64_t instance_seed);

// Rows ordered by theorem, then trial.
std::vector<BatteryRow> run_battery(const BatteryOptions &opts);

bool is_violation(const GapReport &r, double rel_tol);

} // namespace dlcert
