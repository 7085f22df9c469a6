#include "dlcert/poisson_cert.hpp"

#include "block_matrix.hpp"
#include "dlcert/error.hpp"
#include "dlcert/reduction.hpp"
#include "parallel.hpp"

#include <cmath>

namespace dlcert {

using detail::hcat;
using detail::selector;
using detail::vcat;

void PoissonDelaySystem::validate() const {
  if (A.rows() < 1 || A.rows() != A.cols() || A1.rows() != A.rows() || A1.cols() != A.cols())
    throw InputError("A and A1 must be square matrices of equal dimension");
  if (!A.allFinite() || !A1.allFinite())
    throw InputError("system matrices have non-finite entries");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("Poisson parameter lambda must be positive");
  if (h < 0)
    throw ParameterError("gap h must be a non-negative integer");
}

PoissonMoments poisson_moments(double lambda, int h) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("Poisson parameter lambda must be positive");
  if (h < 0)
    throw ParameterError("gap h must be a non-negative integer");
  PoissonMoments m;
  m.q0 = -std::expm1(-lambda);
  m.qbar1 = lambda - m.q0;
  m.qbar2 = lambda * lambda - lambda + m.q0;
  m.qbar1h = lambda + m.q0 * (h - 1.0);
  m.p1h = lambda + h;
  return m;
}

double poisson_correction_denominator(const PoissonMoments &m) {
  const double d = m.qbar2 - m.qbar1 * m.qbar1 / m.q0;
  if (!(d > 0.0) || !std::isfinite(d))
    throw ParameterError("qbar2 - qbar1^2/q0 is not positive at this lambda");
  return d;
}

const char *to_string(PoissonCondition c) {
  return c == PoissonCondition::Prop3 ? "prop3" : "remark7";
}

namespace {

FeasibilityProblem build_discrete(const PoissonDelaySystem &sys, bool with_correction,
                                  bool restrict_equilibria) {
  sys.validate();
  const Eigen::Index n = sys.n();
  const PoissonMoments mom = poisson_moments(sys.lambda, sys.h);
  const double lambda = sys.lambda;
  const double e = std::exp(-lambda);
  const double q0 = mom.q0;
  const double h = sys.h;
  const Matrix &A = sys.A;
  const Matrix &A1 = sys.A1;
  const Matrix I = Matrix::Identity(n, n);
  const Matrix Z = Matrix::Zero(n, n);

  // xi = (x(k), f(k), x(k-h), f(k-h), q(k))
  const Matrix F0 = vcat({hcat({A, A1, Z, Z, Z}), hcat({Z, Z, e * A, e * A1, I})});
  const Matrix F1 = vcat({hcat({I, Z, Z, Z, Z}), hcat({Z, I, Z, Z, Z})});
  const Matrix F01 = hcat({A - I, A1, Z, Z, Z});
  const Matrix F02 = hcat({Z, -I, e * A, e * A1, I});
  const Matrix F12 = hcat({I, -I, Z, Z, Z});
  const Matrix F13 = hcat({I, Z, -I, Z, Z});
  const Matrix F15 = hcat({q0 * I, Z, Z, Z, -I});
  const Matrix F24 = hcat({Z, I, Z, -I, Z});
  const Matrix F25 = hcat({Z, -lambda * I, Z, Z, (mom.qbar1 / q0 + 1.0) * I});

  FeasibilityProblem p;
  const VarRef W = p.add_variable("What", 2 * n);
  const VarRef G1 = p.add_variable("G1", n);
  const VarRef G2 = p.add_variable("G2", n);
  const VarRef H1 = p.add_variable("H1", n);
  const VarRef H2 = p.add_variable("H2", n);
  const VarRef S1 = p.add_variable("S1", n);
  const VarRef S2 = p.add_variable("S2", n);
  const VarRef R1 = p.add_variable("R1", n);
  const VarRef R2 = p.add_variable("R2", n);

  const Matrix E0 = selector(n, 0, 5), E1 = selector(n, 1, 5), E2 = selector(n, 2, 5),
               E3 = selector(n, 3, 5), E4 = selector(n, 4, 5);

  // Block is -Xihat; every term enters with its sign flipped.
  LmiExpr xi(p, 5 * n);
  // Sigmahat = diag{S1 + G1 + q0 G2, -G1 + S2, -S1, -S2, -G2/q0}
  xi.add_congruence(S1, E0, -1.0)
      .add_congruence(G1, E0, -1.0)
      .add_congruence(G2, E0, -q0)
      .add_congruence(G1, E1, 1.0)
      .add_congruence(S2, E1, -1.0)
      .add_congruence(S1, E2, 1.0)
      .add_congruence(S2, E3, 1.0)
      .add_congruence(G2, E4, 1.0 / q0);
  xi.add_congruence(W, F0, -1.0).add_congruence(W, F1, 1.0);
  xi.add_congruence(H1, F12, 1.0 / mom.p1h);
  xi.add_congruence(H1, F01, -mom.p1h)
      .add_congruence(H2, F01, -mom.qbar1h)
      .add_congruence(R1, F01, -h * h);
  xi.add_congruence(R2, F02, -h * h);
  xi.add_congruence(H2, F15, 1.0 / mom.qbar1h);
  xi.add_congruence(R1, F13, 1.0);
  xi.add_congruence(R2, F24, 1.0);
  if (with_correction)
    xi.add_congruence(G2, F25, 1.0 / poisson_correction_denominator(mom));
  AffineBlock block = xi.finish(with_correction ? "-Xihat" : "-Xihat|F25=0");
  const Matrix eq = restrict_equilibria
                       ? equilibrium_directions(A, A1, TimeDomain::Discrete)
                       : Matrix(n, 0);
  if (eq.cols() > 0)
    // Constant solution x = v: f = v and q = q0 v.
    p.add_block_with_kernel(std::move(block), vcat({eq, eq, eq, eq, q0 * eq}));
  else
    p.add_block(std::move(block));

  for (VarRef v : {W, G1, G2, H1, H2, S1, S2, R1, R2})
    p.add_positivity_block(v);
  return p;
}

} // namespace

FeasibilityProblem build_prop3(const PoissonDelaySystem &sys, bool restrict_equilibria) {
  return build_discrete(sys, true, restrict_equilibria);
}

FeasibilityProblem build_remark7(const PoissonDelaySystem &sys, bool restrict_equilibria) {
  return build_discrete(sys, false, restrict_equilibria);
}

FeasibilityProblem build_poisson_problem(const PoissonDelaySystem &sys, PoissonCondition cond,
                                         bool restrict_equilibria) {
  return build_discrete(sys, cond == PoissonCondition::Prop3, restrict_equilibria);
}

std::vector<LambdaRecord> lambda_scan(const PoissonDelaySystem &tmpl,
                                      const std::vector<double> &lambda_grid, int h,
                                      PoissonCondition cond, bool restrict_equilibria,
                                      const SolveOptions &opts) {
  if (lambda_grid.empty())
    throw ParameterError("lambda grid is empty");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw ParameterError("lambda grid must be strictly ascending");
  std::vector<LambdaRecord> out(lambda_grid.size());
  detail::parallel_for(out.size(), [&](std::size_t i) {
    PoissonDelaySystem sys = tmpl;
    sys.lambda = lambda_grid[i];
    sys.h = h;
    const FeasibilityResult r = solve_feasibility(build_poisson_problem(sys, cond, restrict_equilibria), opts);
    out[i] = LambdaRecord{sys.lambda, h, r.status, r.margin, r.assignment};
  });
  return out;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 60; ++i)
    g.push_back(0.05 * i);
  return g;
}

} // namespace dlcert
