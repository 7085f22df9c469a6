#include "dlcert/gamma_cert.hpp"

#include "block_matrix.hpp"
#include "dlcert/error.hpp"
#include "parallel.hpp"

#include <cmath>

namespace dlcert {

using detail::hcat;
using detail::selector;
using detail::vcat;

void GammaDelaySystem::validate() const {
  if (A.rows() < 1 || A.rows() != A.cols() || A1.rows() != A.rows() || A1.cols() != A.cols())
    throw InputError("A and A1 must be square matrices of equal dimension");
  if (!A.allFinite() || !A1.allFinite())
    throw InputError("system matrices have non-finite entries");
  if (N < 2)
    throw ParameterError("gamma shape N must be an integer >= 2");
  if (!(T > 0.0) || !std::isfinite(T))
    throw ParameterError("gamma scale T must be positive");
  if (!(h >= 0.0) || !std::isfinite(h))
    throw ParameterError("gap h must be non-negative");
}

GammaMoments gamma_moments(int N, double T, double h) {
  if (N < 2)
    throw ParameterError("gamma shape N must be an integer >= 2");
  if (!(T > 0.0) || !std::isfinite(T))
    throw ParameterError("gamma scale T must be positive");
  if (!(h >= 0.0) || !std::isfinite(h))
    throw ParameterError("gap h must be non-negative");
  const double n = N;
  GammaMoments m;
  m.psi0 = 1.0 / T;
  m.psi1 = n - 1.0;
  m.psi2 = n * (n - 1.0) * T;
  m.psi3 = (n + 1.0) * n * (n - 1.0) * T * T;
  m.psi1h = h * m.psi0 + m.psi1;
  m.psiTilde1 = h * h * h / (2.0 * T) + 2.0 * m.psi3 +
                (3.0 * h * h * m.psi0 * (h * m.psi1 + 2.0 * m.psi2) - 3.0 * m.psi2 * m.psi2) /
                    (2.0 * m.psi1h);
  const double h2 = h * h;
  m.psiTilde1_integral = (m.psi0 * m.psi0 * h2 * h2 + 4.0 * m.psi0 * m.psi1 * h2 * h +
                          6.0 * m.psi0 * m.psi2 * h2 + 4.0 * m.psi0 * m.psi3 * h +
                          4.0 * m.psi1 * m.psi3 - 3.0 * m.psi2 * m.psi2) /
                         (12.0 * m.psi1h);
  m.hbar = h / 2.0 + (h * m.psi1 + m.psi2) / (2.0 * m.psi1h);
  return m;
}

const char *to_string(GammaCondition c) { return c == GammaCondition::Prop1 ? "prop1" : "prop2"; }

FeasibilityProblem build_prop1(const GammaDelaySystem &sys) {
  sys.validate();
  const Eigen::Index n = sys.n();
  const GammaMoments mom = gamma_moments(sys.N, sys.T, sys.h);
  const double T = sys.T;
  const Matrix I = Matrix::Identity(n, n);
  const Matrix Z = Matrix::Zero(n, n);

  // xi = (x, y, rho)
  const Matrix F0 = vcat({hcat({sys.A, sys.A1, Z}), hcat({Z, -I / T, I})});
  const Matrix F1 = vcat({hcat({I, Z, Z}), hcat({Z, I, Z})});
  const Matrix F01 = hcat({sys.A, sys.A1, Z});
  const Matrix F13 = hcat({I / T, Z, -I});
  const Matrix F23 = hcat({Z, -I, T * I});

  FeasibilityProblem p;
  const VarRef W = p.add_variable("W", 2 * n);
  const VarRef G = p.add_variable("G", n);
  const VarRef H = p.add_variable("H", n);

  // Block is -Xi.
  LmiExpr xi(p, 3 * n);
  xi.add_congruence(G, selector(n, 0, 3), -1.0 / T)
      .add_congruence(G, selector(n, 2, 3), T)
      .add_sym_product(W, F1, F0, -1.0)
      .add_congruence(G, F23, (sys.N - 1.0) / T)
      .add_congruence(H, F01, -mom.psi1h)
      .add_congruence(H, F13, 1.0 / mom.psi1h);
  p.add_block(xi.finish("-Xi"));
  p.add_positivity_block(W);
  p.add_positivity_block(G);
  p.add_positivity_block(H);
  return p;
}

FeasibilityProblem build_prop2(const GammaDelaySystem &sys) {
  sys.validate();
  const Eigen::Index n = sys.n();
  const GammaMoments mom = gamma_moments(sys.N, sys.T, sys.h);
  const double T = sys.T;
  const double hbar = mom.hbar;
  const Matrix I = Matrix::Identity(n, n);
  const Matrix Z = Matrix::Zero(n, n);

  // xi = (x, y, rho, zeta)
  const Matrix F1 = vcat({hcat({I, Z, Z, Z}), hcat({Z, I, Z, Z}), hcat({Z, Z, Z, I})});
  const Matrix F0 = vcat({hcat({sys.A, sys.A1, Z, Z}), hcat({Z, -I / T, I, Z}),
                          hcat({I / T, Z, -I, Z})});
  const Matrix F01 = hcat({sys.A, sys.A1, Z, Z});
  const Matrix F13 = hcat({I / T, Z, -I, Z});
  const Matrix F33 = hcat({(hbar / T) * I, (sys.N - 1.0) * I, (sys.h - hbar) * I, -I});
  const Matrix F23 = hcat({Z, -I, T * I, Z});

  FeasibilityProblem p;
  const VarRef W = p.add_variable("Wbar", 3 * n);
  const VarRef G = p.add_variable("G", n);
  const VarRef H = p.add_variable("H", n);

  LmiExpr xi(p, 4 * n);
  xi.add_congruence(G, selector(n, 0, 4), -1.0 / T)
      .add_congruence(G, selector(n, 2, 4), T)
      .add_sym_product(W, F1, F0, -1.0)
      .add_congruence(G, F23, (sys.N - 1.0) / T)
      .add_congruence(H, F01, -mom.psi1h)
      .add_congruence(H, F13, 1.0 / mom.psi1h)
      .add_congruence(H, F33, 1.0 / mom.psiTilde1);
  p.add_block(xi.finish("-Xibar"));
  p.add_positivity_block(W);
  p.add_positivity_block(G);
  p.add_positivity_block(H);
  return p;
}

FeasibilityProblem build_gamma_problem(const GammaDelaySystem &sys, GammaCondition cond) {
  return cond == GammaCondition::Prop1 ? build_prop1(sys) : build_prop2(sys);
}

namespace {

bool feasible_at(GammaDelaySystem sys, double T, GammaCondition cond, const SolveOptions &opts) {
  sys.T = T;
  return solve_feasibility(build_gamma_problem(sys, cond), opts).status == Verdict::Feasible;
}

} // namespace

MaxScaleResult max_T_bisect(GammaDelaySystem tmpl, double h, GammaCondition cond,
                            const BisectOptions &opts) {
  if (!(opts.T_lo > 0.0) || !(opts.T_lo < opts.T_hi))
    throw ParameterError("bisection bracket must satisfy 0 < T_lo < T_hi");
  if (!(opts.tol > 0.0))
    throw ParameterError("bisection tolerance must be positive");
  if (opts.prescan_points < 2)
    throw ParameterError("pre-scan needs at least two points");
  tmpl.h = h;
  tmpl.T = opts.T_lo;
  tmpl.validate();

  MaxScaleResult out;
  const int k = opts.prescan_points;
  std::vector<Verdict> verdicts(static_cast<std::size_t>(k));
  std::vector<double> Ts(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    Ts[static_cast<std::size_t>(i)] = opts.T_lo + (opts.T_hi - opts.T_lo) * i / (k - 1);
  detail::parallel_for(Ts.size(), [&](std::size_t i) {
    GammaDelaySystem sys = tmpl;
    sys.T = Ts[i];
    verdicts[i] = solve_feasibility(build_gamma_problem(sys, cond), opts.solve).status;
  });
  out.solves = k;
  for (std::size_t i = 0; i < Ts.size(); ++i)
    out.prescan.emplace_back(Ts[i], verdicts[i]);

  std::optional<std::size_t> last_feasible;
  bool seen_failure = false;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == Verdict::Feasible) {
      if (seen_failure)
        out.monotone = false;
      last_feasible = i;
    } else {
      seen_failure = true;
    }
  }
  if (!out.monotone)
    out.diagnostic = "feasibility is not monotone in T on the pre-scan; bisecting the "
                     "topmost feasible-to-infeasible transition";
  if (verdicts.front() != Verdict::Feasible) {
    if (last_feasible)
      out.diagnostic = "infeasible at T_lo but feasible at T = " +
                       std::to_string(Ts[*last_feasible]) + "; reporting no maximum";
    return out;
  }
  if (*last_feasible + 1 == Ts.size()) {
    out.T_max = opts.T_hi;
    return out;
  }
  double lo = Ts[*last_feasible], hi = Ts[*last_feasible + 1];
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    ++out.solves;
    if (feasible_at(tmpl, mid, cond, opts.solve))
      lo = mid;
    else
      hi = mid;
  }
  out.T_max = lo;
  return out;
}

std::vector<GammaCell> region_sweep_gamma(const GammaDelaySystem &tmpl,
                                          const std::vector<double> &Tgrid,
                                          const std::vector<double> &hgrid, GammaCondition cond,
                                          const SolveOptions &opts) {
  if (Tgrid.empty() || hgrid.empty())
    throw ParameterError("region sweep needs non-empty T and h grids");
  std::vector<GammaCell> cells(Tgrid.size() * hgrid.size());
  for (std::size_t hi = 0; hi < hgrid.size(); ++hi)
    for (std::size_t ti = 0; ti < Tgrid.size(); ++ti) {
      GammaCell &c = cells[hi * Tgrid.size() + ti];
      c.T_index = ti;
      c.h_index = hi;
      c.T = Tgrid[ti];
      c.h = hgrid[hi];
    }
  detail::parallel_for(cells.size(), [&](std::size_t k) {
    GammaDelaySystem sys = tmpl;
    sys.T = cells[k].T;
    sys.h = cells[k].h;
    const FeasibilityResult r = solve_feasibility(build_gamma_problem(sys, cond), opts);
    cells[k].verdict = r.status;
    cells[k].margin = r.margin;
  });
  return cells;
}

} // namespace dlcert
