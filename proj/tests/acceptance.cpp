// Exit gate: one PASS/FAIL line per acceptance criterion.

#include "dlcert/delay_sim.hpp"
#include "dlcert/gamma_cert.hpp"
#include "dlcert/ineq_oracles.hpp"
#include "dlcert/poisson_cert.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dlcert;

namespace {

int failed = 0;

void report(int id, bool ok, const std::string &what, double seconds, const std::string &detail) {
  std::printf("%s criterion %d: %s [%.1f s] %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), seconds,
              detail.c_str());
  std::fflush(stdout);
  if (!ok)
    ++failed;
}

template <class F> void run(int id, const std::string &what, F body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception &e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, ok, what, s, detail);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool table_row(GammaCondition cond, const std::vector<double> &hs,
               const std::vector<std::optional<double>> &expect, std::string &detail) {
  const auto tmpl = fixtures::two_cars_reduced();
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto r = max_T_bisect(tmpl, hs[i], cond);
    bool good;
    if (expect[i])
      good = r.T_max && std::abs(*r.T_max - *expect[i]) <= 0.01;
    else
      good = !r.T_max;
    ok = ok && good;
    os << "h=" << hs[i] << ":" << (r.T_max ? fmt(*r.T_max) : std::string("none"))
       << (good ? "" : "(!)") << " ";
  }
  detail = os.str();
  return ok;
}

bool hurwitz(const Matrix &m) {
  return (Eigen::EigenSolver<Matrix>(m).eigenvalues().real().array() < 0).all();
}

bool schur(const Matrix &m) {
  return (Eigen::EigenSolver<Matrix>(m).eigenvalues().cwiseAbs().array() < 1).all();
}

} // namespace

int main() {
  run(1, "Table 1 Prop. 1 row", [](std::string &d) {
    return table_row(GammaCondition::Prop1, {1e-5, 0.01, 0.15, 0.34, 0.35, 0.36},
                     {0.305, 0.296, 0.158, 0.008, 0.002, std::nullopt}, d);
  });

  run(2, "Table 1 Prop. 2 row", [](std::string &d) {
    return table_row(GammaCondition::Prop2, {1e-5, 0.01, 0.15, 0.34, 0.35, 0.36},
                     {0.322, 0.312, 0.168, 0.014, 0.008, 0.003}, d);
  });

  run(3, "Prop. 1 region inside Prop. 2 region on 20x20 grid", [](std::string &d) {
    std::vector<double> Ts, hs;
    for (int k = 1; k <= 20; ++k)
      Ts.push_back(0.02 * k);
    for (int k = 0; k < 20; ++k)
      hs.push_back(0.4 * k / 19.0);
    const auto tmpl = fixtures::two_cars_reduced();
    const auto p1 = region_sweep_gamma(tmpl, Ts, hs, GammaCondition::Prop1);
    const auto p2 = region_sweep_gamma(tmpl, Ts, hs, GammaCondition::Prop2);
    int f1 = 0, f2 = 0, bad = 0;
    for (std::size_t i = 0; i < p1.size(); ++i) {
      f1 += p1[i].verdict == Verdict::Feasible;
      f2 += p2[i].verdict == Verdict::Feasible;
      bad += p1[i].verdict == Verdict::Feasible && p2[i].verdict != Verdict::Feasible;
    }
    d = "prop1 feasible=" + std::to_string(f1) + " prop2 feasible=" + std::to_string(f2) +
        " counterexamples=" + std::to_string(bad);
    return bad == 0 && f1 > 0;
  });

  run(4, "Remark 7 certificates certify Prop. 3", [](std::string &d) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ua(-1.0, 1.0), ub(-0.8, 0.8), ul(0.1, 3.0);
    int found = 0, transferred = 0, tried = 0;
    double worst = 1e300;
    while (found < 50 && tried < 5000) {
      ++tried;
      PoissonDelaySystem s;
      s.A.resize(2, 2);
      s.A1.resize(2, 2);
      for (Eigen::Index i = 0; i < 4; ++i) {
        s.A(i) = ua(rng);
        s.A1(i) = ub(rng);
      }
      s.lambda = ul(rng);
      s.h = int(rng() % 3);
      const auto r = solve_feasibility(build_remark7(s), {.stop_when_decided = true});
      if (r.status != Verdict::Feasible)
        continue;
      ++found;
      const double c = certify_assignment(build_prop3(s), *r.assignment);
      worst = std::min(worst, c);
      transferred += c > 0;
    }
    d = std::to_string(transferred) + "/" + std::to_string(found) + " (systems tried " +
        std::to_string(tried) + ", min Prop. 3 margin " + fmt(worst) + ")";
    return found == 50 && transferred == 50;
  });

  run(5, "Example 2: some lambda is Prop. 3 Feasible and Remark 7 not", [](std::string &d) {
    const auto grid = default_lambda_grid();
    const auto p3 = lambda_scan(fixtures::example2(), grid, 0, PoissonCondition::Prop3, true);
    const auto r7 = lambda_scan(fixtures::example2(), grid, 0, PoissonCondition::Remark7, true);
    std::vector<double> gap;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (p3[i].verdict == Verdict::Feasible && r7[i].verdict != Verdict::Feasible)
        gap.push_back(grid[i]);
    d = std::to_string(gap.size()) + " such lambda";
    if (!gap.empty())
      d += " in [" + fmt(gap.front()) + ", " + fmt(gap.back()) + "]";
    return !gap.empty();
  });

  run(6, "inequality battery, 1000 instances per theorem", [](std::string &d) {
    BatteryOptions o;
    o.trials = 1000;
    o.seed = 7;
    o.rel_tol = 1e-7;
    const auto rows = run_battery(o);
    int viol = 0, neg_extra = 0;
    double worst = 1e300;
    for (const auto &r : rows) {
      viol += r.violation;
      neg_extra += !(r.report.rhs_extra >= 0);
      if (r.report.lhs != 0)
        worst = std::min(worst, r.report.gap / std::abs(r.report.lhs));
    }
    d = std::to_string(rows.size()) + " rows, violations=" + std::to_string(viol) +
        ", negative extra=" + std::to_string(neg_extra) + ", min relative gap " + fmt(worst);
    return rows.size() == 9000 && viol == 0 && neg_extra == 0;
  });

  run(7, "closed-form moments against quadrature and series oracles", [](std::string &d) {
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    double worst_gamma = 0, worst_tilde = 0, worst_tilde_integral = 0, worst_poisson = 0;
    for (int N = 2; N <= 5; ++N)
      for (double T : {0.05, 0.1, 0.5, 1.0})
        for (double h : {0.0, 0.1, 1.0}) {
          const auto m = gamma_moments(N, T, h);
          for (int k = 0; k <= 3; ++k) {
            const double v = k == 0 ? m.psi0 : k == 1 ? m.psi1 : k == 2 ? m.psi2 : m.psi3;
            worst_gamma = std::max(worst_gamma, rel(v, oracle::psi_moment(N, T, k)));
          }
          worst_gamma = std::max(
              worst_gamma,
              rel(m.psi1h, oracle::half_line([&](double s) { return (s + h) * oracle::psi(N, T, s); })));
          const double hb = m.hbar;
          const double tilde = oracle::half_line([&](double t) {
            const double top = t + h - hb;
            return oracle::psi(N, T, t) * (top * top * top + hb * hb * hb) / 3.0;
          });
          worst_tilde = std::max(worst_tilde, rel(m.psiTilde1, tilde));
          worst_tilde_integral = std::max(worst_tilde_integral, rel(m.psiTilde1_integral, tilde));
        }
    // The Poisson gap is an integer; h = 0.1 has no Poisson counterpart.
    for (double lambda : {0.2, 1.0, 3.0})
      for (int h : {0, 1}) {
        const auto m = poisson_moments(lambda, h);
        auto q = [&](auto f) { return oracle::poisson_series(lambda, 1, f); };
        worst_poisson = std::max({worst_poisson, rel(m.q0, q([](double) { return 1.0; })),
                                  rel(m.qbar1, q([](double i) { return i; })),
                                  rel(m.qbar2, q([](double i) { return i * i; })),
                                  rel(m.qbar1h, q([&](double i) { return i + h; })),
                                  rel(m.p1h, oracle::poisson_series(lambda, 0, [&](double i) {
                                        return i + h;
                                      }))});
      }
    d = "max rel err: gamma Psi0..3,Psi1h " + fmt(worst_gamma) + "; Poisson " +
        fmt(worst_poisson) + "; printed Psi~1 " + fmt(worst_tilde) +
        " (printed form is 6x the double integral; exact closed form " +
        fmt(worst_tilde_integral) + ")";
    return worst_gamma <= 1e-8 && worst_poisson <= 1e-8 && worst_tilde <= 1e-8;
  });

  run(8, "simulation decay at certified points; open-loop matrices unstable", [](std::string &d) {
    std::ostringstream os;
    bool ok = true;
    const Vector hint{{1.0, -1.0}};
    for (double T : {0.05, 0.1, 0.15, 0.2, 0.25}) {
      const double h = 0.01;
      const bool cert =
          solve_feasibility(build_prop1(fixtures::two_cars_reduced(T, h)), {.stop_when_decided = true})
              .status == Verdict::Feasible;
      const auto sys = fixtures::two_cars(T, h);
      GammaSimOptions o;
      o.dt = std::min(0.005, T / 20);
      o.horizon = 200;
      const bool decays = decay_metric(simulate_gamma(sys, decaying_initial_state(sys, hint), o), 1e-3);
      ok = ok && cert && decays;
      os << "T=" << T << (cert && decays ? ":ok " : ":bad ");
    }
    for (double lambda : {0.5, 1.0, 1.5, 2.0, 2.4}) {
      const auto sys = fixtures::example2(lambda, 0);
      const bool cert = solve_feasibility(build_prop3(sys, true), {.stop_when_decided = true})
                            .status == Verdict::Feasible;
      PoissonSimOptions o;
      o.steps = 3000;
      const bool decays =
          decay_metric(simulate_poisson(sys, decaying_initial_state(sys, hint), o), 1e-3);
      ok = ok && cert && decays;
      os << "lambda=" << lambda << (cert && decays ? ":ok " : ":bad ");
    }
    const auto g = fixtures::two_cars();
    const auto p = fixtures::example2();
    const bool unstable = !hurwitz(g.A) && !hurwitz(g.A + g.A1) && !schur(p.A) && !schur(p.A + p.A1);
    os << "| A, A+A1 non-Hurwitz (two cars) and non-Schur (Example 2): "
       << (unstable ? "yes" : "no");
    d = os.str();
    return ok && unstable;
  });

  std::printf("%d of 8 criteria failed\n", failed);
  return failed ? 1 : 0;
}
