#include "dlcert/dlcert.h"

#include "dlcert/csv.hpp"
#include "dlcert/delay_sim.hpp"
#include "dlcert/gamma_cert.hpp"
#include "dlcert/ineq_oracles.hpp"
#include "dlcert/poisson_cert.hpp"
#include "dlcert/reduction.hpp"
#include "dlcert/system_spec.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstring>
#include <new>
#include <sstream>

struct dlc_system {
  dlcert::SystemSpec spec;
};

struct dlc_text {
  std::string s;
};

namespace {

using namespace dlcert;

thread_local std::string g_last_error;

dlc_status fail(dlc_status s, const std::string &msg) {
  g_last_error = msg;
  return s;
}

template <class F> dlc_status guarded(F &&f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const SpecError &e) {
    return fail(DLC_E_SPEC, e.what());
  } catch (const ParameterError &e) {
    return fail(DLC_E_PARAMETER, e.what());
  } catch (const InputError &e) {
    return fail(DLC_E_INPUT, e.what());
  } catch (const ModelError &e) {
    return fail(DLC_E_MODEL, e.what());
  } catch (const InstanceError &e) {
    return fail(DLC_E_INSTANCE, e.what());
  } catch (const std::bad_alloc &) {
    return fail(DLC_E_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(DLC_E_INTERNAL, e.what());
  } catch (...) {
    return fail(DLC_E_INTERNAL, "unknown exception");
  }
}

#define DLC_REQUIRE(p)                                                                            \
  do {                                                                                            \
    if (!(p))                                                                                     \
      return fail(DLC_E_NULL, "argument '" #p "' is NULL");                                       \
  } while (0)

Matrix read_matrix(size_t n, const double *data) {
  const auto dim = Eigen::Index(n);
  Matrix M(dim, dim);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      M(Eigen::Index(i), Eigen::Index(j)) = data[i * n + j];
  if (!M.allFinite())
    throw InputError("matrix has non-finite entries");
  return M;
}

SolveOptions solve_options(const dlc_options *o) {
  dlc_options d;
  dlc_options_default(&d);
  if (!o)
    o = &d;
  SolveOptions s;
  s.margin_tol = o->margin_tol;
  s.gap_tol = o->gap_tol;
  s.max_iters = o->max_iters;
  s.stop_when_decided = o->stop_when_decided != 0;
  if (!(s.margin_tol > 0.0) || !(s.gap_tol > 0.0) || s.max_iters < 1)
    throw ParameterError("solver tolerances must be positive and max_iters >= 1");
  return s;
}

bool reduce_flag(const dlc_options *o) { return o ? o->reduce != 0 : true; }

// The system the gamma LMIs are built on: the quotient when requested and
// available, the full system otherwise.
GammaDelaySystem gamma_target(const GammaDelaySystem &g, bool reduce, bool *reduced) {
  *reduced = false;
  if (!reduce)
    return g;
  const auto q = equilibrium_quotient(g.A, g.A1, TimeDomain::Continuous);
  if (!q)
    return g;
  GammaDelaySystem r = g;
  r.A = q->A;
  r.A1 = q->A1;
  *reduced = true;
  return r;
}

bool poisson_restrict(const PoissonDelaySystem &p, bool reduce) {
  return reduce && equilibrium_directions(p.A, p.A1, TimeDomain::Discrete).cols() > 0;
}

GammaCondition gamma_condition(dlc_condition c) {
  if (c == DLC_PROP1)
    return GammaCondition::Prop1;
  if (c == DLC_PROP2)
    return GammaCondition::Prop2;
  throw ParameterError("gamma systems take conditions prop1 or prop2");
}

PoissonCondition poisson_condition(dlc_condition c) {
  if (c == DLC_PROP3)
    return PoissonCondition::Prop3;
  if (c == DLC_REMARK7)
    return PoissonCondition::Remark7;
  throw ParameterError("Poisson systems take conditions prop3 or remark7");
}

dlc_verdict to_c(Verdict v) {
  switch (v) {
  case Verdict::Feasible:
    return DLC_FEASIBLE;
  case Verdict::Infeasible:
    return DLC_INFEASIBLE;
  default:
    return DLC_INDETERMINATE;
  }
}

std::vector<double> grid(const double *v, size_t n, const char *name) {
  if (!v || n == 0)
    throw ParameterError(std::string(name) + " grid is empty");
  return {v, v + n};
}

dlc_text *make_text(std::string s) { return new dlc_text{std::move(s)}; }

} // namespace

extern "C" {

const char *dlc_version(void) { return "1.0.0"; }

const char *dlc_last_error(void) { return g_last_error.c_str(); }

const char *dlc_status_string(dlc_status s) {
  switch (s) {
  case DLC_OK:
    return "ok";
  case DLC_E_NULL:
    return "null argument";
  case DLC_E_PARAMETER:
    return "parameter error";
  case DLC_E_INPUT:
    return "input error";
  case DLC_E_SPEC:
    return "spec error";
  case DLC_E_MODEL:
    return "model error";
  case DLC_E_INSTANCE:
    return "instance error";
  case DLC_E_UNSUPPORTED:
    return "unsupported";
  case DLC_E_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

const char *dlc_verdict_string(dlc_verdict v) {
  switch (v) {
  case DLC_FEASIBLE:
    return "Feasible";
  case DLC_INFEASIBLE:
    return "Infeasible";
  case DLC_INDETERMINATE:
    return "Indeterminate";
  }
  return "unknown";
}

const char *dlc_condition_string(dlc_condition c) {
  switch (c) {
  case DLC_PROP1:
    return "prop1";
  case DLC_PROP2:
    return "prop2";
  case DLC_PROP3:
    return "prop3";
  case DLC_REMARK7:
    return "remark7";
  }
  return "unknown";
}

const char *dlc_text_data(const dlc_text *t) { return t ? t->s.c_str() : ""; }
size_t dlc_text_size(const dlc_text *t) { return t ? t->s.size() : 0; }
void dlc_text_free(dlc_text *t) { delete t; }

dlc_status dlc_system_from_json(const char *json, dlc_system **out) {
  DLC_REQUIRE(json);
  DLC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new dlc_system{parse_system_spec(json)};
    return DLC_OK;
  });
}

dlc_status dlc_system_load(const char *path, dlc_system **out) {
  DLC_REQUIRE(path);
  DLC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new dlc_system{load_system_spec(path)};
    return DLC_OK;
  });
}

dlc_status dlc_system_gamma(size_t n, const double *A, const double *A1, int N, double T,
                            double h, dlc_system **out) {
  DLC_REQUIRE(A);
  DLC_REQUIRE(A1);
  DLC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (n == 0)
      throw InputError("dimension must be positive");
    GammaDelaySystem g{read_matrix(n, A), read_matrix(n, A1), N, T, h};
    g.validate();
    *out = new dlc_system{SystemSpec{"", g}};
    return DLC_OK;
  });
}

dlc_status dlc_system_poisson(size_t n, const double *A, const double *A1, double lambda, int h,
                              dlc_system **out) {
  DLC_REQUIRE(A);
  DLC_REQUIRE(A1);
  DLC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (n == 0)
      throw InputError("dimension must be positive");
    PoissonDelaySystem p{read_matrix(n, A), read_matrix(n, A1), lambda, h};
    p.validate();
    *out = new dlc_system{SystemSpec{"", p}};
    return DLC_OK;
  });
}

dlc_status dlc_system_clone(const dlc_system *s, dlc_system **out) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(out);
  return guarded([&] {
    *out = new dlc_system(*s);
    return DLC_OK;
  });
}

void dlc_system_free(dlc_system *s) { delete s; }

dlc_status dlc_system_to_json(const dlc_system *s, dlc_text **out) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(out);
  return guarded([&] {
    *out = make_text(dump_system_spec(s->spec));
    return DLC_OK;
  });
}

dlc_status dlc_system_info_get(const dlc_system *s, dlc_system_info *out) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(out);
  return guarded([&] {
    dlc_system_info info{};
    if (const auto *g = std::get_if<GammaDelaySystem>(&s->spec.system)) {
      info.kind = DLC_GAMMA;
      info.n = size_t(g->n());
      info.N = g->N;
      info.scale = g->T;
      info.h = g->h;
      info.equilibria =
          size_t(equilibrium_directions(g->A, g->A1, TimeDomain::Continuous).cols());
      info.quotient = equilibrium_quotient(g->A, g->A1, TimeDomain::Continuous) ? 1 : 0;
    } else {
      const auto &p = std::get<PoissonDelaySystem>(s->spec.system);
      info.kind = DLC_POISSON;
      info.n = size_t(p.n());
      info.scale = p.lambda;
      info.h = p.h;
      info.equilibria = size_t(equilibrium_directions(p.A, p.A1, TimeDomain::Discrete).cols());
      info.quotient = 0;
    }
    *out = info;
    return DLC_OK;
  });
}

const char *dlc_system_label(const dlc_system *s) { return s ? s->spec.label.c_str() : ""; }

dlc_status dlc_system_set_scale(dlc_system *s, double scale) {
  DLC_REQUIRE(s);
  return guarded([&] {
    SystemSpec next = s->spec;
    std::visit(
        [&](auto &sys) {
          if constexpr (std::is_same_v<std::decay_t<decltype(sys)>, GammaDelaySystem>)
            sys.T = scale;
          else
            sys.lambda = scale;
          sys.validate();
        },
        next.system);
    s->spec = std::move(next);
    return DLC_OK;
  });
}

dlc_status dlc_system_set_gap(dlc_system *s, double h) {
  DLC_REQUIRE(s);
  return guarded([&] {
    SystemSpec next = s->spec;
    if (auto *g = std::get_if<GammaDelaySystem>(&next.system)) {
      g->h = h;
      g->validate();
    } else {
      auto &p = std::get<PoissonDelaySystem>(next.system);
      if (!(h >= 0.0) || h != std::floor(h) || h > 1e6)
        throw ParameterError("Poisson gap h must be a non-negative integer");
      p.h = int(h);
      p.validate();
    }
    s->spec = std::move(next);
    return DLC_OK;
  });
}

dlc_status dlc_system_eigenvalues(const dlc_system *s, int which, double *re, double *im) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(re);
  DLC_REQUIRE(im);
  return guarded([&] {
    if (which != 0 && which != 1)
      throw ParameterError("which must be 0 (A) or 1 (A+A1)");
    Matrix M = std::visit([&](const auto &sys) -> Matrix { return which == 0 ? sys.A : Matrix(sys.A + sys.A1); },
                          s->spec.system);
    Eigen::EigenSolver<Matrix> es(M, false);
    if (es.info() != Eigen::Success)
      throw InstanceError("eigenvalue iteration did not converge");
    const auto ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      re[i] = ev(i).real();
      im[i] = ev(i).imag();
    }
    return DLC_OK;
  });
}

void dlc_options_default(dlc_options *o) {
  if (!o)
    return;
  const SolveOptions d;
  o->margin_tol = d.margin_tol;
  o->gap_tol = d.gap_tol;
  o->max_iters = d.max_iters;
  o->stop_when_decided = 0;
  o->reduce = 1;
}

dlc_status dlc_certify(const dlc_system *s, dlc_condition c, const dlc_options *opts,
                       dlc_certificate *out) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(out);
  return guarded([&] {
    const SolveOptions so = solve_options(opts);
    FeasibilityProblem prob;
    bool reduced = false;
    Eigen::Index dim = 0;
    if (const auto *g = std::get_if<GammaDelaySystem>(&s->spec.system)) {
      const GammaDelaySystem t = gamma_target(*g, reduce_flag(opts), &reduced);
      prob = build_gamma_problem(t, gamma_condition(c));
      dim = t.n();
    } else {
      const auto &p = std::get<PoissonDelaySystem>(s->spec.system);
      reduced = poisson_restrict(p, reduce_flag(opts));
      prob = build_poisson_problem(p, poisson_condition(c), reduced);
      dim = p.n();
    }
    const FeasibilityResult r = solve_feasibility(prob, so);
    dlc_certificate cert{};
    cert.verdict = to_c(r.status);
    cert.margin = r.margin;
    cert.upper_bound = r.upper_bound;
    cert.variables = size_t(prob.scalar_count());
    cert.state_dim = size_t(dim);
    cert.reduced = reduced ? 1 : 0;
    cert.iterations = r.iterations;
    cert.seconds = r.wall_seconds;
    *out = cert;
    return DLC_OK;
  });
}

dlc_status dlc_max_scale(const dlc_system *s, dlc_condition c, double h, double T_lo,
                         double T_hi, double tol, const dlc_options *opts,
                         dlc_max_scale_result *out) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(out);
  return guarded([&] {
    const auto *g = std::get_if<GammaDelaySystem>(&s->spec.system);
    if (!g)
      return fail(DLC_E_UNSUPPORTED, "max-scale needs a gamma system");
    bool reduced = false;
    const GammaDelaySystem t = gamma_target(*g, reduce_flag(opts), &reduced);
    BisectOptions bo;
    bo.T_lo = T_lo;
    bo.T_hi = T_hi;
    bo.tol = tol;
    bo.solve = solve_options(opts);
    bo.solve.stop_when_decided = true;
    const MaxScaleResult r = max_T_bisect(t, h, gamma_condition(c), bo);
    dlc_max_scale_result res{};
    res.found = r.T_max ? 1 : 0;
    res.T_max = r.T_max.value_or(0.0);
    res.monotone = r.monotone ? 1 : 0;
    res.solves = r.solves;
    *out = res;
    return DLC_OK;
  });
}

dlc_status dlc_region_csv(const dlc_system *s, dlc_condition c, const double *T_grid, size_t nT,
                          const double *h_grid, size_t nh, const dlc_options *opts,
                          dlc_text **out, size_t *feasible_cells) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(out);
  return guarded([&] {
    const auto *g = std::get_if<GammaDelaySystem>(&s->spec.system);
    if (!g)
      return fail(DLC_E_UNSUPPORTED, "region needs a gamma system");
    bool reduced = false;
    const GammaDelaySystem t = gamma_target(*g, reduce_flag(opts), &reduced);
    SolveOptions so = solve_options(opts);
    so.stop_when_decided = true;
    const GammaCondition cond = gamma_condition(c);
    const auto cells =
        region_sweep_gamma(t, grid(T_grid, nT, "T"), grid(h_grid, nh, "h"), cond, so);
    std::ostringstream os;
    os << "T,h,prop,verdict,margin\n";
    size_t feas = 0;
    for (const auto &cell : cells) {
      feas += cell.verdict == Verdict::Feasible;
      os << fmt9(cell.T) << ',' << fmt9(cell.h) << ',' << to_string(cond) << ','
         << to_string(cell.verdict) << ',' << fmt9(cell.margin) << '\n';
    }
    *out = make_text(os.str());
    if (feasible_cells)
      *feasible_cells = feas;
    return DLC_OK;
  });
}

dlc_status dlc_lambda_scan_csv(const dlc_system *s, const dlc_condition *conds, size_t nconds,
                               const double *grid_v, size_t ngrid, int h,
                               const dlc_options *opts, dlc_text **out,
                               size_t *feasible_points) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(conds);
  DLC_REQUIRE(out);
  return guarded([&] {
    const auto *p = std::get_if<PoissonDelaySystem>(&s->spec.system);
    if (!p)
      return fail(DLC_E_UNSUPPORTED, "lambda-scan needs a Poisson system");
    if (nconds == 0)
      throw ParameterError("no conditions given");
    const auto lambdas = grid(grid_v, ngrid, "lambda");
    SolveOptions so = solve_options(opts);
    so.stop_when_decided = true;
    PoissonDelaySystem tmpl = *p;
    tmpl.h = h;
    const bool restrict_eq = poisson_restrict(tmpl, reduce_flag(opts));
    std::ostringstream os;
    os << "lambda,h,variant,verdict,margin\n";
    size_t feas = 0;
    for (size_t i = 0; i < nconds; ++i) {
      const PoissonCondition cond = poisson_condition(conds[i]);
      for (const auto &rec : lambda_scan(tmpl, lambdas, h, cond, restrict_eq, so)) {
        feas += rec.verdict == Verdict::Feasible;
        os << fmt9(rec.lambda) << ',' << rec.h << ',' << to_string(cond) << ','
           << to_string(rec.verdict) << ',' << fmt9(rec.margin) << '\n';
      }
    }
    *out = make_text(os.str());
    if (feasible_points)
      *feasible_points = feas;
    return DLC_OK;
  });
}

dlc_status dlc_verify_inequalities_csv(size_t trials, uint64_t seed, double rel_tol,
                                       const char *theorems, dlc_text **out, size_t *rows,
                                       size_t *violations) {
  DLC_REQUIRE(out);
  return guarded([&] {
    if (trials == 0 || trials > 100000000)
      throw ParameterError("trials must be in [1, 1e8]");
    if (!(rel_tol >= 0.0))
      throw ParameterError("rel_tol must be non-negative");
    BatteryOptions bo;
    bo.trials = int(trials);
    bo.seed = seed;
    bo.rel_tol = rel_tol;
    if (theorems && *theorems) {
      bo.theorems.clear();
      std::stringstream ss(theorems);
      std::string name;
      while (std::getline(ss, name, ',')) {
        const auto all = all_theorems();
        const auto it = std::find_if(all.begin(), all.end(),
                                     [&](Theorem t) { return name == to_string(t); });
        if (it == all.end())
          throw ParameterError("unknown theorem '" + name + "'");
        bo.theorems.push_back(*it);
      }
    }
    const auto battery = run_battery(bo);
    std::ostringstream os;
    os << "theorem,seed,lhs,rhs_jensen,rhs_extra,gap\n";
    size_t viol = 0;
    for (const auto &r : battery) {
      viol += r.violation;
      os << to_string(r.theorem) << ',' << r.seed << ',' << fmt9(r.report.lhs) << ','
         << fmt9(r.report.rhs_jensen) << ',' << fmt9(r.report.rhs_extra) << ','
         << fmt9(r.report.gap) << '\n';
    }
    *out = make_text(os.str());
    if (rows)
      *rows = battery.size();
    if (violations)
      *violations = viol;
    return DLC_OK;
  });
}

void dlc_sim_options_default(dlc_sim_options *o) {
  if (!o)
    return;
  o->dt = 0.0;
  o->horizon = 200.0;
  o->steps = 500;
  o->tail_eps = 0.0;
  o->record_every = 1;
  o->zero_conserved = 1;
  o->decay_ratio = 1e-3;
}

dlc_status dlc_simulate_csv(const dlc_system *s, const double *phi, const dlc_sim_options *opts,
                            dlc_text **out, dlc_sim_summary *summary) {
  DLC_REQUIRE(s);
  DLC_REQUIRE(phi);
  return guarded([&] {
    dlc_sim_options o;
    dlc_sim_options_default(&o);
    if (opts)
      o = *opts;
    Trajectory tr;
    if (const auto *g = std::get_if<GammaDelaySystem>(&s->spec.system)) {
      Vector p = Eigen::Map<const Vector>(phi, g->n());
      if (o.zero_conserved)
        p = decaying_initial_state(*g, p);
      GammaSimOptions so;
      so.dt = o.dt > 0.0 ? o.dt : std::min(0.005, g->T / 20.0);
      so.horizon = o.horizon;
      so.tail_eps = o.tail_eps > 0.0 ? o.tail_eps : 1e-10;
      so.record_every = o.record_every;
      tr = simulate_gamma(*g, p, so);
    } else {
      const auto &ps = std::get<PoissonDelaySystem>(s->spec.system);
      Vector p = Eigen::Map<const Vector>(phi, ps.n());
      if (o.zero_conserved)
        p = decaying_initial_state(ps, p);
      PoissonSimOptions so;
      so.steps = o.steps;
      so.tail_eps = o.tail_eps > 0.0 ? o.tail_eps : 1e-12;
      tr = simulate_poisson(ps, p, so);
    }
    if (out) {
      std::ostringstream os;
      write_trajectory_csv(os, tr);
      *out = make_text(os.str());
    }
    if (summary) {
      dlc_sim_summary sm{};
      sm.decayed = decay_metric(tr, o.decay_ratio) ? 1 : 0;
      sm.initial_norm = tr.norm.front();
      sm.final_norm = tr.norm.back();
      sm.samples = tr.size();
      sm.warnings = int(tr.warnings.size());
      if (!tr.warnings.empty())
        std::snprintf(sm.first_warning, sizeof sm.first_warning, "%s",
                      tr.warnings.front().c_str());
      *summary = sm;
    }
    return DLC_OK;
  });
}

} // extern "C"
