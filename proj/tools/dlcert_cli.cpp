// Command-line front end. Talks to the library only through dlcert.h.
#include "dlcert/dlcert.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

const char *kTwoCars = R"({"label": "two cars on a ring",
 "A": [[0, 0], [0, 0]], "A1": [[-2, 2], [2, -2]],
 "distribution": {"type": "gamma", "N": 2, "T": 0.1, "h": 0.01}})";

const char *kExample2 = R"({"label": "discrete system with Poisson delay",
 "A": [[-0.5, 0], [0, 1]], "A1": [[-0.5, 0.8], [0.5, -0.2]],
 "distribution": {"type": "poisson", "lambda": 1.0, "h": 0}})";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Library call failed. Spec and parameter problems are the caller's fault.
struct ApiError : std::runtime_error {
  dlc_status status;
  ApiError(dlc_status s, const std::string &what) : std::runtime_error(what), status(s) {}
};

void check(dlc_status s, const char *what) {
  if (s != DLC_OK)
    throw ApiError(s, std::string(what) + ": " + dlc_status_string(s) + ": " + dlc_last_error());
}

struct SystemDeleter {
  void operator()(dlc_system *s) const { dlc_system_free(s); }
};
struct TextDeleter {
  void operator()(dlc_text *t) const { dlc_text_free(t); }
};
using SystemPtr = std::unique_ptr<dlc_system, SystemDeleter>;
using TextPtr = std::unique_ptr<dlc_text, TextDeleter>;

struct Grid {
  double lo = 0, hi = 0;
  int steps = 0;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
      v[std::size_t(i)] = steps == 1 ? lo : lo + (hi - lo) * double(i) / double(steps - 1);
    return v;
  }
};

double parse_double(const std::string &s, const std::string &what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v))
    throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

// lo:hi:steps, steps points including both ends.
Grid parse_grid(const std::string &text, const std::string &flag) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ':'))
    parts.push_back(p);
  if (parts.size() != 3)
    throw UsageError(flag + " expects lo:hi:steps, got '" + text + "'");
  Grid g;
  g.lo = parse_double(parts[0], flag);
  g.hi = parse_double(parts[1], flag);
  const double steps = parse_double(parts[2], flag);
  if (steps < 1 || steps != std::floor(steps) || steps > 1e6)
    throw UsageError(flag + ": steps must be a positive integer");
  g.steps = int(steps);
  if (g.steps > 1 && !(g.lo < g.hi))
    throw UsageError(flag + ": lo must be below hi");
  return g;
}

std::vector<double> parse_list(const std::string &text, const std::string &flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ','))
    v.push_back(parse_double(p, flag));
  if (v.empty())
    throw UsageError(flag + " is empty");
  return v;
}

dlc_condition parse_prop(const std::string &s) {
  if (s == "1" || s == "prop1")
    return DLC_PROP1;
  if (s == "2" || s == "prop2")
    return DLC_PROP2;
  if (s == "3" || s == "prop3")
    return DLC_PROP3;
  if (s == "remark7" || s == "7")
    return DLC_REMARK7;
  throw UsageError("--prop must be one of 1, 2, 3, remark7");
}

// Shared system selection: --spec FILE or --example NAME, with a per-command
// fallback.
struct SystemArgs {
  std::string spec;
  std::string example;
  std::optional<double> T, lambda, h;

  void add(CLI::App *app, bool overrides) {
    app->add_option("--spec", spec, "system spec (JSON)")->check(CLI::ExistingFile);
    app->add_option("--example", example, "built-in system: two-cars or example2")
        ->check(CLI::IsMember({"two-cars", "example2"}));
    if (overrides) {
      app->add_option("--T", T, "override the gamma scale T");
      app->add_option("--lambda", lambda, "override the Poisson parameter");
      app->add_option("--h", h, "override the gap h");
    }
  }

  SystemPtr load(const char *fallback) const {
    dlc_system *raw = nullptr;
    if (!spec.empty() && !example.empty())
      throw UsageError("give --spec or --example, not both");
    if (!spec.empty())
      check(dlc_system_load(spec.c_str(), &raw), "loading spec");
    else if (!example.empty())
      check(dlc_system_from_json(example == "two-cars" ? kTwoCars : kExample2, &raw), "example");
    else if (fallback)
      check(dlc_system_from_json(fallback, &raw), "example");
    else
      throw UsageError("a system is required (--spec FILE or --example NAME)");
    SystemPtr sys(raw);
    dlc_system_info info{};
    check(dlc_system_info_get(sys.get(), &info), "system info");
    if (T) {
      if (info.kind != DLC_GAMMA)
        throw UsageError("--T applies to gamma systems");
      check(dlc_system_set_scale(sys.get(), *T), "--T");
    }
    if (lambda) {
      if (info.kind != DLC_POISSON)
        throw UsageError("--lambda applies to Poisson systems");
      check(dlc_system_set_scale(sys.get(), *lambda), "--lambda");
    }
    if (h)
      check(dlc_system_set_gap(sys.get(), *h), "--h");
    return sys;
  }
};

dlc_system_info info_of(const dlc_system *s) {
  dlc_system_info info{};
  check(dlc_system_info_get(s, &info), "system info");
  return info;
}

// Output sink: --out FILE, relative paths under $DLCERT_OUT_DIR when set.
class Output {
public:
  explicit Output(const std::string &path) {
    if (path.empty() || path == "-")
      return;
    std::filesystem::path p(path);
    if (const char *dir = std::getenv("DLCERT_OUT_DIR"); dir && *dir && p.is_relative())
      p = std::filesystem::path(dir) / p;
    file_.open(p, std::ios::binary);
    if (!file_)
      throw UsageError("cannot open output file '" + p.string() + "'");
    path_ = p.string();
  }
  std::ostream &stream() { return file_.is_open() ? file_ : std::cout; }
  void write(const dlc_text *t) {
    stream().write(dlc_text_data(t), std::streamsize(dlc_text_size(t)));
    stream().flush();
    if (!stream())
      throw std::runtime_error("write failed" + (path_.empty() ? "" : " on " + path_));
  }

private:
  std::ofstream file_;
  std::string path_;
};

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct SolverArgs {
  double margin_tol = 0;
  bool no_reduce = false;

  void add(CLI::App *app) {
    app->add_option("--margin-tol", margin_tol, "margin below which verdicts are Indeterminate");
    app->add_flag("--no-reduce", no_reduce, "certify the full state even when it has equilibria");
  }
  dlc_options options() const {
    dlc_options o;
    dlc_options_default(&o);
    if (margin_tol > 0)
      o.margin_tol = margin_tol;
    o.reduce = no_reduce ? 0 : 1;
    return o;
  }
};

void note_reduction(const dlc_system *s, const dlc_options &o) {
  const dlc_system_info info = info_of(s);
  if (!o.reduce || info.equilibria == 0)
    return;
  if (info.kind == DLC_GAMMA && info.quotient)
    std::cerr << "note: " << info.equilibria
              << "-dimensional equilibrium subspace factored out (--no-reduce keeps it)\n";
  else if (info.kind == DLC_POISSON)
    std::cerr << "note: LMI restricted to the complement of " << info.equilibria
              << " equilibrium direction(s) (--no-reduce keeps them)\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stability certificates for systems with gamma- and Poisson-distributed delays"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", dlc_version());

  // certify
  auto *certify = app.add_subcommand("certify", "decide one LMI and print verdict and margin");
  SystemArgs cert_sys;
  SolverArgs cert_solver;
  std::string cert_prop;
  double cert_tol = 0;
  cert_sys.add(certify, true);
  cert_solver.add(certify);
  certify->add_option("--prop", cert_prop, "1, 2 (gamma) or 3, remark7 (Poisson)")->required();
  certify->add_option("--tol", cert_tol, "alias of --margin-tol");

  // max-scale
  auto *maxscale = app.add_subcommand("max-scale", "largest certified T at given gaps h");
  SystemArgs ms_sys;
  SolverArgs ms_solver;
  std::string ms_prop = "1", ms_hgrid, ms_out;
  std::vector<double> ms_h;
  double ms_lo = 1e-4, ms_hi = 1.0, ms_tol = 1e-3;
  ms_sys.add(maxscale, false);
  ms_solver.add(maxscale);
  maxscale->add_option("--prop", ms_prop, "1 or 2");
  maxscale->add_option("--h", ms_h, "gap(s) h")->delimiter(',');
  maxscale->add_option("--h-grid", ms_hgrid, "gaps as lo:hi:steps");
  maxscale->add_option("--T-lo", ms_lo, "lower end of the T bracket");
  maxscale->add_option("--T-hi", ms_hi, "upper end of the T bracket");
  maxscale->add_option("--tol", ms_tol, "bisection tolerance on T");
  maxscale->add_option("--out", ms_out, "CSV output file (default stdout)");

  // region
  auto *region = app.add_subcommand("region", "verdict grid over (T, h)");
  SystemArgs rg_sys;
  SolverArgs rg_solver;
  std::string rg_prop = "1", rg_T = "0.02:0.4:20", rg_h = "0:0.4:20", rg_out;
  rg_sys.add(region, false);
  rg_solver.add(region);
  region->add_option("--prop", rg_prop, "1 or 2");
  region->add_option("--T-grid", rg_T, "lo:hi:steps")->capture_default_str();
  region->add_option("--h-grid", rg_h, "lo:hi:steps")->capture_default_str();
  region->add_option("--tol", rg_solver.margin_tol, "alias of --margin-tol");
  region->add_option("--out", rg_out, "CSV output file (default stdout)");

  // lambda-scan
  auto *lscan = app.add_subcommand("lambda-scan", "verdicts over the Poisson parameter");
  SystemArgs ls_sys;
  SolverArgs ls_solver;
  std::vector<std::string> ls_prop;
  std::string ls_grid = "0.05:3:60", ls_out;
  std::optional<int> ls_h;
  ls_sys.add(lscan, false);
  ls_solver.add(lscan);
  lscan->add_option("--prop", ls_prop, "3 and/or remark7 (default both)")->delimiter(',');
  lscan->add_option("--lambda-grid", ls_grid, "lo:hi:steps")->capture_default_str();
  lscan->add_option("--h", ls_h, "integer gap (default from the spec)");
  lscan->add_option("--tol", ls_solver.margin_tol, "alias of --margin-tol");
  lscan->add_option("--out", ls_out, "CSV output file (default stdout)");

  // verify-inequalities
  auto *verify = app.add_subcommand("verify-inequalities", "random oracle battery");
  std::size_t vi_trials = 1000;
  std::uint64_t vi_seed = 7;
  double vi_tol = 1e-7;
  std::string vi_theorems, vi_out;
  verify->add_option("--trials", vi_trials, "instances per theorem")->capture_default_str();
  verify->add_option("--seed", vi_seed, "battery seed")->capture_default_str();
  verify->add_option("--tol", vi_tol, "relative gap tolerance")->capture_default_str();
  verify->add_option("--theorems", vi_theorems, "comma-separated subset");
  verify->add_option("--out", vi_out, "CSV output file (default stdout)");

  // simulate
  auto *simulate = app.add_subcommand("simulate", "trajectory CSV of the augmented system");
  SystemArgs sm_sys;
  std::string sm_phi, sm_out;
  double sm_dt = 0, sm_horizon = 200, sm_tail = 0, sm_ratio = 1e-3;
  int sm_steps = 500, sm_every = 1;
  bool sm_raw = false;
  sm_sys.add(simulate, true);
  simulate->add_option("--phi", sm_phi, "constant initial vector, comma-separated");
  simulate->add_option("--dt", sm_dt, "RK4 step (gamma; default min(0.005, T/20))");
  simulate->add_option("--horizon", sm_horizon, "time horizon (gamma)")->capture_default_str();
  simulate->add_option("--steps", sm_steps, "number of steps (Poisson)")->capture_default_str();
  simulate->add_option("--tail-eps", sm_tail, "kernel tail mass cut");
  simulate->add_option("--every", sm_every, "record every k-th step")->capture_default_str();
  simulate->add_option("--ratio", sm_ratio, "decay ratio for the summary")->capture_default_str();
  simulate->add_flag("--raw-phi", sm_raw, "do not project phi to zero conserved quantity");
  simulate->add_option("--out", sm_out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (certify->parsed()) {
      SystemPtr sys = cert_sys.load(nullptr);
      if (cert_tol > 0)
        cert_solver.margin_tol = cert_tol;
      const dlc_options o = cert_solver.options();
      note_reduction(sys.get(), o);
      dlc_certificate c{};
      check(dlc_certify(sys.get(), parse_prop(cert_prop), &o, &c), "certify");
      std::cout << dlc_verdict_string(c.verdict) << " margin=" << fmt9(c.margin)
                << " prop=" << dlc_condition_string(parse_prop(cert_prop))
                << " variables=" << c.variables << " state_dim=" << c.state_dim << '\n';
      return c.verdict == DLC_FEASIBLE ? kExitOk : kExitNegative;
    }

    if (maxscale->parsed()) {
      SystemPtr sys = ms_sys.load(kTwoCars);
      const dlc_condition cond = parse_prop(ms_prop);
      std::vector<double> hs = ms_h;
      if (!ms_hgrid.empty()) {
        if (!hs.empty())
          throw UsageError("give --h or --h-grid, not both");
        hs = parse_grid(ms_hgrid, "--h-grid").values();
      }
      if (hs.empty())
        hs.push_back(info_of(sys.get()).h);
      const dlc_options o = ms_solver.options();
      note_reduction(sys.get(), o);
      Output out(ms_out);
      std::ostringstream csv;
      csv << "h,prop,found,T_max\n";
      bool any = false;
      for (double h : hs) {
        dlc_max_scale_result r{};
        check(dlc_max_scale(sys.get(), cond, h, ms_lo, ms_hi, ms_tol, &o, &r), "max-scale");
        any = any || r.found;
        csv << fmt9(h) << ',' << dlc_condition_string(cond) << ',' << r.found << ','
            << (r.found ? fmt9(r.T_max) : std::string("")) << '\n';
        if (!r.monotone)
          std::cerr << "warning: feasibility in T is not monotone at h=" << fmt9(h) << '\n';
      }
      out.stream() << csv.str();
      return any ? kExitOk : kExitNegative;
    }

    if (region->parsed()) {
      SystemPtr sys = rg_sys.load(kTwoCars);
      const auto Ts = parse_grid(rg_T, "--T-grid").values();
      const auto hs = parse_grid(rg_h, "--h-grid").values();
      const dlc_options o = rg_solver.options();
      note_reduction(sys.get(), o);
      dlc_text *raw = nullptr;
      size_t feas = 0;
      check(dlc_region_csv(sys.get(), parse_prop(rg_prop), Ts.data(), Ts.size(), hs.data(),
                           hs.size(), &o, &raw, &feas),
            "region");
      TextPtr text(raw);
      Output(rg_out).write(text.get());
      std::cerr << feas << " of " << Ts.size() * hs.size() << " cells Feasible\n";
      return kExitOk;
    }

    if (lscan->parsed()) {
      SystemPtr sys = ls_sys.load(kExample2);
      std::vector<dlc_condition> conds;
      for (const auto &p : ls_prop)
        conds.push_back(parse_prop(p));
      if (conds.empty())
        conds = {DLC_PROP3, DLC_REMARK7};
      const auto grid = parse_grid(ls_grid, "--lambda-grid").values();
      const int h = ls_h ? *ls_h : int(info_of(sys.get()).h);
      const dlc_options o = ls_solver.options();
      note_reduction(sys.get(), o);
      dlc_text *raw = nullptr;
      size_t feas = 0;
      check(dlc_lambda_scan_csv(sys.get(), conds.data(), conds.size(), grid.data(), grid.size(),
                                h, &o, &raw, &feas),
            "lambda-scan");
      TextPtr text(raw);
      Output(ls_out).write(text.get());
      std::cerr << feas << " of " << grid.size() * conds.size() << " points Feasible\n";
      return kExitOk;
    }

    if (verify->parsed()) {
      dlc_text *raw = nullptr;
      size_t rows = 0, viol = 0;
      check(dlc_verify_inequalities_csv(vi_trials, vi_seed, vi_tol,
                                        vi_theorems.empty() ? nullptr : vi_theorems.c_str(),
                                        &raw, &rows, &viol),
            "verify-inequalities");
      TextPtr text(raw);
      Output(vi_out).write(text.get());
      std::cerr << rows << " instances, " << viol << " violations\n";
      return viol == 0 ? kExitOk : kExitNegative;
    }

    if (simulate->parsed()) {
      SystemPtr sys = sm_sys.load(nullptr);
      const dlc_system_info info = info_of(sys.get());
      std::vector<double> phi;
      if (sm_phi.empty()) {
        for (std::size_t i = 0; i < info.n; ++i)
          phi.push_back(i % 2 == 0 ? 1.0 : -1.0);
      } else {
        phi = parse_list(sm_phi, "--phi");
        if (phi.size() != info.n)
          throw UsageError("--phi needs " + std::to_string(info.n) + " entries");
      }
      dlc_sim_options so;
      dlc_sim_options_default(&so);
      so.dt = sm_dt;
      so.horizon = sm_horizon;
      so.steps = sm_steps;
      so.tail_eps = sm_tail;
      so.record_every = sm_every;
      so.zero_conserved = sm_raw ? 0 : 1;
      so.decay_ratio = sm_ratio;
      dlc_text *raw = nullptr;
      dlc_sim_summary sum{};
      check(dlc_simulate_csv(sys.get(), phi.data(), &so, &raw, &sum), "simulate");
      TextPtr text(raw);
      Output(sm_out).write(text.get());
      if (sum.warnings)
        std::cerr << "warning: " << sum.first_warning << '\n';
      std::cerr << (sum.decayed ? "decayed" : "did not decay") << ": |x| " << fmt9(sum.initial_norm)
                << " -> " << fmt9(sum.final_norm) << " over " << sum.samples << " samples\n";
      return kExitOk;
    }
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ApiError &e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.status == DLC_E_SPEC || e.status == DLC_E_PARAMETER ||
                       e.status == DLC_E_INPUT || e.status == DLC_E_UNSUPPORTED ||
                       e.status == DLC_E_NULL;
    return usage ? kExitUsage : kExitFailure;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
