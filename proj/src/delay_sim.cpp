#include "dlcert/delay_sim.hpp"

#include "dlcert/csv.hpp"
#include "dlcert/error.hpp"
#include "dlcert/quadrature.hpp"
#include "dlcert/reduction.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dlcert {

HistoryBuffer::HistoryBuffer(Vector phi, double step, std::size_t lookback,
                             std::size_t expected)
    : phi_(std::move(phi)), step_(step), pre_((long long)lookback + 2) {
  if (!(step > 0.0))
    throw ParameterError("history step must be positive");
  data_.resize(phi_.size(), Eigen::Index(pre_ + (long long)std::max<std::size_t>(expected, 1) + 3));
  data_.colwise() = phi_;
}

void HistoryBuffer::push(const Vector &x) {
  const long long c = pre_ + (long long)count_;
  if (c + 3 > data_.cols()) {
    const Eigen::Index old = data_.cols();
    data_.conservativeResize(Eigen::NoChange, 2 * old);
  }
  for (long long k = 0; k < 3; ++k)
    data_.col(Eigen::Index(c + k)) = x;
  ++count_;
}

long long HistoryBuffer::column(long long j) const {
  if (j < -pre_)
    throw InstanceError("history lookback exceeded");
  // count_ = 0 leaves phi in every column, which is the held value too
  return pre_ + std::min(j, (long long)count_ + 1);
}

Vector HistoryBuffer::at_index(long long j) const {
  if (j < 0)
    return phi_;
  if (count_ == 0)
    return phi_;
  return data_.col(Eigen::Index(column(std::min(j, (long long)count_ - 1))));
}

Vector HistoryBuffer::at_time(double t) const {
  const Vector w = Vector::Ones(1);
  return weighted_window(t, w);
}

Vector HistoryBuffer::weighted_window(double t, const Vector &w) const {
  const double pos = t / step_;
  const double base = std::floor(pos + 1e-12);
  const double frac = std::max(0.0, pos - base);
  const auto i0 = (long long)base;
  const auto m = (long long)w.size();
  if (i0 - m + 1 < -pre_)
    throw InstanceError("history lookback exceeded");
  const Vector wr = w.reverse();
  // columns i0-m+1 .. i0 (and one to the right for the interpolation)
  auto block = [&](long long first) {
    const long long last = first + m - 1;
    if (last <= (long long)count_ + 1)
      return Vector(data_.middleCols(Eigen::Index(pre_ + first), Eigen::Index(m)) * wr);
    Vector r = Vector::Zero(phi_.size());
    for (long long j = 0; j < m; ++j)
      r.noalias() += wr(Eigen::Index(j)) * data_.col(Eigen::Index(column(first + j)));
    return r;
  };
  Vector r = block(i0 - m + 1);
  if (frac > 1e-12)
    r = (1.0 - frac) * r + frac * block(i0 - m + 2);
  return r;
}

namespace {

void check_phi(Eigen::Index n, const Vector &phi) {
  if (phi.size() != n)
    throw InputError("initial vector has the wrong dimension");
  if (!phi.allFinite())
    throw InputError("initial vector has non-finite entries");
}

// Trapezoid weights of a gamma-shaped density s^(k-1) e^(-s/T) on a grid of
// step dt up to the tail cutoff, scaled by `scale`.
Vector trapezoid_weights(double shape, double T, double scale, double dt, double tail_eps) {
  const double L = gamma_tail_cutoff(shape, T, tail_eps);
  const auto m = Eigen::Index(std::ceil(L / dt));
  Vector w(m + 1);
  const double lognorm = std::lgamma(shape) + shape * std::log(T);
  for (Eigen::Index j = 0; j <= m; ++j) {
    const double s = double(j) * dt;
    double d;
    if (s == 0.0)
      d = shape == 1.0 ? std::exp(-lognorm) : 0.0;
    else
      d = std::exp((shape - 1.0) * std::log(s) - s / T - lognorm);
    w(j) = scale * d * dt * (j == 0 || j == m ? 0.5 : 1.0);
  }
  return w;
}

void record(Trajectory &tr, double t, const Vector &x, const Vector &a1, const Vector &a2) {
  tr.time.push_back(t);
  tr.x.push_back(x);
  tr.aux1.push_back(a1);
  tr.aux2.push_back(a2);
  tr.norm.push_back(x.stableNorm());
  if (!x.allFinite() || !a1.allFinite() || !a2.allFinite())
    throw InstanceError("simulation produced non-finite values");
}

Vector project_out(const Matrix &left_null, const Matrix &M, const Vector &hint) {
  if (left_null.cols() == 0)
    return hint;
  // constraints C phi = 0 with C = W^T M
  const Matrix C = left_null.transpose() * M;
  const Vector corr = C.completeOrthogonalDecomposition().solve(C * hint);
  return hint - corr;
}

} // namespace

Trajectory simulate_gamma(const GammaDelaySystem &sys, const Vector &phi,
                          const GammaSimOptions &opts) {
  sys.validate();
  check_phi(sys.n(), phi);
  const double dt = opts.dt;
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ParameterError("dt must be positive");
  if (!(opts.horizon > dt) || !std::isfinite(opts.horizon))
    throw ParameterError("horizon must exceed dt");
  if (!(opts.tail_eps > 0.0) || opts.tail_eps > 1e-8)
    throw ParameterError("tail_eps must lie in (0, 1e-8]");
  if (opts.record_every < 1)
    throw ParameterError("record_every must be at least 1");

  Trajectory tr;
  if (dt > sys.T / 10.0)
    tr.warnings.push_back("dt=" + fmt9(dt) + " exceeds T/10=" + fmt9(sys.T / 10.0) +
                          "; kernel poorly resolved");

  const double T = sys.T, h = sys.h;
  // Psi = Gamma-density(shape N-1, scale T) / T; Gamma itself has shape N.
  const auto wpsi = trapezoid_weights(double(sys.N - 1), T, 1.0 / T, dt, opts.tail_eps);
  const auto wgam = trapezoid_weights(double(sys.N), T, 1.0, dt, opts.tail_eps);

  const auto steps = (long long)std::llround(opts.horizon / dt);
  const auto lookback = std::size_t(wpsi.size() + std::ceil(h / dt) + 2);
  HistoryBuffer hist(phi, dt, lookback, std::size_t(steps) + 1);

  Vector x = phi;
  Vector y = phi * wgam.sum();
  hist.push(x);

  // history samples newer than the last pushed one are held
  auto rho = [&](double tau) { return hist.weighted_window(tau - h, wpsi); };
  const Matrix &A = sys.A, &A1 = sys.A1;

  Vector r0 = rho(0.0);
  record(tr, 0.0, x, y, r0);
  for (long long k = 0; k < steps; ++k) {
    const double t = double(k) * dt;
    const Vector rm = rho(t + 0.5 * dt);
    const Vector r1 = rho(t + dt);
    const Vector kx1 = A * x + A1 * y;
    const Vector ky1 = -y / T + r0;
    const Vector x2 = x + 0.5 * dt * kx1, y2 = y + 0.5 * dt * ky1;
    const Vector kx2 = A * x2 + A1 * y2;
    const Vector ky2 = -y2 / T + rm;
    const Vector x3 = x + 0.5 * dt * kx2, y3 = y + 0.5 * dt * ky2;
    const Vector kx3 = A * x3 + A1 * y3;
    const Vector ky3 = -y3 / T + rm;
    const Vector x4 = x + dt * kx3, y4 = y + dt * ky3;
    const Vector kx4 = A * x4 + A1 * y4;
    const Vector ky4 = -y4 / T + r1;
    x += dt / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    y += dt / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
    hist.push(x);
    r0 = rho(t + dt);
    if ((k + 1) % opts.record_every == 0 || k + 1 == steps)
      record(tr, double(k + 1) * dt, x, y, r0);
  }
  return tr;
}

Trajectory simulate_poisson(const PoissonDelaySystem &sys, const Vector &phi,
                            const PoissonSimOptions &opts) {
  sys.validate();
  check_phi(sys.n(), phi);
  if (opts.steps < 1)
    throw ParameterError("steps must be at least 1");
  if (!(opts.tail_eps > 0.0) || opts.tail_eps > 1e-10)
    throw ParameterError("tail_eps must lie in (0, 1e-10]");

  const double lam = sys.lambda;
  const int cut = poisson_tail_cutoff(lam, opts.tail_eps, 0) + 1;
  Vector P(cut + 1), Q(cut + 1);
  for (int t = 0; t <= cut; ++t) {
    P(t) = std::exp(-lam + double(t) * std::log(lam) - std::lgamma(double(t) + 1.0));
    Q(t) = std::exp(-lam + double(t + 1) * std::log(lam) - std::lgamma(double(t) + 2.0));
  }

  HistoryBuffer hist(phi, 1.0, std::size_t(cut + sys.h + 2), std::size_t(opts.steps) + 1);
  hist.push(phi);
  auto sums = [&](long long k, Vector &f, Vector &q) {
    f = hist.weighted_window(double(k - sys.h), P);
    q = hist.weighted_window(double(k - sys.h), Q);
  };

  Trajectory tr;
  tr.discrete = true;
  Vector x = phi, f, q;
  for (long long k = 0;; ++k) {
    sums(k, f, q);
    record(tr, double(k), x, f, q);
    if (k == opts.steps)
      break;
    x = sys.A * x + sys.A1 * f;
    hist.push(x);
  }
  return tr;
}

bool decay_metric(const Trajectory &traj, double ratio) {
  if (traj.norm.empty())
    throw InputError("empty trajectory");
  const std::size_t n = traj.norm.size();
  const std::size_t w = std::max<std::size_t>(1, n / 10);
  const double tail = *std::max_element(traj.norm.end() - std::ptrdiff_t(w), traj.norm.end());
  return tail <= ratio * traj.norm.front();
}

Vector decaying_initial_state(const GammaDelaySystem &sys, const Vector &hint) {
  sys.validate();
  check_phi(sys.n(), hint);
  const Matrix w = equilibrium_directions(sys.A.transpose(), sys.A1.transpose(),
                                          TimeDomain::Continuous);
  const double mean = sys.h + sys.N * sys.T;
  const Matrix M = Matrix::Identity(sys.n(), sys.n()) + mean * sys.A1;
  return project_out(w, M, hint);
}

Vector decaying_initial_state(const PoissonDelaySystem &sys, const Vector &hint) {
  sys.validate();
  check_phi(sys.n(), hint);
  const Matrix w =
      equilibrium_directions(sys.A.transpose(), sys.A1.transpose(), TimeDomain::Discrete);
  const Matrix M = Matrix::Identity(sys.n(), sys.n()) + sys.mean_delay() * sys.A1;
  return project_out(w, M, hint);
}

void write_trajectory_csv(std::ostream &os, const Trajectory &traj) {
  const Eigen::Index n = traj.x.empty() ? 0 : traj.x.front().size();
  os << (traj.discrete ? "k" : "t");
  for (Eigen::Index i = 0; i < n; ++i)
    os << ",x" << (i + 1);
  os << ",norm\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    os << fmt9(traj.time[s]);
    for (Eigen::Index i = 0; i < n; ++i)
      os << ',' << fmt9(traj.x[s](i));
    os << ',' << fmt9(traj.norm[s]) << '\n';
  }
}

} // namespace dlcert
