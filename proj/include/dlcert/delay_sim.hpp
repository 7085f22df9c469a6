#pragma once

#include "dlcert/gamma_cert.hpp"
#include "dlcert/linalg.hpp"
#include "dlcert/poisson_cert.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dlcert {

// Sampled solution of the augmented form. For the continuous simulator aux1/aux2
// hold y(t) and rho(t); for the discrete one f(k) and q(k).
struct Trajectory {
  bool discrete = false;
  std::vector<double> time; // t, or k as a double
  std::vector<Vector> x;
  std::vector<Vector> aux1;
  std::vector<Vector> aux2;
  std::vector<double> norm;
  std::vector<std::string> warnings;

  std::size_t size() const { return time.size(); }
};

// Past states on a uniform grid of spacing `step`, sample 0 at time 0.
// Times before 0 read phi; times after the newest sample read the newest
// sample. `lookback` is the longest lag ever requested, in steps.
class HistoryBuffer {
public:
  HistoryBuffer(Vector phi, double step, std::size_t lookback, std::size_t expected = 0);

  void push(const Vector &x);
  std::size_t count() const { return count_; }
  Vector at_index(long long j) const;
  Vector at_time(double t) const; // linear interpolation
  // sum_j w(j) x(t - j step), each term linearly interpolated.
  Vector weighted_window(double t, const Vector &w) const;
  const Vector &phi() const { return phi_; }

private:
  long long column(long long j) const;

  Vector phi_;
  double step_;
  long long pre_;
  Matrix data_; // pre_ columns of phi, then samples, then two held copies
  std::size_t count_ = 0;
};

struct GammaSimOptions {
  double dt = 0.005;
  double horizon = 200.0;
  double tail_eps = 1e-10;
  int record_every = 1;
};

// RK4 on (x, y) of dx/dt = A x + A1 y, dy/dt = -y/T + rho(t),
// rho(t) = int_0^inf Psi(theta) x(t - theta - h) dtheta, with constant
// initial function phi. rho is a trapezoid sum against the history,
// truncated where the tail mass of Psi drops below tail_eps.
Trajectory simulate_gamma(const GammaDelaySystem &sys, const Vector &phi,
                          const GammaSimOptions &opts = {});

struct PoissonSimOptions {
  int steps = 500;
  double tail_eps = 1e-12;
};

// x(k+1) = A x(k) + A1 f(k), f(k) = sum_tau P(tau) x(k - tau - h), with
// x(k) = phi for k <= 0. q(k) = sum_tau Q(tau) x(k - tau - h).
Trajectory simulate_poisson(const PoissonDelaySystem &sys, const Vector &phi,
                            const PoissonSimOptions &opts = {});

// max norm over the last tenth of the samples <= ratio * initial norm.
bool decay_metric(const Trajectory &traj, double ratio);

// Constant initial vector whose conserved quantity vanishes, so that the
// solution can decay to 0 and not to another equilibrium. Returns `hint`
// unchanged when the system has no equilibria besides 0.
Vector decaying_initial_state(const GammaDelaySystem &sys, const Vector &hint);
Vector decaying_initial_state(const PoissonDelaySystem &sys, const Vector &hint);

// Header `t,x1..xn,norm` (or `k,...`), 9 significant digits.
void write_trajectory_csv(std::ostream &os, const Trajectory &traj);

} // namespace dlcert
