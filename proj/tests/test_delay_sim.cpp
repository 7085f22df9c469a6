#include "dlcert/delay_sim.hpp"
#include "dlcert/error.hpp"
#include "fixtures.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

using namespace dlcert;

namespace {

GammaDelaySystem scalar_gamma(double T, double h) {
  GammaDelaySystem s;
  s.A = Matrix::Constant(1, 1, -1.0);
  s.A1 = Matrix::Constant(1, 1, -0.5);
  s.N = 2;
  s.T = T;
  s.h = h;
  return s;
}

// Linear chain for N = 2, h = 0 and constant history:
// z1' = (x - z1)/T, z2' = (z1 - z2)/T, x' = A x + A1 z2, z1(0) = z2(0) = phi.
double chain_solution(const GammaDelaySystem &s, double phi, double t) {
  const double a = s.A(0, 0), a1 = s.A1(0, 0), T = s.T;
  Matrix M(3, 3);
  M << a, 0, a1, 1 / T, -1 / T, 0, 0, 1 / T, -1 / T;
  const Vector z0 = Vector::Constant(3, phi);
  return (Matrix(M * t).exp() * z0)(0);
}

} // namespace

TEST_SUITE("delay_sim") {

TEST_CASE("history buffer reads") {
  HistoryBuffer hb(Vector::Constant(1, 2.0), 0.5, 4);
  CHECK(hb.at_time(-1.0)[0] == 2.0);
  hb.push(Vector::Constant(1, 4.0));
  hb.push(Vector::Constant(1, 6.0));
  CHECK(hb.count() == 2);
  CHECK(hb.at_index(1)[0] == 6.0);
  CHECK(hb.at_index(-3)[0] == 2.0);
  CHECK(hb.at_time(0.25)[0] == doctest::Approx(5.0));
  CHECK(hb.at_time(-0.25)[0] == doctest::Approx(3.0));
  CHECK(hb.at_time(3.0)[0] == 6.0);
  // 1 * x(0.5) + 2 * x(0)
  CHECK(hb.weighted_window(0.5, Vector{{1.0, 2.0}})[0] == doctest::Approx(14.0));
  CHECK(hb.weighted_window(0.25, Vector{{1.0, 1.0}})[0] == doctest::Approx(8.0));
}

TEST_CASE("gamma simulator matches the linear-chain matrix exponential") {
  const auto s = scalar_gamma(0.5, 0.0);
  GammaSimOptions o;
  o.horizon = 10.0;
  const auto tr = simulate_gamma(s, Vector::Constant(1, 1.0), o);
  REQUIRE(tr.size() > 1000);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); i += 100)
    worst = std::max(worst, std::abs(tr.x[i][0] - chain_solution(s, 1.0, tr.time[i])));
  CHECK(worst < 1e-4);
  CHECK_FALSE(tr.discrete);
  CHECK(tr.time.back() == doctest::Approx(10.0));
}

TEST_CASE("gamma simulator converges in dt and tail truncation") {
  const auto s = scalar_gamma(0.5, 0.2);
  const Vector phi = Vector::Constant(1, 1.0);
  GammaSimOptions o;
  o.horizon = 10.0;
  const auto base = simulate_gamma(s, phi, o);
  auto t = o;
  t.tail_eps = 5e-11;
  const auto tail = simulate_gamma(s, phi, t);
  CHECK(std::abs(tail.x.back()[0] - base.x.back()[0]) < 1e-8);
  auto d = o;
  d.dt = o.dt / 2;
  d.record_every = 2;
  const auto fine = simulate_gamma(s, phi, d);
  REQUIRE(fine.size() == base.size());
  CHECK(std::abs(fine.x.back()[0] - base.x.back()[0]) < 1e-4);
}

TEST_CASE("gamma simulator options and warnings") {
  const auto s = scalar_gamma(0.02, 0.0);
  GammaSimOptions o;
  o.horizon = 1.0;
  o.dt = 0.005;
  CHECK_FALSE(simulate_gamma(s, Vector::Ones(1), o).warnings.empty());
  o.dt = 0.001;
  CHECK(simulate_gamma(s, Vector::Ones(1), o).warnings.empty());
  o.dt = 0;
  CHECK_THROWS_AS(simulate_gamma(s, Vector::Ones(1), o), ParameterError);
  o = {};
  o.tail_eps = 1e-3;
  CHECK_THROWS_AS(simulate_gamma(s, Vector::Ones(1), o), ParameterError);
  o = {};
  CHECK_THROWS_AS(simulate_gamma(s, Vector::Ones(2), o), Error);
}

TEST_CASE("two-cars: decay below the stability limit, growth far above it") {
  const Vector hint{{1.0, -1.0}};
  auto s = fixtures::two_cars(0.1, 0.01);
  GammaSimOptions o;
  o.horizon = 60;
  auto tr = simulate_gamma(s, decaying_initial_state(s, hint), o);
  CHECK(decay_metric(tr, 1e-3));
  s = fixtures::two_cars(2.0, 0.01);
  o.horizon = 200;
  tr = simulate_gamma(s, decaying_initial_state(s, hint), o);
  CHECK_FALSE(decay_metric(tr, 1e-3));
  CHECK(tr.norm.back() > 1e3);
}

TEST_CASE("poisson simulator without feedback is the matrix power") {
  auto s = fixtures::example2();
  s.A1.setZero();
  s.A << 0.5, 0.2, -0.1, 0.8;
  PoissonSimOptions o;
  o.steps = 20;
  const Vector phi{{1.0, 2.0}};
  const auto tr = simulate_poisson(s, phi, o);
  REQUIRE(tr.size() == 21);
  CHECK(tr.discrete);
  Matrix P = Matrix::Identity(2, 2);
  for (int k = 0; k <= 20; ++k) {
    CHECK((tr.x[k] - P * phi).norm() < 1e-12);
    P = s.A * P;
  }
}

TEST_CASE("poisson simulator against a direct recursion") {
  const auto s = fixtures::example2(0.7, 2);
  const Vector phi{{0.3, -1.0}};
  PoissonSimOptions o;
  o.steps = 40;
  const auto tr = simulate_poisson(s, phi, o);
  std::vector<Vector> x{phi};
  auto at = [&](int k) { return k <= 0 ? phi : x[k]; };
  for (int k = 0; k < 40; ++k) {
    Vector f = Vector::Zero(2);
    double p = std::exp(-s.lambda);
    for (int tau = 0; tau < 60; ++tau) {
      f += p * at(k - tau - s.h);
      p *= s.lambda / (tau + 1);
    }
    x.push_back(s.A * x[k] + s.A1 * f);
  }
  for (int k = 0; k <= 40; ++k)
    CHECK((tr.x[k] - x[k]).norm() < 1e-10 * (1 + x[k].norm()));
}

TEST_CASE("Example 2 decays with the conserved quantity zeroed") {
  auto s = fixtures::example2(1.0);
  PoissonSimOptions o;
  o.steps = 2000;
  const Vector phi = decaying_initial_state(s, Vector{{1.0, -1.0}});
  const Matrix M = Matrix::Identity(2, 2) + s.A1;
  CHECK(std::abs(Vector{{1.0, 4.0}}.dot(M * phi)) < 1e-12);
  CHECK(decay_metric(simulate_poisson(s, phi, o), 1e-3));
  s.lambda = 0.01;
  CHECK_FALSE(decay_metric(simulate_poisson(s, phi, o), 1e-3));
}

TEST_CASE("Example 2 raw history settles on the predicted equilibrium") {
  const auto s = fixtures::example2(1.0);
  const Vector phi{{1.0, -1.0}};
  const Vector w{{1.0, 4.0}}, v{{2.0, 5.0}};
  const Matrix M = Matrix::Identity(2, 2) + (s.h + s.lambda) * s.A1;
  const Vector expect = w.dot(M * phi) / w.dot(M * v) * v;
  CHECK(expect[0] == doctest::Approx(-0.12));
  CHECK(expect[1] == doctest::Approx(-0.3));
  PoissonSimOptions o;
  o.steps = 3000;
  const auto tr = simulate_poisson(s, phi, o);
  CHECK((tr.x.back() - expect).norm() < 1e-6);
}

TEST_CASE("decay metric edge cases and CSV output") {
  Trajectory t;
  CHECK_THROWS(decay_metric(t, 0.1));
  t.time = {0, 1};
  t.x = {Vector::Ones(1), Vector::Zero(1)};
  t.norm = {1.0, 0.0};
  CHECK(decay_metric(t, 1e-3));
  t.norm = {1.0, 1.0};
  CHECK_FALSE(decay_metric(t, 1e-3));
  CHECK(decay_metric(t, 1.0));
  std::ostringstream os;
  write_trajectory_csv(os, t);
  CHECK(os.str().rfind("t,x1,norm\n", 0) == 0);
}

}
