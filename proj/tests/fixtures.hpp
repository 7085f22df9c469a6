#pragma once
// The two worked examples and their reduced forms.

#include "dlcert/gamma_cert.hpp"
#include "dlcert/poisson_cert.hpp"
#include "dlcert/reduction.hpp"

namespace fixtures {

inline dlcert::GammaDelaySystem two_cars(double T = 0.1, double h = 0.01) {
  dlcert::GammaDelaySystem s;
  s.A = dlcert::Matrix::Zero(2, 2);
  s.A1.resize(2, 2);
  s.A1 << -2, 2, 2, -2;
  s.N = 2;
  s.T = T;
  s.h = h;
  return s;
}

// Consensus mode of the two-cars system: the scalar A = 0, A1 = -4.
inline dlcert::GammaDelaySystem two_cars_reduced(double T = 0.1, double h = 0.01) {
  auto s = two_cars(T, h);
  const auto q = dlcert::equilibrium_quotient(s.A, s.A1, dlcert::TimeDomain::Continuous);
  s.A = q->A;
  s.A1 = q->A1;
  return s;
}

inline dlcert::PoissonDelaySystem example2(double lambda = 1.0, int h = 0) {
  dlcert::PoissonDelaySystem s;
  s.A.resize(2, 2);
  s.A << -0.5, 0, 0, 1;
  s.A1.resize(2, 2);
  s.A1 << -0.5, 0.8, 0.5, -0.2;
  s.lambda = lambda;
  s.h = h;
  return s;
}

} // namespace fixtures
