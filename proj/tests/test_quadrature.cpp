#include "dlcert/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>

using namespace dlcert;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth integrands") {
  CHECK(integrate([](double s) { return s * s * s; }, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(integrate([](double s) { return std::exp(-s); }, 0.0, 30.0) ==
        doctest::Approx(1 - std::exp(-30.0)).epsilon(1e-13));
  CHECK(integrate([](double s) { return std::sin(s); }, 0.0, M_PI) == doctest::Approx(2).epsilon(1e-13));
}

TEST_CASE("breakpoints resolve kinks") {
  const double v = integrate([](double s) { return std::abs(s - 0.3); }, 0.0, 1.0, {0.3});
  CHECK(v == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
}

TEST_CASE("vector-valued integrands") {
  const Vector v = integrate([](double s) { return Vector{{1.0, s, s * s}}; }, 0.0, 3.0);
  CHECK(v[0] == doctest::Approx(3));
  CHECK(v[1] == doctest::Approx(4.5));
  CHECK(v[2] == doctest::Approx(9));
}

TEST_CASE("gamma tail cutoff") {
  for (double shape : {1.0, 2.0, 5.0})
    for (double scale : {0.1, 1.0})
      for (double mass : {1e-6, 1e-12}) {
        const double L = gamma_tail_cutoff(shape, scale, mass);
        CHECK(boost::math::gamma_q(shape, L / scale) <= mass * (1 + 1e-8));
        CHECK(boost::math::gamma_q(shape, 0.9 * L / scale) >= mass);
      }
}

TEST_CASE("poisson tail cutoff") {
  for (double lambda : {0.1, 1.0, 10.0})
    for (double mass : {1e-8, 1e-14}) {
      const int K = poisson_tail_cutoff(lambda, mass);
      CHECK(boost::math::gamma_p(K + 1.0, lambda) < mass);
      CHECK(poisson_tail_cutoff(lambda, mass, 4) >= K);
    }
}

}
