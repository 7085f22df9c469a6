#include "dlcert/error.hpp"
#include "dlcert/reduction.hpp"
#include "fixtures.hpp"

#include <doctest.h>

using namespace dlcert;

TEST_SUITE("reduction") {

TEST_CASE("two-cars consensus line and its quotient") {
  const auto s = fixtures::two_cars();
  const Matrix E = equilibrium_directions(s.A, s.A1, TimeDomain::Continuous);
  REQUIRE(E.cols() == 1);
  CHECK(std::abs(std::abs(E(0, 0)) - std::sqrt(0.5)) < 1e-12);
  CHECK(std::abs(E(0, 0) - E(1, 0)) < 1e-12);
  const auto q = equilibrium_quotient(s.A, s.A1, TimeDomain::Continuous);
  REQUIRE(q);
  CHECK(q->A.rows() == 1);
  CHECK(std::abs(q->A(0, 0)) < 1e-12);
  CHECK(q->A1(0, 0) == doctest::Approx(-4));
  CHECK((q->basis.transpose() * q->equilibria).norm() < 1e-12);
}

TEST_CASE("Example 2 has the discrete equilibrium (2, 5) but no invariant quotient") {
  const auto s = fixtures::example2();
  const Matrix E = equilibrium_directions(s.A, s.A1, TimeDomain::Discrete);
  REQUIRE(E.cols() == 1);
  CHECK(std::abs(E(1, 0) / E(0, 0) - 2.5) < 1e-10);
  CHECK(equilibrium_directions(s.A, s.A1, TimeDomain::Continuous).cols() == 0);
  CHECK_FALSE(equilibrium_quotient(s.A, s.A1, TimeDomain::Discrete));
}

TEST_CASE("trivial and total equilibrium sets") {
  const Matrix A = -Matrix::Identity(3, 3);
  const Matrix A1 = Matrix::Zero(3, 3);
  CHECK(equilibrium_directions(A, A1, TimeDomain::Continuous).cols() == 0);
  CHECK_FALSE(equilibrium_quotient(A, A1, TimeDomain::Continuous));
  CHECK_THROWS_AS(equilibrium_quotient(Matrix::Zero(2, 2), Matrix::Zero(2, 2),
                                       TimeDomain::Continuous),
                  InputError);
}

TEST_CASE("quotient of a block-diagonal system keeps the stable block") {
  Matrix A = Matrix::Zero(3, 3), A1 = Matrix::Zero(3, 3);
  A(0, 0) = -1;
  A(1, 1) = -2;
  A1(1, 1) = 0.5;
  const auto q = equilibrium_quotient(A, A1, TimeDomain::Continuous);
  REQUIRE(q);
  CHECK(q->equilibria.cols() == 1);
  CHECK(std::abs(std::abs(q->equilibria(2, 0)) - 1) < 1e-12);
  CHECK(q->A.trace() == doctest::Approx(-3));
  CHECK(q->A1.trace() == doctest::Approx(0.5));
}

}
