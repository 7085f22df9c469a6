#include "dlcert/error.hpp"
#include "dlcert/linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace dlcert;

TEST_SUITE("linalg") {

TEST_CASE("identity and diagonal spectra") {
  auto e = eig_sym(SymMatrix::identity(3));
  CHECK(e.values == std::vector<double>{1, 1, 1});
  e = eig_sym(SymMatrix::diagonal({3, 1, 2}));
  REQUIRE(e.values.size() == 3);
  CHECK(e.values[0] == doctest::Approx(1));
  CHECK(e.values[1] == doctest::Approx(2));
  CHECK(e.values[2] == doctest::Approx(3));
}

TEST_CASE("min_eigenvalue and definiteness thresholds") {
  CHECK(min_eigenvalue(SymMatrix::identity(2)) == doctest::Approx(1));
  CHECK(min_eigenvalue(SymMatrix::diagonal({-5, 2})) == doctest::Approx(-5));
  CHECK(is_positive_definite(SymMatrix::identity(4), 0.0));
  CHECK_FALSE(is_positive_definite(SymMatrix::zero(2), 0.0));
  CHECK_FALSE(is_positive_definite(SymMatrix::diagonal({1e-9, 1}), 1e-8));
  CHECK(is_positive_definite(SymMatrix::diagonal({1e-7, 1}), 1e-8));
}

TEST_CASE("non-finite and non-square input is rejected") {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SymMatrix{m}, InputError);
  CHECK_THROWS_AS(SymMatrix{Matrix(2, 3)}, InputError);
}

TEST_CASE("storage is exactly symmetric from the lower triangle") {
  Matrix m(2, 2);
  m << 1, 99, 2, 3;
  SymMatrix s(m);
  CHECK(s(0, 1) == 2);
  CHECK(s(1, 0) == 2);
  s.set(0, 1, 7);
  CHECK(s(1, 0) == 7);
}

TEST_CASE("random 8x8 spectra match the Sturm bisection oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::random_symmetric(rng, 8, 3.0);
    const auto ours = eig_sym(SymMatrix(a));
    const auto ref = oracle::sturm_eigenvalues(a);
    for (int i = 0; i < 8; ++i)
      CHECK(ours.values[std::size_t(i)] == doctest::Approx(ref[std::size_t(i)]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("reconstruction and orthogonality, dims up to 16") {
  std::mt19937_64 rng(5);
  for (Eigen::Index n : {1, 2, 5, 9, 16}) {
    const Matrix a = oracle::random_symmetric(rng, n);
    const auto e = eig_sym(SymMatrix(a));
    Matrix lam = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      lam(i, i) = e.values[std::size_t(i)];
    const double fro = a.norm();
    CHECK((a * e.vectors - e.vectors * lam).norm() <= 1e-10 * (1 + fro));
    CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <=
          1e-12);
    for (std::size_t i = 1; i < e.values.size(); ++i)
      CHECK(e.values[i - 1] <= e.values[i]);
  }
}

TEST_CASE("trace and Frobenius identities over 1000 random matrices") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 12);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix a = oracle::random_symmetric(rng, dim(rng), 10.0);
    const auto e = eig_sym(SymMatrix(a));
    double sum = 0, sq = 0;
    for (double v : e.values) {
      sum += v;
      sq += v * v;
    }
    const double tr = a.trace();
    const double scale = std::max(1.0, a.cwiseAbs().sum());
    if (std::abs(sum - tr) > 1e-9 * scale)
      ++bad;
    if (std::abs(std::sqrt(sq) - a.norm()) > 1e-9 * a.norm())
      ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("eig_sym is deterministic") {
  std::mt19937_64 rng(9);
  const SymMatrix a(oracle::random_symmetric(rng, 10));
  const auto e1 = eig_sym(a), e2 = eig_sym(a);
  CHECK(e1.values == e2.values);
  CHECK(e1.vectors == e2.vectors);
}

TEST_CASE("repeated eigenvalues keep orthonormal vectors") {
  Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::Random(6, 6)).householderQ();
  Vector d(6);
  d << 2, 2, 2, -1, -1, 5;
  const Matrix a = q * d.asDiagonal() * q.transpose();
  const auto e = eig_sym(SymMatrix(Matrix(0.5 * (a + a.transpose()))));
  CHECK(e.values[0] == doctest::Approx(-1));
  CHECK(e.values[4] == doctest::Approx(2));
  CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(6, 6)).norm() < 1e-12);
}

}
