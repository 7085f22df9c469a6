#include "dlcert/reduction.hpp"

#include "dlcert/error.hpp"

#include <Eigen/SVD>

namespace dlcert {

namespace {

struct Split {
  Matrix range;  // complement of the equilibria
  Matrix kernel; // equilibria
};

Split split_equilibria(const Matrix &A, const Matrix &A1, TimeDomain domain, double tol) {
  if (A.rows() != A.cols() || A1.rows() != A.rows() || A1.cols() != A.cols() || A.rows() < 1)
    throw InputError("A and A1 must be square matrices of equal dimension");
  const Eigen::Index n = A.rows();
  Matrix m = A + A1;
  if (domain == TimeDomain::Discrete)
    m -= Matrix::Identity(n, n);

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const double scale = std::max(1.0, svd.singularValues().maxCoeff());
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol * scale)
      ++rank;
  return Split{svd.matrixV().leftCols(rank), svd.matrixV().rightCols(n - rank)};
}

} // namespace

Matrix equilibrium_directions(const Matrix &A, const Matrix &A1, TimeDomain domain, double tol) {
  return split_equilibria(A, A1, domain, tol).kernel;
}

std::optional<EquilibriumQuotient> equilibrium_quotient(const Matrix &A, const Matrix &A1,
                                                        TimeDomain domain, double tol) {
  Split sp = split_equilibria(A, A1, domain, tol);
  if (sp.kernel.cols() == 0)
    return std::nullopt;
  if (sp.range.cols() == 0)
    throw InputError("every state is an equilibrium; nothing left to certify");

  EquilibriumQuotient q;
  q.basis = std::move(sp.range);
  q.equilibria = std::move(sp.kernel);
  const double a_scale = std::max({1.0, A.norm(), A1.norm()});
  // Invariance: the complement coordinates of A K and A1 K must vanish.
  if ((q.basis.transpose() * A * q.equilibria).norm() > tol * a_scale ||
      (q.basis.transpose() * A1 * q.equilibria).norm() > tol * a_scale)
    return std::nullopt;
  q.A = q.basis.transpose() * A * q.basis;
  q.A1 = q.basis.transpose() * A1 * q.basis;
  return q;
}

} // namespace dlcert
