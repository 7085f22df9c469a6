#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace dlcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense real symmetric matrix. The lower triangle is authoritative; the
// stored matrix is always exactly symmetric.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(Eigen::Index dim);
  // Symmetrizes from the lower triangle of `m`. Throws InputError when `m`
  // is not square, empty or has non-finite entries.
  explicit SymMatrix(const Matrix &m);

  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(std::initializer_list<double> d);
  static SymMatrix diagonal(const Vector &d);

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Matrix &dense() const { return m_; }

  // Sets both (i,j) and (j,i).
  void set(Eigen::Index i, Eigen::Index j, double v);

  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }

  SymMatrix operator+(const SymMatrix &o) const;
  SymMatrix operator-(const SymMatrix &o) const;
  SymMatrix operator*(double s) const;
  SymMatrix &operator+=(const SymMatrix &o);
  bool operator==(const SymMatrix &o) const { return m_ == o.m_; }

private:
  Matrix m_;
};

struct EigenDecomposition {
  std::vector<double> values; // ascending
  Matrix vectors;             // columns are eigenvectors, orthonormal
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver. Stops once the off-diagonal Frobenius norm is
// below 1e-14 * ||m||_F; at most 100 sweeps.
EigenDecomposition eig_sym(const SymMatrix &m);

double min_eigenvalue(const SymMatrix &m);

// True iff min_eigenvalue(m) > tol.
bool is_positive_definite(const SymMatrix &m, double tol = 0.0);

} // namespace dlcert
