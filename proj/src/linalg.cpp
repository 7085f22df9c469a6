#include "dlcert/linalg.hpp"

#include "dlcert/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dlcert {

namespace {

void require_finite(const Matrix &m) {
  if (!m.allFinite())
    throw InputError("matrix has non-finite entries");
}

double off_diagonal_norm(const Matrix &a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = j + 1; i < a.rows(); ++i)
      s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

} // namespace

SymMatrix::SymMatrix(Eigen::Index dim) : m_(Matrix::Zero(dim, dim)) {
  if (dim < 1)
    throw InputError("SymMatrix dimension must be >= 1");
}

SymMatrix::SymMatrix(const Matrix &m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InputError("SymMatrix requires a non-empty square matrix");
  require_finite(m);
  m_ = m.triangularView<Eigen::Lower>();
  m_.triangularView<Eigen::StrictlyUpper>() = m_.transpose();
}

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(dim); }

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  SymMatrix s(dim);
  s.m_.setIdentity();
  return s;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::copy(d.begin(), d.end(), v.data());
  return diagonal(v);
}

SymMatrix SymMatrix::diagonal(const Vector &d) {
  Matrix m = d.asDiagonal();
  return SymMatrix(m);
}

void SymMatrix::set(Eigen::Index i, Eigen::Index j, double v) {
  if (!std::isfinite(v))
    throw InputError("non-finite entry");
  m_(i, j) = v;
  m_(j, i) = v;
}

SymMatrix SymMatrix::operator+(const SymMatrix &o) const {
  SymMatrix r = *this;
  r += o;
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix &o) const {
  if (o.dim() != dim())
    throw InputError("dimension mismatch");
  SymMatrix r = *this;
  r.m_ -= o.m_;
  return r;
}

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix r = *this;
  r.m_ *= s;
  return r;
}

SymMatrix &SymMatrix::operator+=(const SymMatrix &o) {
  if (o.dim() != dim())
    throw InputError("dimension mismatch");
  m_ += o.m_;
  return *this;
}

EigenDecomposition eig_sym(const SymMatrix &m) {
  const Matrix &src = m.dense();
  require_finite(src);
  const Eigen::Index n = src.rows();
  Matrix a = src;
  Matrix v = Matrix::Identity(n, n);

  const double threshold = 1e-14 * src.norm();
  constexpr int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold)
      break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0)
          continue;
        // Rutishauser's stable rotation.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_diagonal_norm(a) > threshold)
    throw InputError("Jacobi eigensolver did not converge in 100 sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.reserve(order.size());
  out.vectors.resize(n, n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values.push_back(a(order[k], order[k]));
    out.vectors.col(static_cast<Eigen::Index>(k)) = v.col(order[k]);
  }
  return out;
}

double min_eigenvalue(const SymMatrix &m) { return eig_sym(m).values.front(); }

bool is_positive_definite(const SymMatrix &m, double tol) {
  if (!(tol >= 0.0))
    throw InputError("tolerance must be non-negative");
  return min_eigenvalue(m) > tol;
}

} // namespace dlcert
