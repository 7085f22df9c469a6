#pragma once

#include "dlcert/linalg.hpp"

#include <initializer_list>

namespace dlcert::detail {

// Horizontal concatenation of n-row blocks.
inline Matrix hcat(std::initializer_list<Matrix> parts) {
  Eigen::Index rows = parts.begin()->rows(), cols = 0;
  for (const auto &p : parts)
    cols += p.cols();
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto &p : parts) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

inline Matrix vcat(std::initializer_list<Matrix> parts) {
  Eigen::Index rows = 0, cols = parts.begin()->cols();
  for (const auto &p : parts)
    rows += p.rows();
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto &p : parts) {
    out.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return out;
}

// [0 .. I .. 0]: selects component `k` of a stacked vector of `count` n-blocks.
inline Matrix selector(Eigen::Index n, Eigen::Index k, Eigen::Index count) {
  Matrix e = Matrix::Zero(n, n * count);
  e.middleCols(k * n, n).setIdentity();
  return e;
}

} // namespace dlcert::detail
