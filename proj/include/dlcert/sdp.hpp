#pragma once

#include "dlcert/linalg.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dlcert {

// A symmetric matrix decision variable.
struct MatVarSpec {
  std::string name;
  Eigen::Index dim = 0;
  std::size_t offset = 0; // first scalar index owned by this variable

  std::size_t scalar_count() const {
    return static_cast<std::size_t>(dim * (dim + 1) / 2);
  }
};

// Handle returned by FeasibilityProblem::add_variable.
struct VarRef {
  std::size_t index = 0;
};

// constant + sum_i y_i * coefficients[i], required to be positive definite.
struct AffineBlock {
  std::string label;
  SymMatrix constant;
  std::map<std::size_t, SymMatrix> coefficients;
  // Set when the block is exactly "variable k is positive definite".
  std::optional<std::size_t> positivity_of;

  Eigen::Index dim() const { return constant.dim(); }
};

// "Find symmetric V_1..V_m such that every block is positive definite."
// Scalar variables enumerate the lower triangle of each matrix variable
// column by column; off-diagonal scalars stand for both mirrored entries.
class FeasibilityProblem {
public:
  VarRef add_variable(std::string name, Eigen::Index dim);
  void add_block(AffineBlock block);
  // Appends the block "V > 0" for the given variable.
  void add_positivity_block(VarRef v);
  // Requires block(y) * kernel = 0 (linear equalities on y) and block(y)
  // positive definite on the orthogonal complement of range(kernel). The
  // stored block is the compressed U^T block U. Needs a zero constant part
  // on the kernel and every variable added beforehand.
  void add_block_with_kernel(AffineBlock block, const Matrix &kernel);

  const std::vector<MatVarSpec> &variables() const { return vars_; }
  const std::vector<AffineBlock> &blocks() const { return blocks_; }
  // Rows e with e^T y = 0 required of every assignment.
  const std::vector<Vector> &equalities() const { return equalities_; }
  const MatVarSpec &variable(VarRef v) const { return vars_.at(v.index); }
  std::size_t scalar_count() const { return scalars_; }

  std::size_t scalar_index(VarRef v, Eigen::Index row, Eigen::Index col) const;

  // Values of a matrix variable under an assignment.
  SymMatrix variable_value(VarRef v, const Vector &y) const;

  // Throws ModelError on dimension mismatches, duplicate names, out of range
  // coefficient keys or an empty block list.
  void validate() const;

  bool is_homogeneous() const;
  // Every matrix variable has its own positivity block.
  bool has_all_positivity_blocks() const;

private:
  std::vector<MatVarSpec> vars_;
  std::vector<AffineBlock> blocks_;
  std::vector<Vector> equalities_;
  std::size_t scalars_ = 0;
};

// Accumulates one affine block from matrix-valued terms.
class LmiExpr {
public:
  LmiExpr(const FeasibilityProblem &problem, Eigen::Index dim);

  LmiExpr &add_constant(const Matrix &c);
  // scale * F^T V F
  LmiExpr &add_congruence(VarRef v, const Matrix &f, double scale = 1.0);
  // scale * (L^T V R + R^T V L)
  LmiExpr &add_sym_product(VarRef v, const Matrix &l, const Matrix &r, double scale = 1.0);

  AffineBlock finish(std::string label) const;

private:
  Matrix &coefficient(std::size_t k);

  const FeasibilityProblem &problem_;
  Eigen::Index dim_;
  Matrix constant_;
  std::map<std::size_t, Matrix> coeffs_;
};

enum class Verdict { Feasible, Infeasible, Indeterminate };

const char *to_string(Verdict v);

struct SolveOptions {
  double margin_tol = 1e-10;
  int max_iters = 500;     // Newton iterations per barrier stage
  double gap_tol = 1e-11;  // resolution on the maximal margin
  // Stop as soon as the verdict is settled instead of converging the margin.
  bool stop_when_decided = false;
};

struct FeasibilityResult {
  Verdict status = Verdict::Indeterminate;
  // Feasible / Indeterminate: maximal min-eigenvalue over blocks subject to
  // ||y||_inf <= 1. Infeasible: the (negative) margin under the
  // trace normalization used to certify infeasibility.
  double margin = 0.0;
  double upper_bound = 0.0; // bound on the margin from the barrier gap
  std::optional<Vector> assignment;
  int iterations = 0;
  double wall_seconds = 0.0;
  bool used_trace_normalization = false;
};

// Evaluates constant + sum y_i C_i for every block.
std::vector<SymMatrix> evaluate_blocks(const FeasibilityProblem &p, const Vector &y);

// min over blocks of min_eigenvalue, from a fresh evaluation.
double certify_assignment(const FeasibilityProblem &p, const Vector &y);

// max |e^T y| over the equality rows, 0 when there are none.
double equality_residual(const FeasibilityProblem &p, const Vector &y);

FeasibilityResult solve_feasibility(const FeasibilityProblem &p,
                                    const SolveOptions &opts = {});

} // namespace dlcert
