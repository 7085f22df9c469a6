#include "dlcert/sdp.hpp"

#include "dlcert/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace dlcert {

// ---------------------------------------------------------------------------
// Problem model

VarRef FeasibilityProblem::add_variable(std::string name, Eigen::Index dim) {
  if (dim < 1)
    throw ModelError("variable '" + name + "' must have dim >= 1");
  for (const auto &v : vars_)
    if (v.name == name)
      throw ModelError("duplicate variable name '" + name + "'");
  MatVarSpec spec{std::move(name), dim, scalars_};
  scalars_ += spec.scalar_count();
  vars_.push_back(std::move(spec));
  return VarRef{vars_.size() - 1};
}

void FeasibilityProblem::add_block(AffineBlock block) { blocks_.push_back(std::move(block)); }

void FeasibilityProblem::add_positivity_block(VarRef v) {
  const MatVarSpec &spec = variable(v);
  AffineBlock b;
  b.label = spec.name;
  b.constant = SymMatrix::zero(spec.dim);
  for (Eigen::Index c = 0; c < spec.dim; ++c) {
    for (Eigen::Index r = c; r < spec.dim; ++r) {
      SymMatrix e(spec.dim);
      e.set(r, c, 1.0);
      b.coefficients.emplace(scalar_index(v, r, c), std::move(e));
    }
  }
  b.positivity_of = v.index;
  blocks_.push_back(std::move(b));
}

void FeasibilityProblem::add_block_with_kernel(AffineBlock block, const Matrix &kernel) {
  const Eigen::Index d = block.dim();
  if (kernel.rows() != d || kernel.cols() < 1 || kernel.cols() >= d)
    throw ModelError("kernel for block '" + block.label + "' has the wrong shape");
  Eigen::HouseholderQR<Matrix> qr(kernel);
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Eigen::Index r = kernel.cols();
  if (qr.matrixQR().diagonal().head(r).cwiseAbs().minCoeff() <=
      1e-12 * kernel.cwiseAbs().maxCoeff())
    throw ModelError("kernel for block '" + block.label + "' is rank deficient");
  const Matrix k = q.leftCols(r);
  const Matrix u = q.rightCols(d - r);

  const Matrix c0 = block.constant.dense();
  if ((c0 * k).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c0.cwiseAbs().maxCoeff()))
    throw ModelError("block '" + block.label + "' has a constant part acting on the kernel");
  const Eigen::Index rows = d * r;
  std::vector<Vector> eq(static_cast<std::size_t>(rows), Vector::Zero(scalars_));
  for (const auto &[idx, c] : block.coefficients) {
    if (idx >= scalars_)
      throw ModelError("block '" + block.label + "' references an unknown scalar");
    const Matrix ck = c.dense() * k;
    for (Eigen::Index i = 0; i < rows; ++i)
      eq[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(idx)) = ck(i % d, i / d);
  }
  for (auto &e : eq)
    if (!e.isZero(0.0))
      equalities_.push_back(std::move(e));

  AffineBlock out;
  out.label = block.label + "|ker";
  out.constant = SymMatrix(Matrix(u.transpose() * c0 * u));
  for (const auto &[idx, c] : block.coefficients)
    out.coefficients.emplace(idx, SymMatrix(Matrix(u.transpose() * c.dense() * u)));
  blocks_.push_back(std::move(out));
}

std::size_t FeasibilityProblem::scalar_index(VarRef v, Eigen::Index row, Eigen::Index col) const {
  const MatVarSpec &spec = variable(v);
  if (row < col)
    std::swap(row, col);
  if (col < 0 || row >= spec.dim)
    throw ModelError("entry out of range for variable '" + spec.name + "'");
  // Columns before `col` hold dim, dim-1, ... lower-triangular entries.
  const Eigen::Index before = col * spec.dim - col * (col - 1) / 2;
  return spec.offset + static_cast<std::size_t>(before + (row - col));
}

SymMatrix FeasibilityProblem::variable_value(VarRef v, const Vector &y) const {
  const MatVarSpec &spec = variable(v);
  if (static_cast<std::size_t>(y.size()) != scalars_)
    throw InputError("assignment length does not match scalar-variable count");
  SymMatrix m(spec.dim);
  for (Eigen::Index c = 0; c < spec.dim; ++c)
    for (Eigen::Index r = c; r < spec.dim; ++r)
      m.set(r, c, y(static_cast<Eigen::Index>(scalar_index(v, r, c))));
  return m;
}

void FeasibilityProblem::validate() const {
  if (blocks_.empty())
    throw ModelError("feasibility problem has no blocks");
  std::set<std::string> names;
  for (const auto &v : vars_) {
    if (v.dim < 1)
      throw ModelError("variable '" + v.name + "' has dim < 1");
    if (!names.insert(v.name).second)
      throw ModelError("duplicate variable name '" + v.name + "'");
  }
  for (const auto &b : blocks_) {
    if (b.constant.dim() < 1)
      throw ModelError("block '" + b.label + "' has no constant part");
    if (!b.constant.dense().allFinite())
      throw ModelError("block '" + b.label + "' has non-finite constant");
    for (const auto &[k, c] : b.coefficients) {
      if (k >= scalars_)
        throw ModelError("block '" + b.label + "' references scalar " + std::to_string(k) +
                         " beyond the variable range");
      if (c.dim() != b.dim())
        throw ModelError("block '" + b.label + "' has a coefficient of mismatched dim");
      if (!c.dense().allFinite())
        throw ModelError("block '" + b.label + "' has a non-finite coefficient");
    }
    if (b.positivity_of && *b.positivity_of >= vars_.size())
      throw ModelError("block '" + b.label + "' marks an unknown variable");
  }
  for (const auto &e : equalities_)
    if (static_cast<std::size_t>(e.size()) != scalars_ || !e.allFinite())
      throw ModelError("equality row does not match the scalar-variable count");
}

bool FeasibilityProblem::is_homogeneous() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const AffineBlock &b) { return b.constant.dense().isZero(0.0); });
}

bool FeasibilityProblem::has_all_positivity_blocks() const {
  std::vector<bool> seen(vars_.size(), false);
  for (const auto &b : blocks_)
    if (b.positivity_of)
      seen[*b.positivity_of] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
}

// ---------------------------------------------------------------------------
// Expression builder

LmiExpr::LmiExpr(const FeasibilityProblem &problem, Eigen::Index dim)
    : problem_(problem), dim_(dim), constant_(Matrix::Zero(dim, dim)) {
  if (dim < 1)
    throw ModelError("block dimension must be >= 1");
}

LmiExpr &LmiExpr::add_constant(const Matrix &c) {
  if (c.rows() != dim_ || c.cols() != dim_)
    throw ModelError("constant term has wrong shape");
  constant_ += c;
  return *this;
}

Matrix &LmiExpr::coefficient(std::size_t k) {
  auto it = coeffs_.find(k);
  if (it == coeffs_.end())
    it = coeffs_.emplace(k, Matrix::Zero(dim_, dim_)).first;
  return it->second;
}

LmiExpr &LmiExpr::add_congruence(VarRef v, const Matrix &f, double scale) {
  const MatVarSpec &spec = problem_.variable(v);
  if (f.rows() != spec.dim || f.cols() != dim_)
    throw ModelError("congruence factor for '" + spec.name + "' has wrong shape");
  for (Eigen::Index c = 0; c < spec.dim; ++c) {
    for (Eigen::Index r = c; r < spec.dim; ++r) {
      // F^T E_rc F with E_rc the symmetric unit matrix at (r,c).
      Matrix term = f.row(r).transpose() * f.row(c);
      if (r != c)
        term += f.row(c).transpose() * f.row(r);
      coefficient(problem_.scalar_index(v, r, c)) += scale * term;
    }
  }
  return *this;
}

LmiExpr &LmiExpr::add_sym_product(VarRef v, const Matrix &l, const Matrix &r, double scale) {
  const MatVarSpec &spec = problem_.variable(v);
  if (l.rows() != spec.dim || l.cols() != dim_ || r.rows() != spec.dim || r.cols() != dim_)
    throw ModelError("product factors for '" + spec.name + "' have wrong shape");
  for (Eigen::Index c = 0; c < spec.dim; ++c) {
    for (Eigen::Index rr = c; rr < spec.dim; ++rr) {
      Matrix half = l.row(rr).transpose() * r.row(c);
      if (rr != c)
        half += l.row(c).transpose() * r.row(rr);
      coefficient(problem_.scalar_index(v, rr, c)) += scale * (half + half.transpose());
    }
  }
  return *this;
}

AffineBlock LmiExpr::finish(std::string label) const {
  AffineBlock b;
  b.label = std::move(label);
  b.constant = SymMatrix(constant_);
  for (const auto &[k, c] : coeffs_)
    if (!c.isZero(0.0))
      b.coefficients.emplace(k, SymMatrix(c));
  return b;
}

// ---------------------------------------------------------------------------
// Evaluation

const char *to_string(Verdict v) {
  switch (v) {
  case Verdict::Feasible:
    return "Feasible";
  case Verdict::Infeasible:
    return "Infeasible";
  case Verdict::Indeterminate:
    return "Indeterminate";
  }
  return "?";
}

std::vector<SymMatrix> evaluate_blocks(const FeasibilityProblem &p, const Vector &y) {
  if (static_cast<std::size_t>(y.size()) != p.scalar_count())
    throw InputError("assignment length " + std::to_string(y.size()) +
                     " does not match scalar-variable count " +
                     std::to_string(p.scalar_count()));
  if (!y.allFinite())
    throw InputError("assignment has non-finite entries");
  std::vector<SymMatrix> out;
  out.reserve(p.blocks().size());
  for (const auto &b : p.blocks()) {
    Matrix m = b.constant.dense();
    for (const auto &[k, c] : b.coefficients)
      m += y(static_cast<Eigen::Index>(k)) * c.dense();
    out.emplace_back(m);
  }
  return out;
}

double certify_assignment(const FeasibilityProblem &p, const Vector &y) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto &m : evaluate_blocks(p, y))
    best = std::min(best, min_eigenvalue(m));
  return best;
}

double equality_residual(const FeasibilityProblem &p, const Vector &y) {
  double r = 0.0;
  for (const auto &e : p.equalities())
    r = std::max(r, std::abs(e.dot(y)));
  return r;
}

// ---------------------------------------------------------------------------
// Barrier method:  maximize t  s.t.  B_j(x) - t I > 0,  A x + b > 0.

namespace {

struct DenseBlock {
  Matrix constant;
  std::vector<std::pair<Eigen::Index, Matrix>> coeffs;
};

struct LinearRows {
  Matrix a; // rows x p
  Vector b;
};

struct BarrierOutcome {
  Vector x;
  double t = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

class MarginMaximizer {
public:
  MarginMaximizer(std::vector<DenseBlock> blocks, LinearRows rows, Eigen::Index p)
      : blocks_(std::move(blocks)), rows_(std::move(rows)), p_(p) {
    theta_ = static_cast<double>(rows_.b.size());
    for (const auto &b : blocks_)
      theta_ += static_cast<double>(b.constant.rows());
  }

  // `decided(t, upper)` may end the path early once the caller has enough.
  template <class Decided>
  BarrierOutcome run(Vector x, const SolveOptions &opts, Decided decided) const {
    BarrierOutcome out;
    double t = std::numeric_limits<double>::infinity();
    for (const auto &b : blocks_)
      t = std::min(t, min_eigenvalue(SymMatrix(evaluate(b, x))));
    t -= 1.0;

    double s = 1.0;
    constexpr double growth = 10.0;
    Vector last_x = x;
    double last_t = t;
    for (int stage = 0; stage < 60; ++stage) {
      if (!center(x, t, s, opts.max_iters, out.iterations)) {
        // Keep the last centered point; its gap bound is still valid.
        x = last_x;
        t = last_t;
        break;
      }
      last_x = x;
      last_t = t;
      out.upper = t + theta_ / s;
      if (theta_ / s < opts.gap_tol || decided(t, out.upper))
        break;
      s *= growth;
    }
    out.x = std::move(x);
    out.t = t;
    return out;
  }

private:
  Matrix evaluate(const DenseBlock &b, const Vector &x) const {
    Matrix m = b.constant;
    for (const auto &[k, c] : b.coeffs)
      m += x(k) * c;
    return m;
  }

  // Barrier value, or +inf outside the domain.
  double objective(const Vector &x, double t, double s) const {
    double f = -s * t;
    for (const auto &b : blocks_) {
      Matrix m = evaluate(b, x);
      m.diagonal().array() -= t;
      Eigen::LLT<Matrix> llt(m);
      if (llt.info() != Eigen::Success)
        return std::numeric_limits<double>::infinity();
      const auto d = llt.matrixLLT().diagonal();
      if ((d.array() <= 0.0).any())
        return std::numeric_limits<double>::infinity();
      f -= 2.0 * d.array().log().sum();
    }
    if (rows_.b.size() > 0) {
      const Vector l = rows_.a * x + rows_.b;
      if ((l.array() <= 0.0).any())
        return std::numeric_limits<double>::infinity();
      f -= l.array().log().sum();
    }
    return f;
  }

  bool center(Vector &x, double &t, double s, int max_iters, int &iterations) const {
    const Eigen::Index nv = p_ + 1; // x then t
    for (int it = 0; it < max_iters; ++it) {
      ++iterations;
      Vector g = Vector::Zero(nv);
      Matrix h = Matrix::Zero(nv, nv);
      g(p_) = -s;
      for (const auto &b : blocks_) {
        Matrix m = evaluate(b, x);
        m.diagonal().array() -= t;
        Eigen::LLT<Matrix> llt(m);
        if (llt.info() != Eigen::Success)
          return false;
        const Eigen::Index d = m.rows();
        const Matrix linv = llt.matrixL().solve(Matrix::Identity(d, d));
        const auto q = static_cast<Eigen::Index>(b.coeffs.size());
        Matrix stacked(d * d, q + 1);
        for (Eigen::Index i = 0; i < q; ++i) {
          Matrix mi = linv * b.coeffs[static_cast<std::size_t>(i)].second * linv.transpose();
          stacked.col(i) = Eigen::Map<const Vector>(mi.data(), d * d);
        }
        Matrix mt = -(linv * linv.transpose());
        stacked.col(q) = Eigen::Map<const Vector>(mt.data(), d * d);
        const Matrix gram = stacked.transpose() * stacked;
        for (Eigen::Index i = 0; i <= q; ++i) {
          const Eigen::Index vi = i < q ? b.coeffs[static_cast<std::size_t>(i)].first : p_;
          const Eigen::Map<const Matrix> mi(stacked.col(i).data(), d, d);
          g(vi) -= mi.trace();
          for (Eigen::Index j = 0; j <= q; ++j) {
            const Eigen::Index vj = j < q ? b.coeffs[static_cast<std::size_t>(j)].first : p_;
            h(vi, vj) += gram(i, j);
          }
        }
      }
      if (rows_.b.size() > 0) {
        const Vector l = rows_.a * x + rows_.b;
        if ((l.array() <= 0.0).any())
          return false;
        const Vector inv = l.cwiseInverse();
        g.head(p_) -= rows_.a.transpose() * inv;
        h.topLeftCorner(p_, p_) += rows_.a.transpose() * inv.cwiseAbs2().asDiagonal() * rows_.a;
      }
      if (!g.allFinite() || !h.allFinite())
        return false;

      Eigen::LDLT<Matrix> ldlt(h);
      Vector dx = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        const double ridge = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        h.diagonal().array() += ridge;
        dx = h.ldlt().solve(-g);
        if (!dx.allFinite())
          return false;
      }
      const double decrement = -g.dot(dx);
      if (decrement < 0.0)
        return false;
      if (decrement / 2.0 < 1e-10)
        return true;

      const double f0 = objective(x, t, s);
      double alpha = 1.0;
      for (;;) {
        const Vector xn = x + alpha * dx.head(p_);
        const double tn = t + alpha * dx(p_);
        const double fn = objective(xn, tn, s);
        if (std::isfinite(fn) && fn <= f0 - 0.25 * alpha * decrement) {
          x = xn;
          t = tn;
          break;
        }
        alpha *= 0.5;
        if (alpha < 1e-14)
          // No progress possible at working precision; treat as centered
          // if the decrement is already small, else as a breakdown.
          return decrement < 1e-6;
      }
    }
    return false;
  }

  std::vector<DenseBlock> blocks_;
  LinearRows rows_;
  Eigen::Index p_;
  double theta_ = 0.0;
};

// Blocks in terms of z where y = offset + map * z.
std::vector<DenseBlock> reparametrize(const FeasibilityProblem &p, const Vector &offset,
                                      const Matrix &map) {
  std::vector<DenseBlock> out;
  for (const auto &b : p.blocks()) {
    DenseBlock r;
    r.constant = b.constant.dense();
    std::map<Eigen::Index, Matrix> acc;
    for (const auto &[idx, sc] : b.coefficients) {
      const auto k = static_cast<Eigen::Index>(idx);
      const Matrix c = sc.dense();
      if (offset(k) != 0.0)
        r.constant += offset(k) * c;
      for (Eigen::Index col = 0; col < map.cols(); ++col) {
        if (map(k, col) == 0.0)
          continue;
        auto it = acc.find(col);
        if (it == acc.end())
          it = acc.emplace(col, Matrix::Zero(c.rows(), c.cols())).first;
        it->second += map(k, col) * c;
      }
    }
    for (auto &[col, c] : acc)
      r.coeffs.emplace_back(col, std::move(c));
    out.push_back(std::move(r));
  }
  return out;
}

// |y_i| <= radius for y = offset + map * z.
LinearRows box_rows(const Vector &offset, const Matrix &map, double radius) {
  const Eigen::Index m = map.rows();
  LinearRows rows;
  rows.a = Matrix::Zero(2 * m, map.cols());
  rows.b = Vector::Zero(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    rows.a.row(2 * i) = -map.row(i);
    rows.b(2 * i) = radius - offset(i);
    rows.a.row(2 * i + 1) = map.row(i);
    rows.b(2 * i + 1) = radius + offset(i);
  }
  return rows;
}

// Orthonormal basis of { y : e^T y = 0 for every equality row }.
Matrix feasible_subspace(const FeasibilityProblem &p) {
  const auto m = static_cast<Eigen::Index>(p.scalar_count());
  if (p.equalities().empty())
    return Matrix::Identity(m, m);
  Matrix e(static_cast<Eigen::Index>(p.equalities().size()), m);
  for (std::size_t i = 0; i < p.equalities().size(); ++i)
    e.row(static_cast<Eigen::Index>(i)) = p.equalities()[i].transpose();
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullV);
  const Vector &sv = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut)
    ++rank;
  return svd.matrixV().rightCols(m - rank);
}

struct TraceOutcome {
  Vector y;
  double margin = 0.0;
  double upper = 0.0;
  int iterations = 0;
  bool ran = false;
};

// Maximizes the margin on { sum_k tr(V_k) = sum_k dim(V_k) } intersected with
// the box |y| <= sum dim and the equality subspace y = basis * z. Every
// strictly feasible point of a homogeneous problem with positivity blocks
// rescales into that set, so a negative maximum proves infeasibility.
TraceOutcome trace_normalized_margin(const FeasibilityProblem &p, const Matrix &basis,
                                     const SolveOptions &opts) {
  TraceOutcome out;
  const auto m = static_cast<Eigen::Index>(p.scalar_count());
  const Eigen::Index r = basis.cols();
  Vector a = Vector::Zero(m);
  double total = 0.0;
  for (std::size_t v = 0; v < p.variables().size(); ++v) {
    const auto &spec = p.variables()[v];
    total += static_cast<double>(spec.dim);
    for (Eigen::Index i = 0; i < spec.dim; ++i)
      a(static_cast<Eigen::Index>(p.scalar_index(VarRef{v}, i, i))) = 1.0;
  }
  const Vector c = basis.transpose() * a;
  Eigen::Index pivot = 0;
  if (c.cwiseAbs().maxCoeff(&pivot) < 1e-12)
    return out;

  // z = z0 + f w, with w dropping the pivot and c^T z = total.
  Vector z0 = Vector::Zero(r);
  z0(pivot) = total / c(pivot);
  Matrix f = Matrix::Zero(r, r - 1);
  for (Eigen::Index i = 0, col = 0; i < r; ++i) {
    if (i == pivot)
      continue;
    f(i, col) = 1.0;
    f(pivot, col) = -c(i) / c(pivot);
    ++col;
  }
  const Vector y0 = basis * z0;
  const Matrix e = basis * f;

  // Start from the projection of V_k = I onto the subspace.
  Vector zs = c * (total / c.squaredNorm());
  Vector w0(r - 1);
  for (Eigen::Index i = 0, col = 0; i < r; ++i)
    if (i != pivot)
      w0(col++) = zs(i);
  // An assignment with t >= 0 has every V_k >= 0, hence |y| <= total; any
  // larger box is as good, and it has to contain the start.
  const double radius = std::max(total, 2.0 * (basis * zs).cwiseAbs().maxCoeff() + 1.0);
  LinearRows rows = box_rows(y0, e, radius);
  if (rows.b.size() > 0 && ((rows.a * w0 + rows.b).array() <= 0.0).any())
    return out;

  MarginMaximizer solver(reparametrize(p, y0, e), std::move(rows), r - 1);
  const double tol = opts.margin_tol;
  const bool early = opts.stop_when_decided;
  BarrierOutcome res = solver.run(std::move(w0), opts, [&](double t, double upper) {
    return early && (upper < -tol || t > tol);
  });

  out.y = y0 + e * res.x;
  out.margin = certify_assignment(p, out.y);
  out.upper = res.upper;

  out.iterations = res.iterations;
  out.ran = true;
  return out;
}

} // namespace

FeasibilityResult solve_feasibility(const FeasibilityProblem &p, const SolveOptions &opts) {
  const auto start = std::chrono::steady_clock::now();
  p.validate();
  if (!(opts.margin_tol >= 0.0) || opts.max_iters < 1 || !(opts.gap_tol > 0.0))
    throw ModelError("invalid solver options");

  FeasibilityResult res;
  const double tol = opts.margin_tol;
  const auto m = static_cast<Eigen::Index>(p.scalar_count());
  const auto finish = [&]() {
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  };

  const Matrix basis = feasible_subspace(p);
  const Eigen::Index r = basis.cols();
  if (r == 0) {
    const Vector y = Vector::Zero(m);
    res.margin = certify_assignment(p, y);
    res.upper_bound = res.margin;
    if (res.margin > tol) {
      res.status = Verdict::Feasible;
      res.assignment = y;
    } else if (res.margin < -tol) {
      res.status = Verdict::Infeasible;
    }
    return finish();
  }

  const bool homogeneous = p.is_homogeneous();
  const bool early = opts.stop_when_decided;
  const Vector origin = Vector::Zero(m);
  MarginMaximizer solver(reparametrize(p, origin, basis), box_rows(origin, basis, 1.0), r);
  BarrierOutcome box = solver.run(Vector::Zero(r), opts, [&](double t, double upper) {
    if (!early)
      return false;
    // A homogeneous problem never has a negative box margin, so only the
    // upper bound dropping below tol settles it here.
    return t > tol || upper < (homogeneous ? tol : -tol);
  });
  const Vector y = basis * box.x;
  res.iterations = box.iterations;
  res.margin = certify_assignment(p, y);
  res.upper_bound = std::max(box.upper, res.margin);

  if (res.margin > tol) {
    res.status = Verdict::Feasible;
    res.assignment = y;
    return finish();
  }
  if (res.upper_bound < -tol) {
    res.status = Verdict::Infeasible;
    return finish();
  }
  if (homogeneous && p.has_all_positivity_blocks()) {
    TraceOutcome tr = trace_normalized_margin(p, basis, opts);
    res.iterations += tr.iterations;
    if (tr.ran && tr.upper < -tol) {
      res.status = Verdict::Infeasible;
      res.margin = tr.margin;
      res.upper_bound = tr.upper;
      res.used_trace_normalization = true;
    } else if (tr.ran && tr.margin > tol) {
      // Rescale into the unit box; homogeneity keeps it feasible.
      Vector ys = tr.y / tr.y.cwiseAbs().maxCoeff();
      const double margin = certify_assignment(p, ys);
      if (margin > tol) {
        res.status = Verdict::Feasible;
        res.margin = margin;
        res.assignment = std::move(ys);
      }
    }
  }
  return finish();
}

} // namespace dlcert
