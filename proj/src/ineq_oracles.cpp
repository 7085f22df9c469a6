#include "dlcert/ineq_oracles.hpp"

#include "dlcert/error.hpp"
#include "dlcert/quadrature.hpp"
#include "parallel.hpp"

#include <boost/math/special_functions/factorials.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dlcert {

// ---------------------------------------------------------------------------
// Test functions

TestFunction::TestFunction(const TestFunctionSpec &spec, double origin, double span)
    : kind_(spec.kind), n_(spec.n), origin_(origin), span_(span) {
  if (spec.n < 1)
    throw ParameterError("test function dimension must be >= 1");
  if (!(span > 0.0) || !std::isfinite(origin))
    throw ParameterError("test function layout needs a positive span");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  switch (kind_) {
  case TestFunctionKind::Polynomial: {
    const int deg = static_cast<int>(rng() % 4);
    coef_.resize(n_, deg + 1);
    for (Eigen::Index i = 0; i < coef_.size(); ++i)
      coef_.data()[i] = normal(rng);
    break;
  }
  case TestFunctionKind::TrigDamped:
    coef_.resize(n_, 5);
    for (Eigen::Index i = 0; i < n_; ++i) {
      coef_(i, 0) = normal(rng);              // amplitude
      coef_(i, 1) = 6.0 * unit(rng);          // frequency
      coef_(i, 2) = 2.0 * unit(rng);          // damping
      coef_(i, 3) = 2.0 * M_PI * unit(rng);   // phase
      coef_(i, 4) = normal(rng);              // offset
    }
    break;
  case TestFunctionKind::PiecewiseRandom: {
    const int count = 3 + static_cast<int>(rng() % 6);
    coef_.resize(n_, count);
    for (Eigen::Index i = 0; i < coef_.size(); ++i)
      coef_.data()[i] = normal(rng);
    for (int j = 0; j < count; ++j)
      knots_.push_back(origin + span * j / (count - 1));
    break;
  }
  }
}

TestFunction::TestFunction(Eigen::Index n, std::function<Vector(double)> fn,
                           std::vector<double> breakpoints)
    : kind_(TestFunctionKind::Polynomial), n_(n), origin_(0.0), span_(1.0),
      knots_(std::move(breakpoints)), fn_(std::move(fn)) {
  if (n < 1 || !fn_)
    throw ParameterError("custom test function needs n >= 1 and a callable");
}

Vector TestFunction::operator()(double s) const {
  if (fn_) {
    Vector v = fn_(s);
    if (v.size() != n_)
      throw InstanceError("custom test function returned the wrong dimension");
    return v;
  }
  const double u = (s - origin_) / span_;
  Vector out(n_);
  switch (kind_) {
  case TestFunctionKind::Polynomial:
    out = coef_.col(coef_.cols() - 1);
    for (Eigen::Index d = coef_.cols() - 2; d >= 0; --d)
      out = out * u + coef_.col(d);
    break;
  case TestFunctionKind::TrigDamped:
    for (Eigen::Index i = 0; i < n_; ++i)
      out(i) = coef_(i, 0) * std::exp(-coef_(i, 2) * u) * std::cos(coef_(i, 1) * u + coef_(i, 3)) +
               coef_(i, 4);
    break;
  case TestFunctionKind::PiecewiseRandom: {
    const Eigen::Index last = coef_.cols() - 1;
    const double pos = u * static_cast<double>(last);
    if (pos <= 0.0)
      return coef_.col(0);
    if (pos >= static_cast<double>(last))
      return coef_.col(last);
    const auto j = static_cast<Eigen::Index>(std::floor(pos));
    const double f = pos - static_cast<double>(j);
    out = (1.0 - f) * coef_.col(j) + f * coef_.col(std::min(j + 1, last));
    break;
  }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernels and weights

Kernel gamma_psi_kernel(int N, double T) {
  if (N < 2)
    throw ParameterError("gamma shape N must be an integer >= 2");
  if (!(T > 0.0) || !std::isfinite(T))
    throw ParameterError("gamma scale T must be positive");
  Kernel k;
  std::ostringstream label;
  label << "psi(N=" << N << ",T=" << T << ")";
  k.label = label.str();
  const double norm = std::pow(T, N) * boost::math::factorial<double>(N - 2);
  k.density = [N, T, norm](double th) {
    return th < 0.0 ? 0.0 : std::pow(th, N - 2) * std::exp(-th / T) / norm;
  };
  k.cutoff = [N, T](double mass) { return gamma_tail_cutoff(N - 1.0 + 8.0, T, mass); };
  k.scale = std::max(1.0, N - 1.0) * T;
  return k;
}

namespace {

constexpr double kTailMass = 1e-16;

DiscreteWeights truncated(std::string label, double lambda, int shift, int h) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("Poisson parameter lambda must be positive");
  if (h < 0)
    throw ParameterError("gap h must be a non-negative integer");
  DiscreteWeights w;
  w.label = std::move(label);
  w.h = h;
  const int cut = poisson_tail_cutoff(lambda, kTailMass, 4);
  // log-space to stay finite for large indices
  for (int i = 0; i <= cut; ++i) {
    const int k = i + shift;
    w.m.push_back(std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0)));
  }
  return w;
}

} // namespace

DiscreteWeights poisson_q_weights(double lambda) {
  std::ostringstream l;
  l << "Q(lambda=" << lambda << ")";
  return truncated(l.str(), lambda, 1, 0);
}

DiscreteWeights poisson_p_weights(double lambda, int h) {
  std::ostringstream l;
  l << "P(lambda=" << lambda << ",h=" << h << ")";
  return truncated(l.str(), lambda, 0, h);
}

// ---------------------------------------------------------------------------
// Checks

namespace {

// Cholesky factor used to evaluate v^T R v as a squared norm (never negative).
class QuadForm {
public:
  explicit QuadForm(const Matrix &r) {
    if (r.rows() != r.cols() || r.rows() < 1 || !r.allFinite())
      throw ParameterError("R must be a finite square matrix");
    if (!is_positive_definite(SymMatrix(r), 0.0))
      throw ParameterError("R must be positive definite");
    llt_.compute(r);
    r_ = r;
  }
  double operator()(const Vector &v) const {
    return (llt_.matrixU() * v).squaredNorm();
  }
  const Matrix &matrix() const { return r_; }
  Eigen::Index n() const { return r_.rows(); }

private:
  Eigen::LLT<Matrix> llt_;
  Matrix r_;
};

void finalize(GapReport &r) { r.gap = r.lhs - (r.rhs_jensen + r.rhs_extra); }

struct CustomWeight {
  std::function<double(double)> fn;
  std::vector<double> breaks;
};

CustomWeight custom_weight(const WeightSpec &g, double origin, double span) {
  if (g.fn)
    return {g.fn, {}};
  TestFunctionSpec spec{static_cast<TestFunctionKind>(g.seed % 3), g.seed, 1};
  TestFunction f(spec, origin, span);
  // The linear part keeps the weight from collapsing to a constant.
  std::mt19937_64 rng(g.seed ^ 0x9e3779b97f4a7c15ULL);
  const double slope = (rng() % 2 ? 1.0 : -1.0) * (0.5 + std::uniform_real_distribution<>()(rng));
  return {[f, slope, origin, span](double s) { return f(s)(0) + slope * (s - origin) / span; },
          f.breakpoints()};
}

void append(std::vector<double> &to, const std::vector<double> &from) {
  to.insert(to.end(), from.begin(), from.end());
}

void require_nonzero_weight(double den, double scale) {
  if (!(den > 1e-14 * std::max(1.0, scale)))
    throw InstanceError("weight g vanishes identically after centering");
}

std::vector<double> shifted(const std::vector<double> &v, double by) {
  std::vector<double> out;
  for (double x : v)
    out.push_back(x + by);
  return out;
}

struct Moments4 {
  double k0, k1, k2, k3;
};

Moments4 kernel_moments(const Kernel &k, double upper) {
  Vector m = integrate(
      [&](double s) {
        const double d = k.density(s);
        Vector v(4);
        v << d, s * d, s * s * d, s * s * s * d;
        return v;
      },
      0.0, upper);
  return {m(0), m(1), m(2), m(3)};
}

double upper_limit(const Kernel &k) {
  const double l = k.cutoff(1e-16);
  if (!(l > 0.0) || !std::isfinite(l))
    throw InstanceError("kernel tail is not integrable at the requested tolerance");
  return l;
}

} // namespace

GapReport check_finite_interval(double a, double b, const TestFunctionSpec &omega,
                                const WeightSpec &g, const Matrix &R) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ParameterError("finite interval needs a < b");
  return check_finite_interval(a, b, TestFunction(omega, a, b - a), g, R);
}

GapReport check_finite_interval(double a, double b, const TestFunction &w, const WeightSpec &g,
                                const Matrix &R) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ParameterError("finite interval needs a < b");
  const QuadForm q(R);
  if (w.n() != q.n())
    throw ParameterError("R and omega dimensions differ");
  std::vector<double> br = w.breakpoints();

  GapReport r;
  r.lhs = integrate([&](double s) { return q(w(s)); }, a, b, br);
  const Vector J = integrate([&](double s) { return w(s); }, a, b, br);
  r.rhs_jensen = q(J) / (b - a);

  std::function<double(double)> gf;
  switch (g.kind) {
  case WeightKind::None:
    break;
  case WeightKind::FiniteCentered:
    gf = [a, b](double u) { return a + b - 2.0 * u; };
    break;
  case WeightKind::Custom: {
    const CustomWeight cw = custom_weight(g, a, b - a);
    append(br, cw.breaks);
    auto raw = cw.fn;
    const double mean = integrate(raw, a, b, br) / (b - a);
    gf = [raw, mean](double u) { return raw(u) - mean; };
    break;
  }
  default:
    throw ParameterError("weight kind not defined on a finite interval");
  }
  if (gf) {
    r.denominator = integrate([&](double u) { return gf(u) * gf(u); }, a, b, br);
    require_nonzero_weight(r.denominator, (b - a) * (b - a) * (b - a));
    r.denominator_oracle = g.kind == WeightKind::FiniteCentered
                               ? (b - a) * (b - a) * (b - a) / 3.0
                               : r.denominator;
    const Vector omega_bar = integrate([&](double s) { return Vector(gf(s) * w(s)); }, a, b, br);
    r.rhs_extra = q(omega_bar) / r.denominator;
    if (g.kind == WeightKind::FiniteCentered) {
      // Eq. 2: Omega = int w - 2/(b-a) int_a^b int_a^s w(r) dr ds
      const Vector inner = integrate(
          [&](double s) { return integrate([&](double t) { return w(t); }, a, s, br); }, a, b, br);
      const Vector big_omega = J - 2.0 / (b - a) * inner;
      r.form_mismatch = std::abs(3.0 / (b - a) * q(big_omega) - r.rhs_extra);
    }
  }
  finalize(r);
  return r;
}

GapReport check_infinite_single(const Kernel &k, const TestFunctionSpec &omega,
                                const WeightSpec &g, const Matrix &R) {
  return check_infinite_single(k, TestFunction(omega, 0.0, 3.0 * k.scale), g, R);
}

GapReport check_infinite_single(const Kernel &k, const TestFunction &w, const WeightSpec &g,
                                const Matrix &R) {
  const QuadForm q(R);
  const double L = upper_limit(k);
  if (w.n() != q.n())
    throw ParameterError("R and omega dimensions differ");
  std::vector<double> br = w.breakpoints();
  const Moments4 mom = kernel_moments(k, L);

  GapReport r;
  r.instance = k.label;
  r.lhs = integrate([&](double s) { return k.density(s) * q(w(s)); }, 0.0, L, br);
  const Vector J = integrate([&](double s) { return Vector(k.density(s) * w(s)); }, 0.0, L, br);
  r.rhs_jensen = q(J) / mom.k0;

  switch (g.kind) {
  case WeightKind::None:
    break;
  case WeightKind::AffineCentered: {
    const Vector S = integrate([&](double s) { return Vector(s * k.density(s) * w(s)); }, 0.0, L, br);
    const Vector omega_t = mom.k1 / mom.k0 * J - S;
    r.denominator = mom.k2 - mom.k1 * mom.k1 / mom.k0;
    const double c = mom.k1 / mom.k0;
    r.denominator_oracle =
        integrate([&](double s) { return k.density(s) * (s - c) * (s - c); }, 0.0, L);
    require_nonzero_weight(r.denominator, k.scale * k.scale);
    r.rhs_extra = q(omega_t) / r.denominator;
    break;
  }
  case WeightKind::Custom: {
    const CustomWeight cw = custom_weight(g, 0.0, 3.0 * k.scale);
    append(br, cw.breaks);
    auto raw = cw.fn;
    const double mean =
        integrate([&](double s) { return k.density(s) * raw(s); }, 0.0, L, br) / mom.k0;
    auto gf = [&](double s) { return raw(s) - mean; };
    r.denominator = integrate([&](double s) { return k.density(s) * gf(s) * gf(s); }, 0.0, L, br);
    r.denominator_oracle = r.denominator;
    require_nonzero_weight(r.denominator, mom.k0);
    const Vector ob =
        integrate([&](double s) { return Vector(k.density(s) * gf(s) * w(s)); }, 0.0, L, br);
    r.rhs_extra = q(ob) / r.denominator;
    break;
  }
  default:
    throw ParameterError("weight kind not defined for the single infinite integral");
  }
  finalize(r);
  return r;
}

GapReport check_infinite_double(const Kernel &k, double h, const TestFunctionSpec &omega,
                                const WeightSpec &g, const Matrix &R, bool compare_forms) {
  return check_infinite_double(k, h, TestFunction(omega, 0.0, 3.0 * k.scale + h), g, R,
                               compare_forms);
}

GapReport check_infinite_double(const Kernel &k, double h, const TestFunction &w,
                                const WeightSpec &g, const Matrix &R, bool compare_forms) {
  if (!(h >= 0.0) || !std::isfinite(h))
    throw ParameterError("gap h must be non-negative");
  const QuadForm q(R);
  const double L = upper_limit(k);
  if (w.n() != q.n())
    throw ParameterError("R and omega dimensions differ");
  std::vector<double> br = w.breakpoints();
  std::vector<double> outer_br = shifted(br, -h);
  const Moments4 mom = kernel_moments(k, L);
  const double k1h = h * mom.k0 + mom.k1;

  CustomWeight cw;
  if (g.kind == WeightKind::Custom) {
    cw = custom_weight(g, 0.0, 3.0 * k.scale + h);
    append(br, cw.breaks);
    outer_br = shifted(br, -h);
  } else if (g.kind != WeightKind::None && g.kind != WeightKind::DoubleCentered) {
    throw ParameterError("weight kind not defined for the double infinite integral");
  }

  // int_0^L K(theta) int_0^{theta+h} f(u) du dtheta. Inner integrals over
  // whole breakpoint segments are shared between outer nodes.
  auto dbl = [&](const auto &f) {
    using R = decltype(detail::plain(f(0.0)));
    std::vector<double> cuts{0.0};
    for (double b : br)
      if (b > 0.0 && b < L + h)
        cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    std::vector<R> prefix{R(detail::plain(f(0.0)) * 0.0)};
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
      prefix.push_back(R(prefix.back() + integrate(f, cuts[j], cuts[j + 1])));
    return integrate(
        [&](double th) {
          const double top = th + h;
          const auto j = static_cast<std::size_t>(
              std::upper_bound(cuts.begin(), cuts.end(), top) - cuts.begin() - 1);
          return R(k.density(th) * (prefix[j] + integrate(f, cuts[j], top)));
        },
        0.0, L, outer_br);
  };

  // One pass over the stacked integrand
  //   [w^T R w, w, u w, g, g^2, g w, u, u^2]
  const Eigen::Index n = w.n();
  const Vector all = dbl([&](double u) {
    const Vector wu = w(u);
    const double gu = cw.fn ? cw.fn(u) : 0.0;
    Vector v(3 * n + 5);
    v(0) = q(wu);
    v.segment(1, n) = wu;
    v.segment(1 + n, n) = u * wu;
    v(1 + 2 * n) = gu;
    v(2 + 2 * n) = gu * gu;
    v.segment(3 + 2 * n, n) = gu * wu;
    v(3 + 3 * n) = u;
    v(4 + 3 * n) = u * u;
    return v;
  });
  const Vector J = all.segment(1, n);
  const Vector UJ = all.segment(1 + n, n);

  GapReport r;
  r.instance = k.label;
  r.lhs = all(0);
  r.rhs_jensen = q(J) / k1h;

  if (g.kind == WeightKind::DoubleCentered) {
    const double c0 = h / 2.0 + (h * mom.k1 + mom.k2) / (2.0 * k1h);
    const Vector sigma = UJ - c0 * J;
    const double h2 = h * h;
    r.denominator = h2 * h / 2.0 * mom.k0 + 2.0 * mom.k3 +
                    (3.0 * h2 * mom.k0 * (h * mom.k1 + 2.0 * mom.k2) - 3.0 * mom.k2 * mom.k2) /
                        (2.0 * k1h);
    r.denominator_oracle = all(4 + 3 * n) - 2.0 * c0 * all(3 + 3 * n) + c0 * c0 * k1h;
    require_nonzero_weight(r.denominator, k1h);
    r.rhs_extra = q(sigma) / r.denominator;
    if (compare_forms) {
      // int K int_{t-theta-h}^t int_{t-theta-h}^r omega(s) ds dr: in u the
      // innermost range is [v, theta + h].
      const Vector second =
          integrate(
              [&](double th) {
                const double top = th + h;
                return Vector(k.density(th) *
                              integrate(
                                  [&](double v) {
                                    return integrate([&](double u) { return w(u); }, v, top, br);
                                  },
                                  0.0, top, br));
              },
              0.0, L, outer_br) -
          c0 * J;
      r.form_mismatch = (second - sigma).lpNorm<Eigen::Infinity>();
    }
  } else if (g.kind == WeightKind::Custom) {
    // Centering g - mean expanded over the stacked integrals.
    const double mean = all(1 + 2 * n) / k1h;
    r.denominator = all(2 + 2 * n) - mean * all(1 + 2 * n);
    r.denominator_oracle = dbl([&](double u) {
      const double d = cw.fn(u) - mean;
      return d * d;
    });
    require_nonzero_weight(r.denominator, k1h);
    const Vector sigma = all.segment(3 + 2 * n, n) - mean * J;
    r.rhs_extra = q(sigma) / r.denominator;
  }
  finalize(r);
  return r;
}

GapReport check_summation(const DiscreteWeights &wts, const TestFunctionSpec &xs,
                          const WeightSpec &g, const Matrix &R, SumVariant variant) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < wts.m.size(); ++i) {
    m0 += wts.m[i];
    m1 += double(i) * wts.m[i];
  }
  const double span = m0 > 0.0 ? std::max(1.0, m1 / m0 * 3.0 + wts.h) : 1.0;
  return check_summation(wts, TestFunction(xs, 0.0, span), g, R, variant);
}

GapReport check_summation(const DiscreteWeights &wts, const TestFunction &x, const WeightSpec &g,
                          const Matrix &R, SumVariant variant) {
  const QuadForm q(R);
  if (wts.m.empty())
    throw ParameterError("weights are empty");
  for (double v : wts.m)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ParameterError("weights must be finite and nonnegative");
  const auto count = static_cast<int>(wts.m.size());
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < count; ++i) {
    m0 += wts.m[i];
    m1 += i * wts.m[i];
    m2 += double(i) * i * wts.m[i];
  }
  if (x.n() != q.n())
    throw ParameterError("R and x dimensions differ");

  GapReport r;
  r.instance = wts.label;
  if (variant == SumVariant::Double) {
    if (g.kind != WeightKind::None)
      throw ParameterError("the double-sum bound has no extra term");
    // sum_i M(i) sum_{j=k-i-h}^{k-1} with m = k-1-j in [0, i+h-1]
    double m1h = 0.0;
    Vector J = Vector::Zero(q.n());
    for (int i = 0; i < count; ++i) {
      m1h += (i + wts.h) * wts.m[i];
      for (int j = 0; j < i + wts.h; ++j) {
        const Vector xj = x(j);
        r.lhs += wts.m[i] * q(xj);
        J += wts.m[i] * xj;
      }
    }
    if (!(m1h > 0.0))
      throw InstanceError("M1h vanishes; the double sum is empty");
    r.rhs_jensen = q(J) / m1h;
    finalize(r);
    return r;
  }

  Vector J = Vector::Zero(q.n());
  Vector S = Vector::Zero(q.n());
  for (int i = 0; i < count; ++i) {
    const Vector xi = x(i);
    r.lhs += wts.m[i] * q(xi);
    J += wts.m[i] * xi;
    S += double(i) * wts.m[i] * xi;
  }
  r.rhs_jensen = q(J) / m0;

  switch (g.kind) {
  case WeightKind::None:
    break;
  case WeightKind::AffineCentered: {
    const Vector pi_t = m1 / m0 * J - S;
    r.denominator = m2 - m1 * m1 / m0;
    const double c = m1 / m0;
    for (int i = 0; i < count; ++i)
      r.denominator_oracle += wts.m[i] * (i - c) * (i - c);
    require_nonzero_weight(r.denominator, m0);
    r.rhs_extra = q(pi_t) / r.denominator;
    break;
  }
  case WeightKind::Custom: {
    auto raw = custom_weight(g, 0.0, std::max(1.0, 3.0 * m1 / m0)).fn;
    double mean = 0.0;
    for (int i = 0; i < count; ++i)
      mean += wts.m[i] * raw(i);
    mean /= m0;
    Vector pi = Vector::Zero(q.n());
    for (int i = 0; i < count; ++i) {
      const double gi = raw(i) - mean;
      r.denominator += wts.m[i] * gi * gi;
      pi += wts.m[i] * gi * x(i);
    }
    r.denominator_oracle = r.denominator;
    require_nonzero_weight(r.denominator, m0);
    r.rhs_extra = q(pi) / r.denominator;
    break;
  }
  default:
    throw ParameterError("weight kind not defined for sums");
  }
  finalize(r);
  return r;
}

// ---------------------------------------------------------------------------
// Battery

const std::vector<Theorem> &all_theorems() {
  static const std::vector<Theorem> all{Theorem::Lemma1,     Theorem::Thm1,       Theorem::Cor1,
                                        Theorem::Thm2,       Theorem::Cor2,       Theorem::Lemma2Eq19,
                                        Theorem::Lemma2Eq20, Theorem::Thm3,       Theorem::Cor3};
  return all;
}

const char *to_string(Theorem t) {
  switch (t) {
  case Theorem::Lemma1: return "lemma1";
  case Theorem::Thm1: return "thm1";
  case Theorem::Cor1: return "cor1";
  case Theorem::Thm2: return "thm2";
  case Theorem::Cor2: return "cor2";
  case Theorem::Lemma2Eq19: return "lemma2_eq19";
  case Theorem::Lemma2Eq20: return "lemma2_eq20";
  case Theorem::Thm3: return "thm3";
  case Theorem::Cor3: return "cor3";
  }
  return "?";
}

bool is_violation(const GapReport &r, double rel_tol) {
  return !(r.gap >= -rel_tol * std::abs(r.lhs) - 1e-300) || !(r.rhs_extra >= 0.0);
}

GapReport run_instance(Theorem t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit;
  const auto n = static_cast<Eigen::Index>(1 + rng() % 3);
  Matrix b(n, n);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    b.data()[i] = normal(rng);
  const Matrix R = b * b.transpose() + 0.1 * Matrix::Identity(n, n);
  const TestFunctionSpec omega{static_cast<TestFunctionKind>(rng() % 3), rng(), n};
  WeightSpec custom{WeightKind::Custom, rng(), {}};
  const int N = 2 + static_cast<int>(rng() % 4);
  const double T = 0.05 + 0.95 * unit(rng);
  const double h = unit(rng);
  const double lambda = 0.2 + 2.8 * unit(rng);
  const bool use_q = rng() % 2 == 0;
  const int hd = static_cast<int>(rng() % 4);

  std::ostringstream desc;
  desc << "n=" << n;
  GapReport r;
  switch (t) {
  case Theorem::Lemma1: {
    const double a = -2.0 + 4.0 * unit(rng);
    const double len = 0.1 + 2.9 * unit(rng);
    const WeightSpec g = seed % 2 ? custom : WeightSpec{WeightKind::FiniteCentered, 0, {}};
    r = check_finite_interval(a, a + len, omega, g, R);
    desc << " [" << a << "," << a + len << "]";
    break;
  }
  case Theorem::Thm1:
    r = check_infinite_single(gamma_psi_kernel(N, T), omega, custom, R);
    break;
  case Theorem::Cor1:
    r = check_infinite_single(gamma_psi_kernel(N, T), omega, {WeightKind::AffineCentered, 0, {}}, R);
    break;
  case Theorem::Thm2:
    r = check_infinite_double(gamma_psi_kernel(N, T), h, omega, custom, R, false);
    desc << " h=" << h;
    break;
  case Theorem::Cor2:
    r = check_infinite_double(gamma_psi_kernel(N, T), h, omega,
                              {WeightKind::DoubleCentered, 0, {}}, R, false);
    desc << " h=" << h;
    break;
  case Theorem::Lemma2Eq19:
  case Theorem::Thm3:
  case Theorem::Cor3: {
    const DiscreteWeights w = use_q ? poisson_q_weights(lambda) : poisson_p_weights(lambda);
    const WeightSpec g = t == Theorem::Lemma2Eq19 ? WeightSpec{}
                         : t == Theorem::Thm3     ? custom
                                                  : WeightSpec{WeightKind::AffineCentered, 0, {}};
    r = check_summation(w, omega, g, R, SumVariant::Single);
    break;
  }
  case Theorem::Lemma2Eq20:
    r = check_summation(poisson_p_weights(lambda, hd), omega, {}, R, SumVariant::Double);
    break;
  }
  if (!r.instance.empty())
    desc << " " << r.instance;
  r.instance = desc.str();
  return r;
}

std::vector<BatteryRow> run_battery(const BatteryOptions &opts) {
  if (opts.trials < 1)
    throw ParameterError("trials must be >= 1");
  const auto trials = static_cast<std::size_t>(opts.trials);
  std::vector<BatteryRow> rows(opts.theorems.size() * trials);
  for (std::size_t ti = 0; ti < opts.theorems.size(); ++ti) {
    const Theorem t = opts.theorems[ti];
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 gen(seq);
    for (std::size_t k = 0; k < trials; ++k) {
      rows[ti * trials + k].theorem = t;
      rows[ti * trials + k].seed = gen();
    }
  }
  detail::parallel_for(rows.size(), [&](std::size_t i) {
    rows[i].report = run_instance(rows[i].theorem, rows[i].seed);
    rows[i].violation = is_violation(rows[i].report, opts.rel_tol);
  });
  return rows;
}

} // namespace dlcert
