#pragma once

#include "dlcert/linalg.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace dlcert {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_doublings = 10; // up to 2^10 panels per segment
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
template <class Derived> double magnitude(const Eigen::MatrixBase<Derived> &v) {
  return v.template lpNorm<Eigen::Infinity>();
}

inline double absolute(double v) { return std::abs(v); }
template <class Derived> auto absolute(const Eigen::MatrixBase<Derived> &v) {
  return v.cwiseAbs().eval();
}

inline double plain(double v) { return v; }
template <class Derived> typename Derived::PlainObject plain(const Eigen::MatrixBase<Derived> &v) {
  return v;
}

// Returns the integral of f and of |f| over [a, b].
template <class F> auto gl64_panels(const F &f, double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 64>;
  const auto &x = Rule::abscissa();
  const auto &w = Rule::weights();
  const double width = (b - a) / panels;
  auto eval = [&](double s) { return plain(f(s)); };
  using R = decltype(eval(a));
  R total = eval(a) * 0.0;
  R mass = total;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * width;
    const double hw = 0.5 * width;
    R panel = total * 0.0;
    R panel_mass = panel;
    auto add = [&](double weight, double s) {
      const R v = eval(s);
      panel += weight * v;
      panel_mass += weight * absolute(v);
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        add(w[i], c);
      } else {
        add(w[i], c - hw * x[i]);
        add(w[i], c + hw * x[i]);
      }
    }
    total += hw * panel;
    mass += hw * panel_mass;
  }
  return std::pair{total, mass};
}

} // namespace detail

// Composite 64-node Gauss-Legendre on [a, b], split at the given interior
// breakpoints; each segment doubles its panel count until two successive
// estimates agree to rel_tol relative to the integral of |f|. f may return
// double or an Eigen vector.
template <class F>
auto integrate(const F &f, double a, double b, const std::vector<double> &breaks = {},
               const QuadOptions &opt = {}) {
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b)
      cuts.push_back(c);
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);

  using R = decltype(detail::plain(f(a)));
  R sum = detail::plain(f(a)) * 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (!(hi > lo))
      continue;
    auto prev = detail::gl64_panels(f, lo, hi, 1);
    for (int d = 1, panels = 2; d <= opt.max_doublings; ++d, panels *= 2) {
      auto next = detail::gl64_panels(f, lo, hi, panels);
      const double diff = detail::magnitude(R(next.first - prev.first));
      prev = next;
      if (diff <= opt.rel_tol * detail::magnitude(next.second) + opt.abs_tol)
        break;
    }
    sum += prev.first;
  }
  return sum;
}

// Smallest L with (gamma shape-`shape`, scale-`scale` upper tail at L) < mass.
double gamma_tail_cutoff(double shape, double scale, double mass);

// Smallest K with P(X > K) < mass for X ~ Poisson(lambda), padded so that
// moments up to `degree` are also below mass.
int poisson_tail_cutoff(double lambda, double mass, int degree = 0);

} // namespace dlcert
