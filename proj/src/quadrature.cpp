#include "dlcert/quadrature.hpp"

#include "dlcert/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace dlcert {

double gamma_tail_cutoff(double shape, double scale, double mass) {
  if (!(shape > 0.0) || !(scale > 0.0) || !(mass > 0.0 && mass < 1.0))
    throw ParameterError("invalid gamma tail request");
  return scale * boost::math::gamma_q_inv(shape, mass);
}

int poisson_tail_cutoff(double lambda, double mass, int degree) {
  if (!(lambda > 0.0) || !(mass > 0.0 && mass < 1.0) || degree < 0)
    throw ParameterError("invalid Poisson tail request");
  // P(X > K) = P(K + 1, lambda), the regularized lower incomplete gamma.
  // The factor K^degree of the moment tail is absorbed by padding past 2 lambda.
  int k = static_cast<int>(std::ceil(2.0 * lambda)) + 2 * degree;
  while (std::pow(k + 1.0, degree) * boost::math::gamma_p(k + 1.0, lambda) >= mass)
    ++k;
  return k;
}

} // namespace dlcert
