#include "bsq/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace bsq {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre needs at least one node");
  // legendre_p_zeros returns the nonnegative roots only.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(n);
  std::vector<std::pair<double, double>> pts;
  for (double x : half) {
    const double d = boost::math::legendre_p_prime(n, x);
    const double wt = 2.0 / ((1.0 - x * x) * d * d);
    pts.emplace_back(x, wt);
    if (x != 0.0) pts.emplace_back(-x, wt);
  }
  std::sort(pts.begin(), pts.end());
  QuadratureRule rule;
  const double mid = 0.5 * (a + b);
  const double rad = 0.5 * (b - a);
  for (const auto& [x, wt] : pts) {
    rule.nodes.push_back(mid + rad * x);
    rule.weights.push_back(rad * wt);
  }
  return rule;
}

}  // namespace bsq
