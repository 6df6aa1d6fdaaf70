#pragma once

#include <vector>

namespace bsq {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class Fn>
  double integrate(Fn&& fn) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * fn(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [a, b], nodes ascending; exact for
/// polynomials of degree <= 2n - 1.
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace bsq
