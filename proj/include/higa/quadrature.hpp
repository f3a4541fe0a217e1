#pragma once

#include <vector>

namespace higa {

/// Gauss-Legendre rule on [0,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule, exact for polynomials of degree 2n-1.
const GaussRule& gauss_legendre(int n);

}  // namespace higa
