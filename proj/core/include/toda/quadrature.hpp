#pragma once

#include <cstddef>
#include <vector>

namespace toda {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [lo, hi].
QuadratureRule gauss_legendre(std::size_t n, double lo = 0.0, double hi = 1.0);

}  // namespace toda
