#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "toda/jacobi.hpp"
#include "toda/rng.hpp"

namespace toda {

/// Positive function on [0, 1] given by equally spaced node values with linear
/// interpolation (node k sits at k / (n - 1); a single node is a constant).
class VarianceProfile {
 public:
  explicit VarianceProfile(std::vector<double> nodes);

  static VarianceProfile constant(double value) { return VarianceProfile({value}); }

  double operator()(double x) const;
  std::span<const double> nodes() const noexcept { return nodes_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::vector<double> nodes_;
  double min_;
  double max_;
};

/// Periodic Lax matrix under the V = 0 Toda measure: diag iid N(0, 1), all N
/// couplings iid chi_{2P} / sqrt(2).
JacobiMatrix sample_toda_matrix(SeededStream& stream, std::size_t n, double pressure);

/// Dumitriu-Edelman tridiagonal model of the beta = 2P/N Gaussian ensemble:
/// non-periodic, diag iid N(0, 1), coupling j (1-based) ~ chi_{(N-j) beta} / sqrt(2).
JacobiMatrix sample_beta_matrix(SeededStream& stream, std::size_t n, double pressure);

/// Periodic matrix whose coupling i (1-based) is chi_{2 sigma(i/N)} / sqrt(2).
JacobiMatrix sample_profile_matrix(SeededStream& stream, std::size_t n,
                                   const VarianceProfile& sigma);

/// Couples the Toda laws at pressures s and s + h on one probability space:
/// same diagonal, b(s+h) = sqrt(b(s)^2 + c^2) with c ~ chi_{2h} / sqrt(2)
/// independent. Each coupling of the second matrix dominates the first.
std::pair<JacobiMatrix, JacobiMatrix> sample_coupled_toda(SeededStream& stream, std::size_t n,
                                                          double s, double h);

}  // namespace toda
