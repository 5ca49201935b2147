#pragma once

#include <cstddef>
#include <vector>

#include "toda/grid.hpp"
#include "toda/jacobi.hpp"

namespace toda {

/// Distribution function of a probability measure on the line, stored at its
/// breakpoints. Between consecutive breakpoints F is linear from the right
/// limit at the first to the left limit at the second; F = 0 before the first
/// breakpoint and 1 after the last.
///
/// Empirical measures give step functions (left != right at each atom);
/// grid densities give continuous piecewise-linear functions.
class CdfOnGrid {
 public:
  CdfOnGrid(std::vector<double> breakpoints, std::vector<double> left, std::vector<double> right);
  CdfOnGrid(const EmpiricalSpectralMeasure& measure);  // NOLINT(google-explicit-constructor)
  CdfOnGrid(const GridDensity& density);               // NOLINT(google-explicit-constructor)

  const std::vector<double>& breakpoints() const noexcept { return x_; }
  const std::vector<double>& left() const noexcept { return left_; }
  const std::vector<double>& right() const noexcept { return right_; }

  /// F(x-) and F(x+).
  double left_limit(double x) const;
  double right_limit(double x) const;

 private:
  std::vector<double> x_, left_, right_;
};

/// sup over f with |f|_BV <= 1 and |f|_Lip <= 1 of |int f d(mu - nu)|.
///
/// After integrating by parts this is the largest value of int g dF_diff over
/// |g| <= 1 with int |g| <= 1, so g sits on the length-1 set where |F_diff|
/// is largest. Computed exactly as min_{tau >= 0} tau + int (|F_diff| - tau)_+
/// on the merged breakpoint partition, where |F_diff| is piecewise linear.
double bl_bv_distance(const CdfOnGrid& mu, const CdfOnGrid& nu);

/// sup |F_mu - F_nu| (both one-sided limits at every merged breakpoint).
double ks_distance(const CdfOnGrid& mu, const CdfOnGrid& nu);

struct LogEnergyDistance {
  double value = 0.0;    ///< sqrt(max(0, D^2))
  double squared = 0.0;  ///< -h^2 diff^T K diff before clamping
  double clamped = 0.0;  ///< amount removed by the clamp at zero
};

/// D(rho1, rho2) with D^2 = -h^2 (rho1 - rho2)^T K (rho1 - rho2).
LogEnergyDistance log_energy_distance_report(const GridDensity& rho1, const GridDensity& rho2,
                                             const LogKernel& kernel);
double log_energy_distance(const GridDensity& rho1, const GridDensity& rho2, const LogKernel& kernel);

/// n^{-1/5} times the sample standard deviation. Throws for degenerate samples.
double default_bandwidth(const EmpiricalSpectralMeasure& measure);

/// Gaussian kernel estimate with exact per-cell masses (differences of the
/// normal CDF at cell edges), renormalized on the grid. Throws DomainError if
/// an atom lies outside the grid.
GridDensity smooth_empirical(const EmpiricalSpectralMeasure& measure, const Grid& grid, double bandwidth);

}  // namespace toda
