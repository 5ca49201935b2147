#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "toda/grid.hpp"
#include "toda/potential.hpp"

namespace toda {

inline constexpr double kDensityFloor = 1e-300;

struct SolverOptions {
  double damping = 0.5;  ///< initial Picard mixing weight theta_0
  double tol = 1e-8;     ///< sup-norm Euler-Lagrange residual target
  std::size_t max_iter = 10000;
  /// Mass allowed in the two boundary cells before the grid is declared too
  /// small for the solution.
  double boundary_mass_limit = 1e-10;
  /// Optional warm start (values on the solver grid, any positive scale).
  std::optional<std::vector<double>> initial;
};

struct EquilibriumSolution {
  double pressure = 0.0;
  Potential potential = Potential::zero();
  GridDensity density;
  double lambda = 0.0;
  double free_energy = 0.0;  ///< f(mu) at the returned density (inf f at convergence)
  double log_energy = 0.0;   ///< double integral of ln|x - y| against mu x mu
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_damping = 0.0;
  std::vector<double> free_energy_history;  ///< one entry per accepted iterate

  /// Throws NotConverged when the solve stopped early.
  const EquilibriumSolution& require_converged() const;
};

/// Discrete rate functional
///   f(rho) = sum W_i rho_i h - P h^2 rho^T K rho + sum rho_i ln(rho_i) h,
/// with 0 ln 0 = 0. The density must live on the kernel's grid.
double free_energy(const GridDensity& rho, double pressure, const Potential& v, const LogKernel& kernel);

/// Same, from raw values and precomputed W and log-potential (h K rho).
double free_energy(std::span<const double> rho, std::span<const double> w_values,
                   std::span<const double> log_potential, double pressure, double spacing);

/// Minimizes f over densities on the grid by damped Picard iteration on
///   rho <- (1 - theta) rho + theta * normalize(exp(-W + 2P h K rho)),
/// starting from rho proportional to exp(-W). theta halves whenever an iterate
/// would raise f. Stops when
///   sup_{rho_i > floor} |W_i - 2P (h K rho)_i + ln rho_i - lambda| <= tol,
/// lambda being the rho-weighted mean of that expression. A run that hits
/// max_iter comes back with converged = false. Throws DomainError when the
/// boundary cells carry more than `boundary_mass_limit` mass.
EquilibriumSolution solve_equilibrium(double pressure, const Potential& v, const LogKernel& kernel,
                                      const SolverOptions& options = {});
EquilibriumSolution solve_equilibrium(double pressure, const Potential& v, const Grid& grid,
                                      const SolverOptions& options = {});

/// Smallest half-width L (doubling bracket, then bisection) with
///   exp(-W(+-L) + 2P ln(2L)) <= 1e-16 exp(-min W).
double domain_auto(double pressure, const Potential& v);

/// Grid of `points` cells on [-domain_auto, domain_auto].
Grid auto_grid(double pressure, const Potential& v, std::size_t points);

}  // namespace toda
