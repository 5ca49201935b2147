#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "toda/equilibrium.hpp"
#include "toda/grid.hpp"
#include "toda/mcmc.hpp"
#include "toda/potential.hpp"
#include "toda/samplers.hpp"

namespace toda {

/// min(1e-3, P / 10).
double default_fd_step(double pressure);

struct DosOptions {
  double fd_step = 0.0;  ///< 0 selects default_fd_step(P)
  double negativity_ceiling = 1e-3;
  /// The difference quotient divides solver error by 2 h_P, so the two
  /// underlying solves run tighter than the single-solve default.
  SolverOptions solver{.tol = 1e-11};
};

struct DosResult {
  double pressure = 0.0;
  Potential potential = Potential::zero();
  GridDensity nu;
  double fd_step = 0.0;
  double negativity = 0.0;      ///< clipped negative mass before renormalization
  double pre_clip_mass = 0.0;
  EquilibriumSolution lower;    ///< solve at P - h_P
  EquilibriumSolution upper;    ///< solve at P + h_P
};

/// nu_P = d/dP (P mu_P) by central differences:
///   nu = [(P + h) mu_{P+h} - (P - h) mu_{P-h}] / (2h),
/// negative cells clipped and the result renormalized. Requires 0 < h < P/2.
/// Throws StepSizeError when the clipped mass exceeds the ceiling and
/// NotConverged when either solve stops early.
DosResult dos_from_equilibrium(double pressure, const Potential& v, const LogKernel& kernel,
                               const DosOptions& options = {});

struct MixtureOptions {
  std::size_t nodes = 21;  ///< Gauss-Legendre nodes (per linear piece of a profile)
  DosOptions dos;
  std::size_t workers = 0;  ///< 0 selects the hardware concurrency
};

/// int_0^1 nu_{sigma(s)} ds. The profile is piecewise linear, so each linear
/// piece gets its own Gauss-Legendre rule with `nodes` points.
GridDensity mixture_over_profile(const VarianceProfile& sigma, const Potential& v, const LogKernel& kernel,
                                 const MixtureOptions& options = {});

struct BetaMixtureOptions {
  std::size_t nodes = 21;
  /// Nodes with s P below this use the P -> 0 limit exp(-W) / Z.
  double s_min = 1e-3;
  DosOptions dos;
  std::size_t workers = 0;
};

struct BetaMixtureReport {
  GridDensity mixture;      ///< int_0^1 nu_{sP} ds
  EquilibriumSolution mu;   ///< mu_P
  double sup_cdf_gap = 0.0;
  double mixture_second_moment = 0.0;
  double mu_second_moment = 0.0;
  std::size_t anchored_nodes = 0;  ///< nodes replaced by the P -> 0 limit
};

BetaMixtureReport beta_mixture_check(double pressure, const Potential& v, const LogKernel& kernel,
                                     const BetaMixtureOptions& options = {});

/// Rule for the integral over the potential strength alpha in [0, 1].
/// E_alpha[Tr V] falls steeply near alpha = 0, where the trapezoid rule needs
/// many nodes; the integrand is analytic, so Gauss-Legendre converges fast.
enum class AlphaRule { gauss_legendre, trapezoid };

struct FreeEnergyCheckOptions {
  std::size_t alpha_nodes = 9;  ///< trapezoid nodes include both endpoints
  AlphaRule alpha_rule = AlphaRule::gauss_legendre;
  std::size_t replicas = 4;     ///< independent chains per node
  McmcOptions mcmc;
  std::uint64_t seed = 0;
  std::uint64_t stream_offset = 0;
  double fd_step = 1e-2;        ///< central-difference step for the Coulomb side
  std::size_t grid_points = 1200;
  SolverOptions solver{.tol = 1e-11};
  double min_ess = 50.0;        ///< per alpha node, summed over replicas
  std::size_t workers = 0;
};

struct FreeEnergyCheckReport {
  double lhs = 0.0;         ///< (1/N) ln E_P[exp(-Tr V)] by thermodynamic integration
  double lhs_stderr = 0.0;
  double rhs = 0.0;         ///< d/dP (P (F_C^V - F_C^0)), F_C = -inf f
  std::vector<double> alphas;
  std::vector<double> alpha_weights;
  std::vector<double> node_means;    ///< E_alpha[(1/N) Tr V]
  std::vector<double> node_stderrs;
  std::vector<double> node_ess;
  double min_node_ess = 0.0;
  bool reliable = true;
};

/// Compares the Toda free-energy difference, estimated by Monte Carlo, with
/// the P-derivative of the Coulomb-gas one. V = 0 returns exact zeros without
/// sampling. V must be polynomial and n <= kMaxTabulatedMcmcSize.
FreeEnergyCheckReport free_energy_relation_check(double pressure, const Potential& v, std::size_t n,
                                                 const FreeEnergyCheckOptions& options = {});

struct NuDensityReport {
  double constant = 0.0;       ///< fitted C
  double residual = 0.0;       ///< sup |nu - (C + 2P h K nu) mu|
  double normalization = 0.0;  ///< C + 2P int int ln|x - y| dnu(y) dmu(x)
  double min_factor = 0.0;     ///< min of C + 2P h K nu over cells where mu is above the floor
};

/// Checks that nu_P has density C + 2P (log-potential of nu) against mu_P.
NuDensityReport nu_density_relation_check(const EquilibriumSolution& mu, const DosResult& nu,
                                          const LogKernel& kernel);
NuDensityReport nu_density_relation_check(double pressure, const Potential& v, const LogKernel& kernel,
                                          const DosOptions& options = {});

struct LipschitzSweep {
  double pressure = 0.0;
  std::vector<double> deltas;
  std::vector<double> ratios;  ///< D(mu_P, mu_{P+delta}) / delta
};

LipschitzSweep log_energy_lipschitz_sweep(double pressure, const Potential& v, const LogKernel& kernel,
                                          const std::vector<double>& deltas,
                                          const SolverOptions& solver = {.tol = 1e-11});

struct CoulombFreeEnergyCurve {
  std::vector<double> pressures;
  std::vector<double> inf_f;           ///< inf f_P^V
  std::vector<double> second_differences;  ///< of P F_C with F_C = -inf f, uniform P spacing
  std::vector<double> convexity_of_fc;     ///< second differences of F_C itself
};

/// Solves on a uniform P-grid and forms discrete second differences.
CoulombFreeEnergyCurve coulomb_free_energy_curve(const std::vector<double>& pressures, const Potential& v,
                                                 const LogKernel& kernel, const SolverOptions& solver = {},
                                                 std::size_t workers = 0);

}  // namespace toda
