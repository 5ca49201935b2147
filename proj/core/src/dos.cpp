#include "toda/dos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "toda/error.hpp"
#include "toda/jacobi.hpp"
#include "toda/metrics.hpp"
#include "toda/parallel.hpp"
#include "toda/quadrature.hpp"
#include "toda/statistics.hpp"

namespace toda {

namespace {

GridDensity gibbs_limit(const Potential& v, const Grid& grid) {
  auto w = v.w_on(grid.points());
  const double lowest = *std::min_element(w.begin(), w.end());
  for (double& x : w) x = std::exp(-(x - lowest));
  return GridDensity::normalized(grid, std::move(w));
}

/// Weighted sum of densities on one grid, renormalized.
GridDensity combine(const Grid& grid, const std::vector<const GridDensity*>& parts,
                    const std::vector<double>& weights) {
  std::vector<double> acc(grid.size(), 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[k] * (*parts[k])[i];
  }
  return GridDensity::normalized(grid, std::move(acc));
}

Potential scaled(const Potential& v, double alpha) {
  auto c = v.coefficients();
  for (double& x : c) x *= alpha;
  return Potential::polynomial(std::move(c));
}

}  // namespace

double default_fd_step(double pressure) { return std::min(1e-3, pressure / 10.0); }

DosResult dos_from_equilibrium(double pressure, const Potential& v, const LogKernel& kernel,
                               const DosOptions& options) {
  if (!(pressure > 0.0) || !std::isfinite(pressure)) throw InvalidInput("DOS needs P > 0");
  const double h = options.fd_step > 0.0 ? options.fd_step : default_fd_step(pressure);
  if (!(h > 0.0 && h < pressure / 2.0)) throw InvalidInput("DOS step must satisfy 0 < h_P < P/2");

  auto lower = solve_equilibrium(pressure - h, v, kernel, options.solver);
  lower.require_converged();
  SolverOptions warm = options.solver;
  warm.initial = std::vector<double>(lower.density.values().begin(), lower.density.values().end());
  auto upper = solve_equilibrium(pressure + h, v, kernel, warm);
  upper.require_converged();

  const Grid& grid = kernel.grid();
  std::vector<double> nu(grid.size());
  double mass = 0.0, negative = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    nu[i] = ((pressure + h) * upper.density[i] - (pressure - h) * lower.density[i]) / (2.0 * h);
    mass += nu[i];
    if (nu[i] < 0.0) {
      negative -= nu[i];
      nu[i] = 0.0;
    }
  }
  mass *= grid.spacing();
  negative *= grid.spacing();
  if (negative > options.negativity_ceiling) {
    std::ostringstream os;
    os << "DOS at P=" << pressure << " has negative mass " << negative << " with h_P=" << h
       << "; reduce h_P or refine the grid";
    throw StepSizeError(os.str(), negative);
  }
  return DosResult{.pressure = pressure,
                   .potential = v,
                   .nu = GridDensity::normalized(grid, std::move(nu)),
                   .fd_step = h,
                   .negativity = negative,
                   .pre_clip_mass = mass,
                   .lower = std::move(lower),
                   .upper = std::move(upper)};
}

GridDensity mixture_over_profile(const VarianceProfile& sigma, const Potential& v, const LogKernel& kernel,
                                 const MixtureOptions& options) {
  if (options.nodes < 5) throw InvalidInput("profile mixture needs at least 5 quadrature nodes");
  const std::size_t pieces = std::max<std::size_t>(1, sigma.nodes().size() - 1);
  std::map<double, double> weight_by_pressure;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double lo = static_cast<double>(k) / static_cast<double>(pieces);
    const double hi = static_cast<double>(k + 1) / static_cast<double>(pieces);
    const auto rule = gauss_legendre(options.nodes, lo, hi);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) weight_by_pressure[sigma(rule.nodes[j])] += rule.weights[j];
  }
  std::vector<double> pressures, weights;
  for (const auto& [p, w] : weight_by_pressure) {
    pressures.push_back(p);
    weights.push_back(w);
  }
  std::vector<std::optional<GridDensity>> nus(pressures.size());
  parallel_for(pressures.size(), options.workers, [&](std::size_t k) {
    nus[k] = dos_from_equilibrium(pressures[k], v, kernel, options.dos).nu;
  });
  std::vector<const GridDensity*> parts;
  for (const auto& nu : nus) parts.push_back(&*nu);
  return combine(kernel.grid(), parts, weights);
}

BetaMixtureReport beta_mixture_check(double pressure, const Potential& v, const LogKernel& kernel,
                                     const BetaMixtureOptions& options) {
  if (!(pressure > 0.0)) throw InvalidInput("beta mixture needs P > 0");
  if (options.nodes < 5) throw InvalidInput("beta mixture needs at least 5 quadrature nodes");
  const Grid& grid = kernel.grid();
  const auto rule = gauss_legendre(options.nodes, 0.0, 1.0);
  const GridDensity anchor = gibbs_limit(v, grid);

  std::vector<std::optional<GridDensity>> nus(rule.nodes.size());
  std::optional<EquilibriumSolution> mu;
  // Task 0 is the direct solve; tasks 1.. are the quadrature nodes.
  parallel_for(rule.nodes.size() + 1, options.workers, [&](std::size_t t) {
    if (t == 0) {
      auto sol = solve_equilibrium(pressure, v, kernel, options.dos.solver);
      sol.require_converged();
      mu = std::move(sol);
      return;
    }
    const double p = rule.nodes[t - 1] * pressure;
    if (p < options.s_min) return;
    nus[t - 1] = dos_from_equilibrium(p, v, kernel, options.dos).nu;
  });

  BetaMixtureReport report{.mixture = anchor, .mu = std::move(*mu)};
  std::vector<const GridDensity*> parts;
  for (const auto& nu : nus) {
    parts.push_back(nu ? &*nu : &anchor);
    if (!nu) ++report.anchored_nodes;
  }
  report.mixture = combine(grid, parts, rule.weights);
  const auto a = report.mixture.cdf_at_edges();
  const auto b = report.mu.density.cdf_at_edges();
  for (std::size_t i = 0; i < a.size(); ++i) report.sup_cdf_gap = std::max(report.sup_cdf_gap, std::abs(a[i] - b[i]));
  report.mixture_second_moment = report.mixture.moment(2);
  report.mu_second_moment = report.mu.density.moment(2);
  return report;
}

FreeEnergyCheckReport free_energy_relation_check(double pressure, const Potential& v, std::size_t n,
                                                 const FreeEnergyCheckOptions& options) {
  if (!(pressure > 0.0) || !std::isfinite(pressure)) throw InvalidInput("free-energy check needs P > 0");
  if (!v.is_polynomial()) throw InvalidInput("free-energy check needs a polynomial potential");
  FreeEnergyCheckReport report;
  if (v.is_zero()) return report;
  if (n < 3 || n > kMaxTabulatedMcmcSize) throw InvalidInput("free-energy check needs 3 <= N <= 400");
  if (options.alpha_nodes < 2 || options.replicas < 2) {
    throw InvalidInput("free-energy check needs >= 2 alpha nodes and >= 2 replicas");
  }
  if (!(options.fd_step > 0.0 && options.fd_step < pressure / 2.0)) {
    throw InvalidInput("free-energy check step must satisfy 0 < h < P/2");
  }

  const std::size_t nodes = options.alpha_nodes, replicas = options.replicas;
  std::vector<double> chain_means(nodes * replicas), chain_ess(nodes * replicas);
  if (options.alpha_rule == AlphaRule::gauss_legendre) {
    auto rule = gauss_legendre(nodes, 0.0, 1.0);
    report.alphas = std::move(rule.nodes);
    report.alpha_weights = std::move(rule.weights);
  } else {
    for (std::size_t k = 0; k < nodes; ++k) {
      report.alphas.push_back(static_cast<double>(k) / static_cast<double>(nodes - 1));
      report.alpha_weights.push_back((k == 0 || k + 1 == nodes ? 0.5 : 1.0) / static_cast<double>(nodes - 1));
    }
  }

  const double h = options.fd_step;
  const Grid grid(domain_auto(pressure + h, Potential::zero()), options.grid_points);
  const LogKernel kernel(grid);
  const double shifts[2] = {-h, h};
  double inf_f[2][2] = {};  // [shift][0 = zero potential, 1 = V]

  // Chains first, then the four Coulomb solves, all as independent tasks.
  const std::size_t chains = nodes * replicas;
  parallel_for(chains + 4, options.workers, [&](std::size_t t) {
    if (t >= chains) {
      const std::size_t s = (t - chains) / 2, which = (t - chains) % 2;
      const auto sol = solve_equilibrium(pressure + shifts[s], which ? v : Potential::zero(), kernel, options.solver);
      sol.require_converged();
      inf_f[s][which] = sol.free_energy;
      return;
    }
    const std::size_t k = t / replicas;
    SeededStream stream(options.seed, options.stream_offset + t);
    McmcOptions mcmc = options.mcmc;
    mcmc.keep_samples = true;
    const auto chain = mcmc_toda(stream, n, pressure, scaled(v, report.alphas[k]), mcmc);
    std::vector<double> series;
    series.reserve(chain.samples.size());
    for (const auto& m : chain.samples) series.push_back(trace_potential_moments(m, v));
    chain_means[t] = mean_with_stderr(series).mean;
    chain_ess[t] = effective_sample_size(series);
  });

  double lhs = 0.0, variance = 0.0;
  report.min_node_ess = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nodes; ++k) {
    const auto est = mean_with_stderr(std::span<const double>(chain_means).subspan(k * replicas, replicas));
    double ess = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) ess += chain_ess[k * replicas + r];
    report.node_means.push_back(est.mean);
    report.node_stderrs.push_back(est.stderr_);
    report.node_ess.push_back(ess);
    report.min_node_ess = std::min(report.min_node_ess, ess);
    const double w = report.alpha_weights[k];
    lhs -= w * est.mean;
    variance += w * w * est.stderr_ * est.stderr_;
  }
  report.lhs = lhs;
  report.lhs_stderr = std::sqrt(variance);
  report.reliable = report.min_node_ess >= options.min_ess;

  auto scaled_difference = [&](std::size_t s) {
    return -(pressure + shifts[s]) * (inf_f[s][1] - inf_f[s][0]);
  };
  report.rhs = (scaled_difference(1) - scaled_difference(0)) / (2.0 * h);
  return report;
}

NuDensityReport nu_density_relation_check(const EquilibriumSolution& mu, const DosResult& nu,
                                          const LogKernel& kernel) {
  const Grid& grid = kernel.grid();
  if (!(mu.density.grid() == grid) || !(nu.nu.grid() == grid)) {
    throw InvalidInput("nu-density check: mu, nu and kernel must share one grid");
  }
  const double h = grid.spacing();
  const double p = mu.pressure;
  const auto phi = kernel.log_potential(nu.nu.values());
  double nu_mass = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (mu.density[i] <= kDensityFloor) continue;
    nu_mass += nu.nu[i] * h;
    cross += mu.density[i] * phi[i] * h;
  }
  NuDensityReport report;
  report.constant = nu_mass - 2.0 * p * cross;
  report.normalization = report.constant + 2.0 * p * cross;
  report.min_factor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double factor = report.constant + 2.0 * p * phi[i];
    report.residual = std::max(report.residual, std::abs(nu.nu[i] - factor * mu.density[i]));
    if (mu.density[i] > kDensityFloor) report.min_factor = std::min(report.min_factor, factor);
  }
  return report;
}

NuDensityReport nu_density_relation_check(double pressure, const Potential& v, const LogKernel& kernel,
                                          const DosOptions& options) {
  const auto nu = dos_from_equilibrium(pressure, v, kernel, options);
  auto mu = solve_equilibrium(pressure, v, kernel, options.solver);
  mu.require_converged();
  return nu_density_relation_check(mu, nu, kernel);
}

LipschitzSweep log_energy_lipschitz_sweep(double pressure, const Potential& v, const LogKernel& kernel,
                                          const std::vector<double>& deltas, const SolverOptions& solver) {
  auto base = solve_equilibrium(pressure, v, kernel, solver);
  base.require_converged();
  LipschitzSweep sweep{.pressure = pressure, .deltas = deltas, .ratios = {}};
  SolverOptions warm = solver;
  warm.initial = std::vector<double>(base.density.values().begin(), base.density.values().end());
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw InvalidInput("Lipschitz sweep steps must be positive");
    auto moved = solve_equilibrium(pressure + delta, v, kernel, warm);
    moved.require_converged();
    sweep.ratios.push_back(log_energy_distance(base.density, moved.density, kernel) / delta);
  }
  return sweep;
}

CoulombFreeEnergyCurve coulomb_free_energy_curve(const std::vector<double>& pressures, const Potential& v,
                                                 const LogKernel& kernel, const SolverOptions& solver,
                                                 std::size_t workers) {
  if (pressures.size() < 3) throw InvalidInput("free-energy curve needs at least 3 pressures");
  const double step = pressures[1] - pressures[0];
  for (std::size_t k = 1; k < pressures.size(); ++k) {
    if (std::abs(pressures[k] - pressures[k - 1] - step) > 1e-9 * (1.0 + std::abs(step)) || !(step > 0.0)) {
      throw InvalidInput("free-energy curve needs a uniform increasing pressure grid");
    }
  }
  CoulombFreeEnergyCurve curve{.pressures = pressures, .inf_f = std::vector<double>(pressures.size())};
  parallel_for(pressures.size(), workers, [&](std::size_t k) {
    auto sol = solve_equilibrium(pressures[k], v, kernel, solver);
    sol.require_converged();
    curve.inf_f[k] = sol.free_energy;
  });
  for (std::size_t k = 1; k + 1 < pressures.size(); ++k) {
    auto pf = [&](std::size_t j) { return -pressures[j] * curve.inf_f[j]; };
    auto fc = [&](std::size_t j) { return -curve.inf_f[j]; };
    curve.second_differences.push_back(pf(k + 1) - 2.0 * pf(k) + pf(k - 1));
    curve.convexity_of_fc.push_back(fc(k + 1) - 2.0 * fc(k) + fc(k - 1));
  }
  return curve;
}

}  // namespace toda
