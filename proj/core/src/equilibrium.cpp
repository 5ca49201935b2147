#include "toda/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kTailExponent = 36.841361487904734;  // 16 ln 10
constexpr double kMinDamping = 1e-12;

struct ResidualReport {
  double lambda = 0.0;
  double residual = 0.0;
};

/// lambda = rho-weighted mean of W - 2P phi + ln rho, and the sup deviation
/// from it over cells above the floor.
ResidualReport euler_lagrange_residual(std::span<const double> rho, std::span<const double> w,
                                       std::span<const double> phi, double pressure, double h) {
  ResidualReport out;
  double weighted = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= kDensityFloor) continue;
    const double e = w[i] - 2.0 * pressure * phi[i] + std::log(rho[i]);
    weighted += rho[i] * h * e;
    mass += rho[i] * h;
  }
  out.lambda = weighted / mass;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= kDensityFloor) continue;
    const double e = w[i] - 2.0 * pressure * phi[i] + std::log(rho[i]);
    out.residual = std::max(out.residual, std::abs(e - out.lambda));
  }
  return out;
}

/// normalize(exp(-energy)) evaluated stably.
void gibbs_density(std::span<const double> energy, double h, std::span<double> out) {
  const double lowest = *std::min_element(energy.begin(), energy.end());
  double total = 0.0;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    out[i] = std::exp(-(energy[i] - lowest));
    total += out[i];
  }
  total *= h;
  for (double& v : out) v /= total;
}

double minimum_w(const Potential& v) {
  double lowest = std::numeric_limits<double>::infinity();
  constexpr int kPoints = 200001;
  constexpr double kReach = 100.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = -kReach + 2.0 * kReach * i / (kPoints - 1);
    lowest = std::min(lowest, v.w_extended(x));
  }
  return lowest;
}

}  // namespace

const EquilibriumSolution& EquilibriumSolution::require_converged() const {
  if (!converged) {
    std::ostringstream os;
    os << "equilibrium solve at P=" << pressure << " did not converge after " << iterations
       << " iterations (residual " << residual << ")";
    throw NotConverged(os.str(), residual);
  }
  return *this;
}

double free_energy(std::span<const double> rho, std::span<const double> w_values,
                   std::span<const double> log_potential, double pressure, double spacing) {
  double potential = 0.0, interaction = 0.0, entropy = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    potential += w_values[i] * rho[i];
    interaction += log_potential[i] * rho[i];
    if (rho[i] > 0.0) entropy += rho[i] * std::log(rho[i]);
  }
  return spacing * (potential - pressure * interaction + entropy);
}

double free_energy(const GridDensity& rho, double pressure, const Potential& v, const LogKernel& kernel) {
  if (!(rho.grid() == kernel.grid())) throw InvalidInput("free_energy: density and kernel grids differ");
  const auto w = v.w_on(rho.grid().points());
  const auto phi = kernel.log_potential(rho.values());
  return free_energy(rho.values(), w, phi, pressure, rho.grid().spacing());
}

EquilibriumSolution solve_equilibrium(double pressure, const Potential& v, const LogKernel& kernel,
                                      const SolverOptions& options) {
  if (!(pressure >= 0.0) || !std::isfinite(pressure)) throw InvalidInput("pressure must be >= 0 and finite");
  if (!(options.tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw InvalidInput("damping must lie in (0, 1]");

  const Grid& grid = kernel.grid();
  const std::size_t m = grid.size();
  const double h = grid.spacing();
  const auto w = v.w_on(grid.points());

  std::vector<double> rho(m), phi(m), energy(m), target(m), candidate(m), candidate_phi(m);
  if (options.initial) {
    if (options.initial->size() != m) throw InvalidInput("warm start does not match the grid");
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      rho[i] = (*options.initial)[i];
      if (!(rho[i] >= 0.0) || !std::isfinite(rho[i])) throw InvalidInput("warm start must be finite and >= 0");
      total += rho[i];
    }
    if (!(total > 0.0)) throw InvalidInput("warm start has zero mass");
    for (double& r : rho) r /= total * h;
  } else {
    gibbs_density(w, h, rho);
  }
  kernel.log_potential(rho, phi);
  double f = free_energy(rho, w, phi, pressure, h);

  EquilibriumSolution sol{.pressure = pressure,
                          .potential = v,
                          .density = GridDensity::normalized(grid, rho)};
  sol.free_energy_history.push_back(f);
  double theta = options.damping;
  ResidualReport el;
  std::size_t iter = 0;
  bool stalled = false;
  for (;; ++iter) {
    el = euler_lagrange_residual(rho, w, phi, pressure, h);
    if (el.residual <= options.tol || iter >= options.max_iter || stalled) break;

    for (std::size_t i = 0; i < m; ++i) energy[i] = w[i] - 2.0 * pressure * phi[i];
    gibbs_density(energy, h, target);
    for (;;) {
      for (std::size_t i = 0; i < m; ++i) candidate[i] = (1.0 - theta) * rho[i] + theta * target[i];
      kernel.log_potential(candidate, candidate_phi);
      const double f_candidate = free_energy(candidate, w, candidate_phi, pressure, h);
      if (f_candidate <= f + 1e-14 * (1.0 + std::abs(f))) {
        std::swap(rho, candidate);
        std::swap(phi, candidate_phi);
        f = f_candidate;
        sol.free_energy_history.push_back(f);
        break;
      }
      theta *= 0.5;
      if (theta < kMinDamping) {
        stalled = true;
        break;
      }
    }
  }

  sol.density = GridDensity::normalized(grid, rho);
  sol.lambda = el.lambda;
  sol.residual = el.residual;
  sol.iterations = iter;
  sol.converged = el.residual <= options.tol;
  sol.final_damping = theta;
  sol.free_energy = f;
  double sigma = 0.0;
  for (std::size_t i = 0; i < m; ++i) sigma += rho[i] * phi[i];
  sol.log_energy = sigma * h;

  const double boundary = (rho.front() + rho.back()) * h;
  if (boundary > options.boundary_mass_limit) {
    std::ostringstream os;
    os << "domain too small: boundary cells carry mass " << boundary << " on [-"
       << grid.half_width() << ", " << grid.half_width() << "]";
    throw DomainError(os.str());
  }
  return sol;
}

EquilibriumSolution solve_equilibrium(double pressure, const Potential& v, const Grid& grid,
                                      const SolverOptions& options) {
  return solve_equilibrium(pressure, v, LogKernel(grid), options);
}

double domain_auto(double pressure, const Potential& v) {
  if (!(pressure >= 0.0) || !std::isfinite(pressure)) throw InvalidInput("pressure must be >= 0 and finite");
  const double w_min = minimum_w(v);
  auto adequate = [&](double half_width) {
    const double w_edge = std::min(v.w_extended(half_width), v.w_extended(-half_width));
    return w_edge - w_min - 2.0 * pressure * std::log(2.0 * half_width) >= kTailExponent;
  };
  double hi = 1.0;
  while (!adequate(hi)) {
    hi *= 2.0;
    if (hi > 1e6) throw InvalidInput("potential is not confining enough to bound the domain");
  }
  double lo = hi / 2.0;
  if (adequate(lo)) lo = 1e-6;
  for (int i = 0; i < 80 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (adequate(mid) ? hi : lo) = mid;
  }
  return hi;
}

Grid auto_grid(double pressure, const Potential& v, std::size_t points) {
  return Grid(domain_auto(pressure, v), points);
}

}  // namespace toda
