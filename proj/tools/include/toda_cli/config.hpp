#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "toda/equilibrium.hpp"
#include "toda/grid.hpp"
#include "toda/potential.hpp"

namespace toda::cli {

using nlohmann::json;

enum class Command { sample, solve, dos, compare, checks };

Command parse_command(const std::string& name);
std::string command_name(Command command);

/// {"kind": "zero"}, {"kind": "polynomial", "coefficients": [...]} or
/// {"kind": "tabulated", "x": [...], "v": [...], "envelope": [...], "slack": s}.
struct PotentialSpec {
  std::string kind = "zero";
  std::vector<double> coefficients;
  std::vector<double> table_x;
  std::vector<double> table_v;
  double slack = 0.0;

  Potential build() const;
};

struct GridSpec {
  std::size_t points = 2000;
  double half_width = 0.0;  ///< 0 selects domain_auto at the command's largest pressure

  Grid build(double pressure, const Potential& v) const;
};

struct SolverSpec {
  double tol = 1e-8;
  double damping = 0.5;
  std::size_t max_iter = 10000;

  SolverOptions build() const;
};

struct McmcSpec {
  std::size_t sweeps = 2000;
  std::size_t thin = 1;
  double burn_in_fraction = 0.2;
  bool adapt = true;
};

struct SampleConfig {
  std::string source = "toda";  ///< toda | beta | profile | mcmc
  std::size_t n = 1000;
  double pressure = 1.0;
  std::vector<double> profile{1.0};
  PotentialSpec potential;
  std::size_t replicas = 10;
  McmcSpec mcmc;
};

struct SolveConfig {
  double pressure = 1.0;
  PotentialSpec potential;
  GridSpec grid;
  SolverSpec solver;
};

struct DosConfig {
  double pressure = 1.0;
  std::vector<double> profile;  ///< empty: single pressure; otherwise the mixture over this profile
  PotentialSpec potential;
  GridSpec grid;
  double fd_step = 0.0;
  double negativity_ceiling = 1e-3;
  std::size_t nodes = 21;
  SolverSpec solver{.tol = 1e-11};
};

struct CompareConfig {
  std::string eigenvalues;  ///< "replica,lambda" CSV, or an "x,rho" density CSV
  std::string density;      ///< "x,rho" CSV
  double bandwidth = 0.0;   ///< 0 selects default_bandwidth
};

struct FreeEnergySpec {
  std::size_t n = 200;
  std::size_t alpha_nodes = 9;
  std::string alpha_rule = "gauss_legendre";
  std::size_t replicas = 4;
  McmcSpec mcmc{.sweeps = 3000};
};

struct ChecksConfig {
  double pressure = 1.0;
  PotentialSpec potential;
  GridSpec grid;
  std::vector<std::string> checks{"beta_mixture", "nu_density", "lipschitz", "free_energy"};
  std::size_t mixture_nodes = 21;
  std::vector<double> lipschitz_deltas{1e-1, 1e-2, 1e-3};
  FreeEnergySpec free_energy;
};

using CommandParams = std::variant<SampleConfig, SolveConfig, DosConfig, CompareConfig, ChecksConfig>;

struct ExperimentConfig {
  Command command = Command::sample;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  ///< 0 selects the available parallelism
  std::string out = "out";
  CommandParams params;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// InvalidInput. Potentials are built once here so that every parameter is
/// checked before any computation starts.
ExperimentConfig parse_config(Command command, const json& j);

/// Full resolved config, defaults included. parse_config(c, to_json(x)) == x.
json to_json(const ExperimentConfig& config);

/// Applies "dotted.key=value"; the value is read as JSON when it parses,
/// otherwise as a string.
void apply_override(json& j, const std::string& assignment);

}  // namespace toda::cli
