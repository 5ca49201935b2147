#include "toda_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "toda/dos.hpp"
#include "toda/error.hpp"
#include "toda/jacobi.hpp"
#include "toda/mcmc.hpp"
#include "toda/metrics.hpp"
#include "toda/parallel.hpp"
#include "toda/samplers.hpp"
#include "toda/statistics.hpp"

namespace toda::cli {

namespace {

constexpr int kMomentCount = 4;

McmcOptions mcmc_options(const McmcSpec& m) {
  McmcOptions o;
  o.sweeps = m.sweeps;
  o.thin = m.thin;
  o.burn_in_fraction = m.burn_in_fraction;
  o.adapt = m.adapt;
  return o;
}

std::string density_csv(const GridDensity& density) {
  std::ostringstream os;
  write_density_csv(os, density);
  return os.str();
}

json moments_json(const GridDensity& d) {
  json j = json::array();
  for (int k = 1; k <= kMomentCount; ++k) j.push_back(d.moment(k));
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// (1/N) E Tr L^2 for the exactly solvable sources.
double exact_second_moment(const SampleConfig& c) {
  const auto n = static_cast<double>(c.n);
  if (c.source == "toda") return 1.0 + 2.0 * c.pressure;
  if (c.source == "beta") return 1.0 + c.pressure * (n - 1.0) / n;
  const VarianceProfile sigma(c.profile);
  double s = 0.0;
  for (std::size_t i = 1; i <= c.n; ++i) s += sigma(static_cast<double>(i) / n);
  return 1.0 + 2.0 * s / n;
}

std::vector<Artifact> run_sample(const SampleConfig& c, std::uint64_t seed, std::size_t workers) {
  const Potential v = c.potential.build();
  const std::optional<VarianceProfile> sigma =
      c.source == "profile" ? std::optional<VarianceProfile>(VarianceProfile(c.profile)) : std::nullopt;
  std::vector<std::vector<double>> spectra(c.replicas);
  std::vector<McmcReport> chains(c.source == "mcmc" ? c.replicas : 0);

  parallel_for(c.replicas, workers, [&](std::size_t r) {
    SeededStream stream(seed, r);
    auto& out = spectra[r];
    if (c.source == "mcmc") {
      auto report = mcmc_toda(stream, c.n, c.pressure, v, mcmc_options(c.mcmc));
      for (const auto& m : report.samples) {
        const auto ev = eigenvalues(m);
        out.insert(out.end(), ev.values().begin(), ev.values().end());
      }
      std::sort(out.begin(), out.end());
      report.samples.clear();
      chains[r] = std::move(report);
      return;
    }
    const JacobiMatrix m = c.source == "toda"   ? sample_toda_matrix(stream, c.n, c.pressure)
                           : c.source == "beta" ? sample_beta_matrix(stream, c.n, c.pressure)
                                                : sample_profile_matrix(stream, c.n, *sigma);
    const auto ev = eigenvalues(m);
    out.assign(ev.values().begin(), ev.values().end());
  });

  std::string csv = "replica,lambda\n";
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    for (double x : spectra[r]) csv += std::to_string(r) + "," + format_double(x) + "\n";
  }

  json summary{{"source", c.source}, {"n", c.n}, {"pressure", c.pressure}, {"replicas", c.replicas}};
  json moments = json::array();
  for (int k = 1; k <= kMomentCount; ++k) {
    std::vector<double> per_replica;
    for (const auto& s : spectra) {
      double acc = 0.0;
      for (double x : s) acc += std::pow(x, k);
      per_replica.push_back(acc / static_cast<double>(s.size()));
    }
    const auto est = mean_with_stderr(per_replica);
    moments.push_back({{"k", k}, {"mean", est.mean}, {"stderr", est.stderr_}});
  }
  summary["moments"] = moments;
  if (c.source == "mcmc") {
    json per_chain = json::array();
    double ess = 0.0;
    for (const auto& ch : chains) {
      ess += ch.effective_sample_size;
      per_chain.push_back({{"acceptance_diag", ch.acceptance_diag},
                           {"acceptance_offdiag", ch.acceptance_offdiag},
                           {"autocorrelation_time", ch.autocorrelation_time},
                           {"effective_sample_size", ch.effective_sample_size},
                           {"kept_samples", ch.trace_square_series.size()},
                           {"off_table_rejections", ch.off_table_rejections}});
    }
    summary["chains"] = per_chain;
    summary["effective_sample_size"] = ess;
  } else {
    summary["exact_second_moment"] = exact_second_moment(c);
  }
  return {{"eigenvalues.csv", csv}, {"summary.json", dump(summary)}};
}

std::vector<Artifact> run_solve(const SolveConfig& c) {
  const Potential v = c.potential.build();
  const LogKernel kernel(c.grid.build(c.pressure, v));
  const auto s = solve_equilibrium(c.pressure, v, kernel, c.solver.build());
  s.require_converged();
  json report{{"pressure", s.pressure},
              {"lambda", s.lambda},
              {"free_energy", s.free_energy},
              {"log_energy", s.log_energy},
              {"residual", s.residual},
              {"tol", c.solver.tol},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"final_damping", s.final_damping},
              {"half_width", kernel.grid().half_width()},
              {"points", kernel.grid().size()},
              {"mass", s.density.mass()},
              {"moments", moments_json(s.density)}};
  return {{"density.csv", density_csv(s.density)}, {"solution.json", dump(report)}};
}

std::vector<Artifact> run_dos(const DosConfig& c, std::size_t workers) {
  const Potential v = c.potential.build();
  DosOptions opt;
  opt.fd_step = c.fd_step;
  opt.negativity_ceiling = c.negativity_ceiling;
  opt.solver = c.solver.build();
  json report{{"potential", v.describe()}};
  if (c.profile.empty()) {
    const double top = c.pressure + (c.fd_step > 0.0 ? c.fd_step : default_fd_step(c.pressure));
    const LogKernel kernel(c.grid.build(top, v));
    const auto d = dos_from_equilibrium(c.pressure, v, kernel, opt);
    report.update({{"pressure", c.pressure},
                   {"fd_step", d.fd_step},
                   {"negativity", d.negativity},
                   {"pre_clip_mass", d.pre_clip_mass},
                   {"mass", d.nu.mass()},
                   {"moments", moments_json(d.nu)},
                   {"residuals", {d.lower.residual, d.upper.residual}}});
    return {{"nu.csv", density_csv(d.nu)}, {"dos.json", dump(report)}};
  }
  const VarianceProfile sigma(c.profile);
  const LogKernel kernel(c.grid.build(1.05 * sigma.max(), v));
  const auto nu = mixture_over_profile(sigma, v, kernel, {.nodes = c.nodes, .dos = opt, .workers = workers});
  report.update({{"profile", c.profile},
                 {"nodes", c.nodes},
                 {"mass", nu.mass()},
                 {"moments", moments_json(nu)}});
  return {{"nu.csv", density_csv(nu)}, {"dos.json", dump(report)}};
}

GridDensity read_density_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open density file '" + path + "'");
  return read_density_csv(is);
}

std::string first_line(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open '" + path + "'");
  std::string line;
  std::getline(is, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

EmpiricalSpectralMeasure read_eigenvalue_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open eigenvalue file '" + path + "'");
  std::string line;
  std::getline(is, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "replica,lambda") throw InvalidInput("eigenvalue CSV: header must be 'replica,lambda'");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("eigenvalue CSV: malformed row '" + line + "'");
    try {
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw InvalidInput("eigenvalue CSV: malformed row '" + line + "'");
    }
  }
  return EmpiricalSpectralMeasure(std::move(values));
}

std::vector<Artifact> run_compare(const CompareConfig& c) {
  const GridDensity theory = read_density_file(c.density);
  const Grid& grid = theory.grid();
  const LogKernel kernel(grid);
  json report{{"eigenvalues", c.eigenvalues}, {"density", c.density}};
  std::vector<double> histogram(grid.size(), 0.0);
  json moment_rows = json::array();
  double d = 0.0, ks = 0.0, big_d = 0.0;

  if (first_line(c.eigenvalues) == "x,rho") {
    const GridDensity other = read_density_file(c.eigenvalues);
    if (!(other.grid() == grid)) throw DomainError("compare: the two densities live on different grids");
    d = bl_bv_distance(other, theory);
    ks = ks_distance(other, theory);
    big_d = log_energy_distance(other, theory, kernel);
    for (std::size_t i = 0; i < grid.size(); ++i) histogram[i] = other[i];
    for (int k = 1; k <= kMomentCount; ++k) {
      moment_rows.push_back({{"k", k}, {"empirical", other.moment(k)}, {"theory", theory.moment(k)}});
    }
    report["input"] = "density";
  } else {
    const auto sample = read_eigenvalue_file(c.eigenvalues);
    const auto values = sample.values();
    if (values.front() < -grid.half_width() || values.back() > grid.half_width()) {
      throw DomainError("compare: eigenvalues leave the density domain [-L, L]");
    }
    const double bandwidth = c.bandwidth > 0.0 ? c.bandwidth : default_bandwidth(sample);
    d = bl_bv_distance(sample, theory);
    ks = ks_distance(sample, theory);
    big_d = log_energy_distance(smooth_empirical(sample, grid, bandwidth), theory, kernel);
    const double cell_weight = sample.weight() / grid.spacing();
    for (double x : values) {
      const auto i = static_cast<std::size_t>(
          std::clamp((x + grid.half_width()) / grid.spacing(), 0.0, static_cast<double>(grid.size() - 1)));
      histogram[i] += cell_weight;
    }
    for (int k = 1; k <= kMomentCount; ++k) {
      moment_rows.push_back({{"k", k}, {"empirical", sample.moment(k)}, {"theory", theory.moment(k)}});
    }
    report["input"] = "eigenvalues";
    report["atoms"] = sample.size();
    report["bandwidth"] = bandwidth;
  }
  report["bl_bv_distance"] = d;
  report["ks_distance"] = ks;
  report["log_energy_distance"] = big_d;
  report["moments"] = moment_rows;

  std::string overlay = "x,theory,histogram\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    overlay += format_double(grid.x(i)) + "," + format_double(theory[i]) + "," + format_double(histogram[i]) + "\n";
  }
  return {{"comparison.json", dump(report)}, {"overlay.csv", overlay}};
}

// Pass thresholds for the identity checks.
constexpr double kMixtureGap = 1e-2;
constexpr double kNuResidual = 5e-3;
constexpr double kNuFactorFloor = -1e-6;
constexpr double kLipschitzGrowth = 1.1;
constexpr double kFreeEnergySigmas = 3.0;
constexpr double kFreeEnergyFloor = 0.02;

std::vector<Artifact> run_checks(const ChecksConfig& c, std::uint64_t seed, std::size_t workers) {
  const Potential v = c.potential.build();
  const double top = c.pressure + *std::max_element(c.lipschitz_deltas.begin(), c.lipschitz_deltas.end());
  const LogKernel kernel(c.grid.build(top, v));
  json results = json::array();
  bool all = true;
  auto add = [&](json entry, bool pass) {
    entry["pass"] = pass;
    all = all && pass;
    results.push_back(std::move(entry));
  };

  for (const auto& name : c.checks) {
    if (name == "beta_mixture") {
      const auto r = beta_mixture_check(c.pressure, v, kernel, {.nodes = c.mixture_nodes, .workers = workers});
      add({{"name", name},
           {"sup_cdf_gap", r.sup_cdf_gap},
           {"threshold", kMixtureGap},
           {"mixture_second_moment", r.mixture_second_moment},
           {"mu_second_moment", r.mu_second_moment},
           {"anchored_nodes", r.anchored_nodes}},
          r.sup_cdf_gap <= kMixtureGap);
    } else if (name == "nu_density") {
      const auto r = nu_density_relation_check(c.pressure, v, kernel);
      add({{"name", name},
           {"constant", r.constant},
           {"residual", r.residual},
           {"residual_threshold", kNuResidual},
           {"normalization", r.normalization},
           {"min_factor", r.min_factor}},
          r.residual <= kNuResidual && r.min_factor >= kNuFactorFloor);
    } else if (name == "lipschitz") {
      const auto r = log_energy_lipschitz_sweep(c.pressure, v, kernel, c.lipschitz_deltas);
      const double largest = *std::max_element(r.ratios.begin(), r.ratios.end());
      add({{"name", name}, {"deltas", r.deltas}, {"ratios", r.ratios}, {"growth_limit", kLipschitzGrowth}},
          std::isfinite(largest) && largest <= kLipschitzGrowth * r.ratios.front());
    } else if (name == "free_energy") {
      FreeEnergyCheckOptions opt;
      opt.alpha_nodes = c.free_energy.alpha_nodes;
      opt.alpha_rule = c.free_energy.alpha_rule == "trapezoid" ? AlphaRule::trapezoid : AlphaRule::gauss_legendre;
      opt.replicas = c.free_energy.replicas;
      opt.mcmc = mcmc_options(c.free_energy.mcmc);
      opt.seed = seed;
      opt.workers = workers;
      const auto r = free_energy_relation_check(c.pressure, v, c.free_energy.n, opt);
      const double allowed = std::max(kFreeEnergySigmas * r.lhs_stderr, kFreeEnergyFloor);
      add({{"name", name},
           {"lhs", r.lhs},
           {"lhs_stderr", r.lhs_stderr},
           {"rhs", r.rhs},
           {"allowed", allowed},
           {"alphas", r.alphas},
           {"node_means", r.node_means},
           {"node_ess", r.node_ess},
           {"reliable", r.reliable}},
          std::abs(r.lhs - r.rhs) <= allowed && r.reliable);
    }
  }
  json report{{"pressure", c.pressure}, {"potential", v.describe()}, {"checks", results}, {"all_pass", all}};
  return {{"checks.json", dump(report)}};
}

}  // namespace

std::vector<Artifact> run_command(const ExperimentConfig& config, std::size_t workers) {
  return std::visit(
      [&](const auto& p) -> std::vector<Artifact> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SampleConfig>) return run_sample(p, config.seed, workers);
        if constexpr (std::is_same_v<T, SolveConfig>) return run_solve(p);
        if constexpr (std::is_same_v<T, DosConfig>) return run_dos(p, workers);
        if constexpr (std::is_same_v<T, CompareConfig>) return run_compare(p);
        if constexpr (std::is_same_v<T, ChecksConfig>) return run_checks(p, config.seed, workers);
      },
      config.params);
}

}  // namespace toda::cli
