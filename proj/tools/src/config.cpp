#include "toda_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <type_traits>

#include "toda/error.hpp"

namespace toda::cli {

namespace {

class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidInput(where_ + ": expected a JSON object");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw InvalidInput(path(key) + ": expected true or false");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
        throw InvalidInput(path(key) + ": expected a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw InvalidInput(path(key) + ": expected a number");
    }
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw InvalidInput(path(key) + ": wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw InvalidInput("config: unknown key '" + path(item.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidInput("config: " + message);
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

PotentialSpec read_potential(Fields& parent, const std::string& key) {
  PotentialSpec p;
  const json* j = parent.child(key);
  if (!j) return p;
  Fields f(*j, parent.path(key));
  f.read("kind", p.kind);
  f.read("coefficients", p.coefficients);
  f.read("x", p.table_x);
  f.read("v", p.table_v);
  std::vector<double> envelope;
  f.read("envelope", envelope);
  f.read("slack", p.slack);
  f.finish();
  require(p.kind == "zero" || p.kind == "polynomial" || p.kind == "tabulated",
          "potential.kind must be zero, polynomial or tabulated");
  if (p.kind == "tabulated") {
    require(p.coefficients.empty(), "a tabulated potential takes 'envelope', not 'coefficients'");
    p.coefficients = std::move(envelope);
  } else {
    require(envelope.empty() && p.table_x.empty() && p.table_v.empty(),
            "x, v and envelope belong to tabulated potentials only");
  }
  p.build();
  return p;
}

json potential_json(const PotentialSpec& p) {
  json j{{"kind", p.kind}};
  if (p.kind == "polynomial") j["coefficients"] = p.coefficients;
  if (p.kind == "tabulated") {
    j["x"] = p.table_x;
    j["v"] = p.table_v;
    j["envelope"] = p.coefficients;
    j["slack"] = p.slack;
  }
  return j;
}

GridSpec read_grid(Fields& parent) {
  GridSpec g;
  if (const json* j = parent.child("grid")) {
    Fields f(*j, parent.path("grid"));
    f.read("points", g.points);
    f.read("half_width", g.half_width);
    f.finish();
  }
  require(g.points >= kMinGridPoints, "grid.points must be >= " + std::to_string(kMinGridPoints));
  require(g.half_width == 0.0 || positive(g.half_width), "grid.half_width must be positive (or 0 for automatic)");
  return g;
}

json grid_json(const GridSpec& g) { return {{"points", g.points}, {"half_width", g.half_width}}; }

SolverSpec read_solver(Fields& parent, SolverSpec s) {
  if (const json* j = parent.child("solver")) {
    Fields f(*j, parent.path("solver"));
    f.read("tol", s.tol);
    f.read("damping", s.damping);
    f.read("max_iter", s.max_iter);
    f.finish();
  }
  require(positive(s.tol), "solver.tol must be positive");
  require(s.damping > 0.0 && s.damping <= 1.0, "solver.damping must lie in (0, 1]");
  require(s.max_iter >= 1, "solver.max_iter must be >= 1");
  return s;
}

json solver_json(const SolverSpec& s) { return {{"tol", s.tol}, {"damping", s.damping}, {"max_iter", s.max_iter}}; }

McmcSpec read_mcmc(Fields& parent, McmcSpec m) {
  if (const json* j = parent.child("mcmc")) {
    Fields f(*j, parent.path("mcmc"));
    f.read("sweeps", m.sweeps);
    f.read("thin", m.thin);
    f.read("burn_in_fraction", m.burn_in_fraction);
    f.read("adapt", m.adapt);
    f.finish();
  }
  require(m.sweeps >= 1, "mcmc.sweeps must be >= 1");
  require(m.thin >= 1, "mcmc.thin must be >= 1");
  require(m.burn_in_fraction >= 0.0 && m.burn_in_fraction < 1.0, "mcmc.burn_in_fraction must lie in [0, 1)");
  require(static_cast<double>(m.sweeps) * (1.0 - m.burn_in_fraction) >= static_cast<double>(m.thin),
          "mcmc keeps no samples: sweeps after burn-in must reach thin");
  return m;
}

json mcmc_json(const McmcSpec& m) {
  return {{"sweeps", m.sweeps}, {"thin", m.thin}, {"burn_in_fraction", m.burn_in_fraction}, {"adapt", m.adapt}};
}

void check_profile(const std::vector<double>& profile, const std::string& what) {
  require(!profile.empty(), what + " needs at least one node");
  for (double s : profile) require(positive(s), what + " values must be positive");
}

SampleConfig read_sample(Fields& f) {
  SampleConfig c;
  f.read("source", c.source);
  f.read("n", c.n);
  f.read("pressure", c.pressure);
  f.read("profile", c.profile);
  c.potential = read_potential(f, "potential");
  f.read("replicas", c.replicas);
  c.mcmc = read_mcmc(f, c.mcmc);
  require(c.source == "toda" || c.source == "beta" || c.source == "profile" || c.source == "mcmc",
          "source must be toda, beta, profile or mcmc");
  require(c.n >= (c.source == "beta" ? 2u : 3u), "n too small for source " + c.source);
  require(positive(c.pressure), "pressure must be positive");
  require(c.replicas >= 1, "replicas must be >= 1");
  if (c.source == "profile") check_profile(c.profile, "profile");
  require(c.source == "mcmc" || c.potential.kind == "zero", "a non-zero potential needs source mcmc");
  if (c.source == "mcmc" && c.potential.kind == "tabulated") {
    require(c.n <= 400, "tabulated-potential MCMC is limited to n <= 400");
  }
  return c;
}

json sample_json(const SampleConfig& c) {
  return {{"source", c.source},   {"n", c.n},
          {"pressure", c.pressure}, {"profile", c.profile},
          {"potential", potential_json(c.potential)}, {"replicas", c.replicas},
          {"mcmc", mcmc_json(c.mcmc)}};
}

SolveConfig read_solve(Fields& f) {
  SolveConfig c;
  f.read("pressure", c.pressure);
  c.potential = read_potential(f, "potential");
  c.grid = read_grid(f);
  c.solver = read_solver(f, c.solver);
  require(c.pressure >= 0.0 && std::isfinite(c.pressure), "pressure must be non-negative");
  return c;
}

json solve_json(const SolveConfig& c) {
  return {{"pressure", c.pressure},
          {"potential", potential_json(c.potential)},
          {"grid", grid_json(c.grid)},
          {"solver", solver_json(c.solver)}};
}

DosConfig read_dos(Fields& f) {
  DosConfig c;
  f.read("pressure", c.pressure);
  f.read("profile", c.profile);
  c.potential = read_potential(f, "potential");
  c.grid = read_grid(f);
  f.read("fd_step", c.fd_step);
  f.read("negativity_ceiling", c.negativity_ceiling);
  f.read("nodes", c.nodes);
  c.solver = read_solver(f, c.solver);
  require(positive(c.pressure), "pressure must be positive");
  if (!c.profile.empty()) check_profile(c.profile, "profile");
  require(c.fd_step >= 0.0 && std::isfinite(c.fd_step), "fd_step must be non-negative (0 for automatic)");
  require(c.negativity_ceiling >= 0.0, "negativity_ceiling must be non-negative");
  require(c.nodes >= 5, "nodes must be >= 5");
  return c;
}

json dos_json(const DosConfig& c) {
  return {{"pressure", c.pressure},
          {"profile", c.profile},
          {"potential", potential_json(c.potential)},
          {"grid", grid_json(c.grid)},
          {"fd_step", c.fd_step},
          {"negativity_ceiling", c.negativity_ceiling},
          {"nodes", c.nodes},
          {"solver", solver_json(c.solver)}};
}

CompareConfig read_compare(Fields& f) {
  CompareConfig c;
  f.read("eigenvalues", c.eigenvalues);
  f.read("density", c.density);
  f.read("bandwidth", c.bandwidth);
  require(!c.eigenvalues.empty(), "eigenvalues must name a CSV file");
  require(!c.density.empty(), "density must name a CSV file");
  require(c.bandwidth >= 0.0 && std::isfinite(c.bandwidth), "bandwidth must be non-negative (0 for automatic)");
  return c;
}

json compare_json(const CompareConfig& c) {
  return {{"eigenvalues", c.eigenvalues}, {"density", c.density}, {"bandwidth", c.bandwidth}};
}

ChecksConfig read_checks(Fields& f) {
  ChecksConfig c;
  f.read("pressure", c.pressure);
  c.potential = read_potential(f, "potential");
  c.grid = read_grid(f);
  f.read("checks", c.checks);
  f.read("mixture_nodes", c.mixture_nodes);
  f.read("lipschitz_deltas", c.lipschitz_deltas);
  if (const json* j = f.child("free_energy")) {
    Fields g(*j, "free_energy");
    g.read("n", c.free_energy.n);
    g.read("alpha_nodes", c.free_energy.alpha_nodes);
    g.read("alpha_rule", c.free_energy.alpha_rule);
    g.read("replicas", c.free_energy.replicas);
    c.free_energy.mcmc = read_mcmc(g, c.free_energy.mcmc);
    g.finish();
  }
  require(positive(c.pressure), "pressure must be positive");
  require(!c.checks.empty(), "checks must list at least one check");
  for (const auto& name : c.checks) {
    require(name == "beta_mixture" || name == "nu_density" || name == "lipschitz" || name == "free_energy",
            "unknown check '" + name + "'");
  }
  require(c.mixture_nodes >= 2, "mixture_nodes must be >= 2");
  require(!c.lipschitz_deltas.empty(), "lipschitz_deltas must not be empty");
  for (double d : c.lipschitz_deltas) require(positive(d), "lipschitz_deltas must be positive");
  const auto& fe = c.free_energy;
  require(fe.n >= 3 && fe.n <= 400, "free_energy.n must lie in [3, 400]");
  require(fe.alpha_nodes >= 2 && fe.replicas >= 2, "free_energy needs >= 2 alpha nodes and >= 2 replicas");
  require(fe.alpha_rule == "gauss_legendre" || fe.alpha_rule == "trapezoid",
          "free_energy.alpha_rule must be gauss_legendre or trapezoid");
  require(c.potential.kind != "tabulated" || std::find(c.checks.begin(), c.checks.end(), "free_energy") == c.checks.end(),
          "the free_energy check needs a polynomial potential");
  return c;
}

json checks_json(const ChecksConfig& c) {
  const auto& fe = c.free_energy;
  return {{"pressure", c.pressure},
          {"potential", potential_json(c.potential)},
          {"grid", grid_json(c.grid)},
          {"checks", c.checks},
          {"mixture_nodes", c.mixture_nodes},
          {"lipschitz_deltas", c.lipschitz_deltas},
          {"free_energy",
           {{"n", fe.n},
            {"alpha_nodes", fe.alpha_nodes},
            {"alpha_rule", fe.alpha_rule},
            {"replicas", fe.replicas},
            {"mcmc", mcmc_json(fe.mcmc)}}}};
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "sample") return Command::sample;
  if (name == "solve") return Command::solve;
  if (name == "dos") return Command::dos;
  if (name == "compare") return Command::compare;
  if (name == "checks") return Command::checks;
  throw InvalidInput("unknown command '" + name + "'");
}

std::string command_name(Command command) {
  switch (command) {
    case Command::sample: return "sample";
    case Command::solve: return "solve";
    case Command::dos: return "dos";
    case Command::compare: return "compare";
    case Command::checks: return "checks";
  }
  return "?";
}

Potential PotentialSpec::build() const {
  if (kind == "zero") return Potential::zero();
  if (kind == "polynomial") return Potential::polynomial(coefficients);
  if (kind == "tabulated") return Potential::tabulated(table_x, table_v, coefficients, slack);
  throw InvalidInput("unknown potential kind '" + kind + "'");
}

Grid GridSpec::build(double pressure, const Potential& v) const {
  return Grid(half_width > 0.0 ? half_width : domain_auto(pressure, v), points);
}

SolverOptions SolverSpec::build() const { return {.damping = damping, .tol = tol, .max_iter = max_iter}; }

ExperimentConfig parse_config(Command command, const json& j) {
  ExperimentConfig c;
  c.command = command;
  Fields f(j, "");
  std::string stated = command_name(command);
  f.read("command", stated);
  require(stated == command_name(command), "file is for command '" + stated + "', not '" + command_name(command) + "'");
  f.read("seed", c.seed);
  f.read("workers", c.workers);
  f.read("out", c.out);
  require(!c.out.empty(), "out must name a directory");
  switch (command) {
    case Command::sample: c.params = read_sample(f); break;
    case Command::solve: c.params = read_solve(f); break;
    case Command::dos: c.params = read_dos(f); break;
    case Command::compare: c.params = read_compare(f); break;
    case Command::checks: c.params = read_checks(f); break;
  }
  f.finish();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SampleConfig>) return sample_json(p);
        if constexpr (std::is_same_v<T, SolveConfig>) return solve_json(p);
        if constexpr (std::is_same_v<T, DosConfig>) return dos_json(p);
        if constexpr (std::is_same_v<T, CompareConfig>) return compare_json(p);
        if constexpr (std::is_same_v<T, ChecksConfig>) return checks_json(p);
      },
      c.params);
  j["command"] = command_name(c.command);
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out"] = c.out;
  return j;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidInput("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw InvalidInput("override key has an empty component: '" + key + "'");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace toda::cli
