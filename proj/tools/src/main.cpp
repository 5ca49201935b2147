// toda: batch experiments over the Toda Lax-matrix samplers, the equilibrium
// solver, the density of states and the comparison metrics.
//
//   toda <sample|solve|dos|compare|checks> [--config FILE] [--set key=value]...
//        [--seed U64] [--workers N] [--out DIR]
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure. Errors are
// reported on stderr as one line of JSON.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toda/error.hpp"
#include "toda/parallel.hpp"
#include "toda_cli/artifacts.hpp"
#include "toda_cli/commands.hpp"
#include "toda_cli/config.hpp"

#ifndef TODA_VERSION
#define TODA_VERSION "unknown"
#endif

namespace {

using toda::cli::json;

struct Flags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
};

int report_error(const std::string& kind, const std::string& message, int code, const json& extra = json::object()) {
  json j{{"error", kind}, {"message", message}};
  j.update(extra);
  std::cerr << j.dump() << std::endl;
  return code;
}

json load_config(const Flags& flags) {
  json j = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream is(flags.config_path);
    if (!is) throw toda::InvalidInput("cannot open config file '" + flags.config_path + "'");
    j = json::parse(is, nullptr, false);
    if (j.is_discarded()) throw toda::InvalidInput("config file '" + flags.config_path + "' is not valid JSON");
  }
  for (const auto& o : flags.overrides) toda::cli::apply_override(j, o);
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.workers) j["workers"] = *flags.workers;
  if (flags.out) j["out"] = *flags.out;
  return j;
}

int run(toda::cli::Command command, const Flags& flags) {
  std::optional<toda::cli::Manifest> manifest;
  try {
    const auto config = toda::cli::parse_config(command, load_config(flags));
    const std::size_t workers = config.workers ? config.workers : toda::default_workers();
    manifest.emplace(config.out, toda::cli::to_json(config), TODA_VERSION, workers);
    manifest->start();
    const auto artifacts = toda::cli::run_command(config, workers);
    toda::cli::write_artifacts(config.out, artifacts);
    manifest->complete(artifacts);
    return 0;
  } catch (const toda::NotConverged& e) {
    if (manifest) manifest->fail("not_converged", e.what());
    return report_error("not_converged", e.what(), 2, {{"residual", e.residual()}});
  } catch (const toda::StepSizeError& e) {
    if (manifest) manifest->fail("step_size", e.what());
    return report_error("step_size", e.what(), 2, {{"negativity", e.negativity()}});
  } catch (const toda::DomainError& e) {
    if (manifest) manifest->fail("domain", e.what());
    return report_error("domain", e.what(), 1);
  } catch (const toda::InvalidInput& e) {
    if (manifest) manifest->fail("invalid_input", e.what());
    return report_error("invalid_input", e.what(), 1);
  } catch (const std::exception& e) {
    if (manifest) manifest->fail("io", e.what());
    return report_error("io", e.what(), 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toda Lax-matrix spectra, equilibrium measures and density of states"};
  app.set_version_flag("--version", TODA_VERSION);
  app.require_subcommand(1);

  Flags flags;
  std::optional<toda::cli::Command> chosen;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample", "Sample Lax-matrix spectra (toda, beta, profile or mcmc source)"},
      {"solve", "Solve for the equilibrium measure"},
      {"dos", "Density of states by P-differencing, or its mixture over a profile"},
      {"compare", "Distances and moments between a sample and a density"},
      {"checks", "Identity checks between the sampled and the variational sides"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--set", flags.overrides, "Override a config entry, e.g. --set grid.points=4000");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--workers", flags.workers, "Worker threads (0 = available parallelism)");
    sub->add_option("--out", flags.out, "Output directory");
    sub->callback([&chosen, name = name] { chosen = toda::cli::parse_command(name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 1);
  }
  return run(*chosen, flags);
}
