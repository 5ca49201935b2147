#pragma once

#include <cstddef>
#include <vector>

#include "toda_cli/artifacts.hpp"
#include "toda_cli/config.hpp"

namespace toda::cli {

/// Runs one command entirely in memory. `workers` is already resolved (>= 1);
/// outputs do not depend on it.
std::vector<Artifact> run_command(const ExperimentConfig& config, std::size_t workers);

}  // namespace toda::cli
