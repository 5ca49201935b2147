#pragma once

#include <cstddef>
#include <vector>

#include "toda/jacobi.hpp"
#include "toda/potential.hpp"
#include "toda/rng.hpp"

namespace toda {

/// Random-walk step sizes: additive Gaussian on a_i, multiplicative
/// log-normal on b_i (the log of b moves by scale * N(0,1)).
struct ProposalScales {
  double diag = 1.0;
  double offdiag = 0.5;
};

struct McmcOptions {
  std::size_t sweeps = 1000;  ///< total, burn-in included
  std::size_t thin = 1;
  ProposalScales scales;
  double burn_in_fraction = 0.2;
  bool adapt = true;               ///< tune scales toward ~35% acceptance during burn-in
  std::size_t adapt_interval = 20;  ///< sweeps between scale updates
  bool keep_samples = true;
};

struct McmcReport {
  std::vector<JacobiMatrix> samples;          ///< thinned, post burn-in
  std::vector<double> trace_square_series;    ///< (1/N) Tr L^2 per kept sample
  std::vector<double> trace_potential_series;  ///< (1/N) Tr V(L) per kept sample
  double acceptance_diag = 0.0;                ///< post burn-in
  double acceptance_offdiag = 0.0;
  std::size_t nonpositive_rejections = 0;
  /// Tabulated V only: proposals whose spectrum left the table.
  std::size_t off_table_rejections = 0;
  double autocorrelation_time = 1.0;  ///< of (1/N) Tr L^2, in kept-sample units
  double effective_sample_size = 0.0;
  std::size_t sweeps = 0;
  std::size_t burn_in_sweeps = 0;
  ProposalScales final_scales;
};

/// Largest N accepted for tabulated potentials (each move re-diagonalizes).
inline constexpr std::size_t kMaxTabulatedMcmcSize = 400;

/// min(1, exp(log_ratio)).
double metropolis_acceptance(double log_ratio);

/// One Metropolis decision; draws a uniform only when log_ratio < 0.
bool metropolis_accept(SeededStream& stream, double log_ratio);

/// Metropolis-within-Gibbs chain for the Toda Gibbs measure with potential V.
///
/// State: (a_i, b_i), i = 1..N, periodic. The V = 0 base law is N(0, 1) on a_i
/// and density proportional to b^{2P-1} e^{-b^2} on b_i; each move multiplies
/// the base ratio by exp(-(Tr V(L') - Tr V(L))). For V = 0 every move is an
/// exact draw from the base law and is always accepted. The chain starts from
/// an exact V = 0 sample.
McmcReport mcmc_toda(SeededStream& stream, std::size_t n, double pressure, const Potential& v,
                     const McmcOptions& options);

}  // namespace toda
