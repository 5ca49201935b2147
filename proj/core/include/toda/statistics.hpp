#pragma once

#include <cstddef>
#include <span>

namespace toda {

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  ///< standard error of the mean (sample sd / sqrt(n))
  std::size_t count = 0;
};

MeanEstimate mean_with_stderr(std::span<const double> xs);

/// Integrated autocorrelation time tau = 1 + 2 sum_k rho_k with Sokal's
/// self-consistent window (smallest W with W >= c * tau(W), c = 5).
/// Returns 1 for constant series.
double integrated_autocorrelation_time(std::span<const double> series, double window_factor = 5.0);

/// n / tau, capped at n.
double effective_sample_size(std::span<const double> series);

}  // namespace toda
