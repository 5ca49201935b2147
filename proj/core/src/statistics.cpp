#include "toda/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace toda {

MeanEstimate mean_with_stderr(std::span<const double> xs) {
  MeanEstimate out;
  out.count = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  out.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

double integrated_autocorrelation_time(std::span<const double> series, double window_factor) {
  const std::size_t n = series.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = series[i] - mean;
  double c0 = 0.0;
  for (double x : centred) c0 += x * x;
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 1.0;

  double tau = 1.0;
  for (std::size_t lag = 1; lag < n; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += centred[i] * centred[i + lag];
    c /= static_cast<double>(n);
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= window_factor * tau) break;
  }
  return std::max(tau, 1.0);
}

double effective_sample_size(std::span<const double> series) {
  if (series.empty()) return 0.0;
  const double n = static_cast<double>(series.size());
  return std::min(n, n / integrated_autocorrelation_time(series));
}

}  // namespace toda
