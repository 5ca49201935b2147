#include "toda/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_pressure(double p, const char* what) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

std::vector<double> normal_diagonal(SeededStream& stream, std::size_t n) {
  std::vector<double> diag(n);
  for (auto& a : diag) a = stream.normal();
  return diag;
}

}  // namespace

VarianceProfile::VarianceProfile(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidInput("variance profile needs at least one node");
  for (double v : nodes_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("variance profile node values must be positive and finite");
    }
  }
  const auto [lo, hi] = std::minmax_element(nodes_.begin(), nodes_.end());
  min_ = *lo;
  max_ = *hi;
}

double VarianceProfile::operator()(double x) const {
  if (nodes_.size() == 1) return nodes_.front();
  const double t = std::clamp(x, 0.0, 1.0) * static_cast<double>(nodes_.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(t), nodes_.size() - 2);
  const double frac = t - static_cast<double>(k);
  return (1.0 - frac) * nodes_[k] + frac * nodes_[k + 1];
}

JacobiMatrix sample_toda_matrix(SeededStream& stream, std::size_t n, double pressure) {
  if (n < 3) throw InvalidInput("Toda matrix needs N >= 3");
  require_pressure(pressure, "pressure P");
  auto diag = normal_diagonal(stream, n);
  std::vector<double> off(n);
  for (auto& b : off) b = kInvSqrt2 * stream.chi(2.0 * pressure);
  return JacobiMatrix(std::move(diag), std::move(off), true);
}

JacobiMatrix sample_beta_matrix(SeededStream& stream, std::size_t n, double pressure) {
  if (n < 2) throw InvalidInput("beta matrix needs N >= 2");
  require_pressure(pressure, "pressure P");
  const double beta = 2.0 * pressure / static_cast<double>(n);
  auto diag = normal_diagonal(stream, n);
  std::vector<double> off(n - 1);
  for (std::size_t j = 1; j < n; ++j) {
    off[j - 1] = kInvSqrt2 * stream.chi(static_cast<double>(n - j) * beta);
  }
  return JacobiMatrix(std::move(diag), std::move(off), false);
}

JacobiMatrix sample_profile_matrix(SeededStream& stream, std::size_t n,
                                   const VarianceProfile& sigma) {
  if (n < 3) throw InvalidInput("profile matrix needs N >= 3");
  auto diag = normal_diagonal(stream, n);
  std::vector<double> off(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    off[i - 1] = kInvSqrt2 * stream.chi(2.0 * sigma(x));
  }
  return JacobiMatrix(std::move(diag), std::move(off), true);
}

std::pair<JacobiMatrix, JacobiMatrix> sample_coupled_toda(SeededStream& stream, std::size_t n,
                                                          double s, double h) {
  if (n < 3) throw InvalidInput("coupled Toda matrices need N >= 3");
  require_pressure(s, "base pressure s");
  require_pressure(h, "pressure increment h");
  auto diag = normal_diagonal(stream, n);
  std::vector<double> base(n), raised(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = kInvSqrt2 * stream.chi(2.0 * s);
    const double increment = kInvSqrt2 * stream.chi(2.0 * h);
    raised[i] = std::max(base[i], std::hypot(base[i], increment));
  }
  JacobiMatrix first(diag, std::move(base), true);
  JacobiMatrix second(std::move(diag), std::move(raised), true);
  return {std::move(first), std::move(second)};
}

}  // namespace toda
