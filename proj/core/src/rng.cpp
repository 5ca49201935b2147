#include "toda/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "toda/error.hpp"

namespace toda {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32), 0x70da6e5eU};
}

}  // namespace

SeededStream::SeededStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  auto seq = make_seed_seq(master_seed, stream_id);
  engine_.seed(seq);
}

double SeededStream::uniform() {
  // 53 random bits, shifted by half an ulp so that neither 0 nor 1 occurs.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double SeededStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_normal_ = true;
  return u * factor;
}

double SeededStream::log_gamma_variate(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidInput("gamma shape must be positive and finite, got " + std::to_string(shape));
  }
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a + 1) * U^(1/a).
    const double boosted = log_gamma_variate(shape + 1.0);
    return boosted + std::log(uniform()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double SeededStream::gamma(double shape) { return std::exp(log_gamma_variate(shape)); }

double SeededStream::chi(double dof) {
  if (!(dof > 0.0) || !std::isfinite(dof)) {
    throw InvalidInput("chi degrees of freedom must be positive and finite, got " +
                       std::to_string(dof));
  }
  const double log_x = 0.5 * (std::log(2.0) + log_gamma_variate(0.5 * dof));
  const double x = std::exp(log_x);
  return x > std::numeric_limits<double>::min() ? x : std::numeric_limits<double>::min();
}

double sample_chi(SeededStream& stream, double dof) { return stream.chi(dof); }

}  // namespace toda
