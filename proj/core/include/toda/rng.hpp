#pragma once

#include <cstdint>
#include <random>

namespace toda {

/// Deterministic random stream keyed by (master seed, stream id).
///
/// Every sampler in the library draws exclusively through this type, so a
/// replica's output is a pure function of its key and its parameters. Distinct
/// stream ids give independently seeded Mersenne twisters (the key is expanded
/// through std::seed_seq), which keeps replica results independent of how the
/// replicas are scheduled across workers.
///
/// Variate generation is implemented here rather than through the <random>
/// distribution classes, whose algorithms are implementation-defined; that
/// keeps outputs bit-identical across standard libraries.
class SeededStream {
 public:
  SeededStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  /// log of a Gamma(shape, 1) variate. Working in log space keeps tiny shapes
  /// (chi with dof ~ 1e-3) finite where the variate itself underflows.
  double log_gamma_variate(double shape);
  double gamma(double shape);

  /// Chi variate with real `dof` > 0: sqrt(2 * Gamma(dof/2, 1)). Results below
  /// the smallest normal double are clamped to it so the value stays positive.
  double chi(double dof);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Free-function form used by the samplers; throws InvalidInput for dof <= 0.
double sample_chi(SeededStream& stream, double dof);

}  // namespace toda
