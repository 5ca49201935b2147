#include "toda/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "toda/error.hpp"
#include "toda/samplers.hpp"
#include "toda/statistics.hpp"

namespace toda {

namespace {

constexpr double kTargetAcceptance = 0.35;
constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Counter {
  std::size_t tried = 0;
  std::size_t accepted = 0;
  double rate() const { return tried ? static_cast<double>(accepted) / static_cast<double>(tried) : 0.0; }
};

class Chain {
 public:
  Chain(SeededStream& stream, std::size_t n, double pressure, const Potential& v,
        const ProposalScales& scales)
      : stream_(stream), n_(n), pressure_(pressure), v_(v), scales_(scales) {
    const auto start = sample_toda_matrix(stream_, n_, pressure_);
    diag_.assign(start.diag().begin(), start.diag().end());
    off_.assign(start.offdiag().begin(), start.offdiag().end());
    if (!v_.is_polynomial()) total_trace_v_ = static_cast<double>(n_) * trace_potential(matrix(), v_);
  }

  JacobiMatrix matrix() const { return JacobiMatrix(diag_, off_, true); }

  void sweep() {
    for (std::size_t i = 0; i < n_; ++i) {
      update_diag(i);
      update_offdiag(i);
    }
  }

  Counter& diag_counter() { return diag_count_; }
  Counter& offdiag_counter() { return off_count_; }
  ProposalScales& scales() { return scales_; }
  std::size_t nonpositive() const { return nonpositive_; }
  std::size_t off_table() const { return off_table_; }

 private:
  double trace_delta(std::size_t site, EntryKind kind, double value) {
    if (v_.is_zero()) return 0.0;
    if (v_.is_polynomial()) {
      return local_trace_delta(diag_, off_, true, site, kind, value, v_.coefficients());
    }
    auto d = diag_;
    auto o = off_;
    (kind == EntryKind::diag ? d : o)[site] = value;
    const auto spectrum = eigenvalues(JacobiMatrix(std::move(d), std::move(o), true));
    const auto values = spectrum.values();
    if (values.front() < v_.table_min() || values.back() > v_.table_max()) {
      // V is unknown off the table, so such proposals are treated as outside the support.
      ++off_table_;
      return std::numeric_limits<double>::infinity();
    }
    double proposed = 0.0;
    for (double x : values) proposed += v_.v(x);
    pending_trace_v_ = proposed;
    return proposed - total_trace_v_;
  }

  void commit_trace() {
    if (!v_.is_polynomial()) total_trace_v_ = pending_trace_v_;
  }

  void update_diag(std::size_t i) {
    ++diag_count_.tried;
    const double current = diag_[i];
    if (v_.is_zero()) {
      diag_[i] = stream_.normal();
      ++diag_count_.accepted;
      return;
    }
    const double proposal = current + scales_.diag * stream_.normal();
    const double log_ratio =
        -0.5 * (proposal * proposal - current * current) - trace_delta(i, EntryKind::diag, proposal);
    if (metropolis_accept(stream_, log_ratio)) {
      diag_[i] = proposal;
      commit_trace();
      ++diag_count_.accepted;
    }
  }

  void update_offdiag(std::size_t i) {
    ++off_count_.tried;
    const double current = off_[i];
    if (v_.is_zero()) {
      off_[i] = kInvSqrt2 * stream_.chi(2.0 * pressure_);
      ++off_count_.accepted;
      return;
    }
    const double step = scales_.offdiag * stream_.normal();
    const double proposal = current * std::exp(step);
    if (!(proposal > 0.0) || !std::isfinite(proposal)) {
      ++nonpositive_;
      return;
    }
    // Target b^{2P-1} e^{-b^2} times the log-normal Jacobian b'/b.
    const double log_ratio = 2.0 * pressure_ * step - (proposal * proposal - current * current) -
                             trace_delta(i, EntryKind::offdiag, proposal);
    if (metropolis_accept(stream_, log_ratio)) {
      off_[i] = proposal;
      commit_trace();
      ++off_count_.accepted;
    }
  }

  SeededStream& stream_;
  std::size_t n_;
  double pressure_;
  const Potential& v_;
  ProposalScales scales_;
  std::vector<double> diag_;
  std::vector<double> off_;
  double total_trace_v_ = 0.0;
  double pending_trace_v_ = 0.0;
  Counter diag_count_;
  Counter off_count_;
  std::size_t nonpositive_ = 0;
  std::size_t off_table_ = 0;
};

double retune(double scale, double rate) {
  return std::clamp(scale * std::exp(2.0 * (rate - kTargetAcceptance)), 1e-6, 1e3);
}

}  // namespace

double metropolis_acceptance(double log_ratio) {
  if (std::isnan(log_ratio)) return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

bool metropolis_accept(SeededStream& stream, double log_ratio) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(stream.uniform()) < log_ratio;
}

McmcReport mcmc_toda(SeededStream& stream, std::size_t n, double pressure, const Potential& v,
                     const McmcOptions& options) {
  if (n < 3) throw InvalidInput("MCMC needs N >= 3");
  if (!(pressure > 0.0) || !std::isfinite(pressure)) throw InvalidInput("pressure P must be positive");
  if (options.sweeps < 1) throw InvalidInput("MCMC needs at least one sweep");
  if (options.thin < 1) throw InvalidInput("thinning interval must be >= 1");
  if (!(options.burn_in_fraction >= 0.0 && options.burn_in_fraction < 1.0)) {
    throw InvalidInput("burn-in fraction must lie in [0, 1)");
  }
  if (!(options.scales.diag >= 0.0) || !(options.scales.offdiag >= 0.0)) {
    throw InvalidInput("proposal scales must be non-negative");
  }
  if (!v.is_polynomial() && n > kMaxTabulatedMcmcSize) {
    throw InvalidInput("tabulated-potential MCMC is limited to N <= " +
                       std::to_string(kMaxTabulatedMcmcSize));
  }

  Chain chain(stream, n, pressure, v, options.scales);
  McmcReport report;
  report.sweeps = options.sweeps;
  report.burn_in_sweeps = static_cast<std::size_t>(options.burn_in_fraction * static_cast<double>(options.sweeps));

  const bool adapt = options.adapt && !v.is_zero() && options.adapt_interval > 0;
  for (std::size_t s = 0; s < report.burn_in_sweeps; ++s) {
    chain.sweep();
    if (adapt && (s + 1) % options.adapt_interval == 0) {
      chain.scales().diag = retune(chain.scales().diag, chain.diag_counter().rate());
      chain.scales().offdiag = retune(chain.scales().offdiag, chain.offdiag_counter().rate());
      chain.diag_counter() = {};
      chain.offdiag_counter() = {};
    }
  }
  chain.diag_counter() = {};
  chain.offdiag_counter() = {};

  for (std::size_t s = report.burn_in_sweeps; s < options.sweeps; ++s) {
    chain.sweep();
    if ((s - report.burn_in_sweeps + 1) % options.thin != 0) continue;
    auto m = chain.matrix();
    report.trace_square_series.push_back(trace_power(m, 2));
    double tv = 0.0;
    if (v.is_zero()) {
      tv = 0.0;
    } else if (v.is_polynomial()) {
      tv = trace_potential_moments(m, v);
    } else {
      tv = trace_potential(m, v);
    }
    report.trace_potential_series.push_back(tv);
    if (options.keep_samples) report.samples.push_back(std::move(m));
  }

  report.acceptance_diag = chain.diag_counter().rate();
  report.acceptance_offdiag = chain.offdiag_counter().rate();
  report.nonpositive_rejections = chain.nonpositive();
  report.off_table_rejections = chain.off_table();
  report.final_scales = chain.scales();
  if (!report.trace_square_series.empty()) {
    report.autocorrelation_time = integrated_autocorrelation_time(report.trace_square_series);
    report.effective_sample_size = effective_sample_size(report.trace_square_series);
  }
  return report;
}

}  // namespace toda
