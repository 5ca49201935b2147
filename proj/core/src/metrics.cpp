#include "toda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kCdfSlack = 1e-9;

/// |F_diff| on one interval of the merged partition, linear from p to q.
struct Piece {
  double length;
  double p;
  double q;
};

double measure_above(const std::vector<Piece>& pieces, double tau) {
  double m = 0.0;
  for (const auto& s : pieces) {
    const double hi = std::max(s.p, s.q), lo = std::min(s.p, s.q);
    if (hi <= tau) continue;
    m += lo >= tau ? s.length : s.length * (hi - tau) / (hi - lo);
  }
  return m;
}

double excess_integral(const std::vector<Piece>& pieces, double tau) {
  double total = 0.0;
  for (const auto& s : pieces) {
    const double hi = std::max(s.p, s.q), lo = std::min(s.p, s.q);
    if (hi <= tau) continue;
    if (lo >= tau) {
      total += s.length * (0.5 * (s.p + s.q) - tau);
    } else {
      total += 0.5 * s.length * (hi - tau) * (hi - tau) / (hi - lo);
    }
  }
  return total;
}

std::vector<double> merged_breakpoints(const CdfOnGrid& a, const CdfOnGrid& b) {
  std::vector<double> xs;
  xs.reserve(a.breakpoints().size() + b.breakpoints().size());
  std::merge(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(),
             b.breakpoints().end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

CdfOnGrid::CdfOnGrid(std::vector<double> breakpoints, std::vector<double> left, std::vector<double> right)
    : x_(std::move(breakpoints)), left_(std::move(left)), right_(std::move(right)) {
  if (x_.empty() || left_.size() != x_.size() || right_.size() != x_.size()) {
    throw InvalidInput("CDF needs matching, non-empty breakpoint and value arrays");
  }
  double previous = 0.0;
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!std::isfinite(x_[k]) || (k > 0 && !(x_[k] > x_[k - 1]))) {
      throw InvalidInput("CDF breakpoints must be finite and strictly increasing");
    }
    if (!(left_[k] >= previous - kCdfSlack) || !(right_[k] >= left_[k] - kCdfSlack)) {
      throw InvalidInput("CDF values must be nondecreasing");
    }
    previous = right_[k];
  }
  if (std::abs(left_.front()) > kCdfSlack || std::abs(right_.back() - 1.0) > kCdfSlack) {
    throw InvalidInput("CDF must rise from 0 to 1: not a probability measure");
  }
}

CdfOnGrid::CdfOnGrid(const EmpiricalSpectralMeasure& measure) {
  const auto v = measure.values();
  const double n = static_cast<double>(v.size());
  std::size_t seen = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    x_.push_back(v[i]);
    left_.push_back(static_cast<double>(seen) / n);
    seen = j;
    right_.push_back(static_cast<double>(seen) / n);
    i = j;
  }
}

CdfOnGrid::CdfOnGrid(const GridDensity& density) {
  const auto& g = density.grid();
  x_.resize(g.size() + 1);
  for (std::size_t i = 0; i <= g.size(); ++i) x_[i] = g.edge(i);
  left_ = density.cdf_at_edges();
  right_ = left_;
}

double CdfOnGrid::left_limit(double x) const {
  // First breakpoint >= x.
  const auto it = std::lower_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0.0;
  if (it == x_.end()) return 1.0;
  const auto k = static_cast<std::size_t>(it - x_.begin());
  if (*it == x) return left_[k];
  const double t = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return right_[k - 1] + t * (left_[k] - right_[k - 1]);
}

double CdfOnGrid::right_limit(double x) const {
  // First breakpoint > x.
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0.0;
  const auto k = static_cast<std::size_t>(it - x_.begin());
  if (x_[k - 1] == x) return right_[k - 1];
  if (it == x_.end()) return 1.0;
  const double t = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return right_[k - 1] + t * (left_[k] - right_[k - 1]);
}

double bl_bv_distance(const CdfOnGrid& mu, const CdfOnGrid& nu) {
  const auto xs = merged_breakpoints(mu, nu);
  std::vector<Piece> pieces;
  pieces.reserve(2 * xs.size());
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double u = xs[k], w = xs[k + 1];
    const double p = mu.right_limit(u) - nu.right_limit(u);
    const double q = mu.left_limit(w) - nu.left_limit(w);
    if ((p > 0.0 && q < 0.0) || (p < 0.0 && q > 0.0)) {
      const double cut = (w - u) * p / (p - q);
      pieces.push_back({cut, std::abs(p), 0.0});
      pieces.push_back({(w - u) - cut, 0.0, std::abs(q)});
    } else {
      pieces.push_back({w - u, std::abs(p), std::abs(q)});
    }
  }
  if (measure_above(pieces, 0.0) <= 1.0) return excess_integral(pieces, 0.0);

  // The objective tau + excess(tau) is convex with slope 1 - measure_above(tau).
  double lo = 0.0, hi = 0.0;
  for (const auto& s : pieces) hi = std::max({hi, s.p, s.q});
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (measure_above(pieces, mid) > 1.0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  return tau + excess_integral(pieces, tau);
}

double ks_distance(const CdfOnGrid& mu, const CdfOnGrid& nu) {
  double gap = 0.0;
  for (double x : merged_breakpoints(mu, nu)) {
    gap = std::max(gap, std::abs(mu.left_limit(x) - nu.left_limit(x)));
    gap = std::max(gap, std::abs(mu.right_limit(x) - nu.right_limit(x)));
  }
  return gap;
}

LogEnergyDistance log_energy_distance_report(const GridDensity& rho1, const GridDensity& rho2,
                                             const LogKernel& kernel) {
  if (!(rho1.grid() == rho2.grid()) || !(rho1.grid() == kernel.grid())) {
    throw InvalidInput("log_energy_distance: densities and kernel must share one grid");
  }
  std::vector<double> diff(rho1.grid().size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rho1[i] - rho2[i];
  LogEnergyDistance out;
  out.squared = -kernel.bilinear(diff, diff);
  out.clamped = std::max(0.0, -out.squared);
  out.value = std::sqrt(std::max(0.0, out.squared));
  return out;
}

double log_energy_distance(const GridDensity& rho1, const GridDensity& rho2, const LogKernel& kernel) {
  return log_energy_distance_report(rho1, rho2, kernel).value;
}

double default_bandwidth(const EmpiricalSpectralMeasure& measure) {
  const double n = static_cast<double>(measure.size());
  const double mean = measure.moment(1);
  const double var = std::max(0.0, measure.moment(2) - mean * mean) * (n > 1 ? n / (n - 1) : 1.0);
  if (!(var > 0.0)) throw InvalidInput("default bandwidth undefined for a sample with zero spread");
  return std::pow(n, -0.2) * std::sqrt(var);
}

GridDensity smooth_empirical(const EmpiricalSpectralMeasure& measure, const Grid& grid, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InvalidInput("bandwidth must be positive");
  const auto v = measure.values();
  if (v.front() < -grid.half_width() || v.back() > grid.half_width()) {
    throw DomainError("smoothing grid does not contain every atom");
  }
  const std::size_t m = grid.size();
  const double h = grid.spacing();
  // Beyond 9 bandwidths the normal tail is below 1e-18 and is dropped.
  const double reach = 9.0 * bandwidth;
  std::vector<double> mass(m, 0.0);
  for (double lambda : v) {
    const auto first = static_cast<std::ptrdiff_t>(std::floor((lambda - reach + grid.half_width()) / h));
    const auto last = static_cast<std::ptrdiff_t>(std::ceil((lambda + reach + grid.half_width()) / h));
    const std::size_t i0 = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(first, 0, static_cast<std::ptrdiff_t>(m)));
    const std::size_t i1 = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(last, 0, static_cast<std::ptrdiff_t>(m)));
    double below = normal_cdf((grid.edge(i0) - lambda) / bandwidth);
    for (std::size_t i = i0; i < i1; ++i) {
      const double above = normal_cdf((grid.edge(i + 1) - lambda) / bandwidth);
      mass[i] += above - below;
      below = above;
    }
  }
  for (double& value : mass) value /= h;
  return GridDensity::normalized(grid, std::move(mass));
}

}  // namespace toda
