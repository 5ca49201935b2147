#include "toda/grid.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "toda/error.hpp"

namespace toda {

namespace {

/// Four independent accumulators so the reduction vectorizes without
/// reassociation flags; the summation order is fixed.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

/// (1/h) int_{c-h/2}^{c+h/2} ln|u| du for the cell centred at distance c = d h.
double cell_log_average(std::size_t d, double h) {
  if (d == 0) return std::log(0.5 * h) - 1.0;
  const double c = static_cast<double>(d) * h;
  const double r = 0.5 / static_cast<double>(d);
  // ln c + [(1+r) ln(1+r) - (1-r) ln(1-r)] / (2r) - 1
  const double bracket = (1.0 + r) * std::log1p(r) - (1.0 - r) * std::log1p(-r);
  return std::log(c) + bracket / (2.0 * r) - 1.0;
}

}  // namespace

Grid::Grid(double half_width, std::size_t points) : half_width_(half_width), points_(points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidInput("grid half-width must be positive and finite");
  }
  if (points < kMinGridPoints) {
    throw InvalidInput("grid needs at least " + std::to_string(kMinGridPoints) + " points");
  }
  spacing_ = 2.0 * half_width / static_cast<double>(points);
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(points_);
  for (std::size_t i = 0; i < points_; ++i) xs[i] = x(i);
  return xs;
}

GridDensity::GridDensity(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InvalidInput("density length does not match its grid");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("density values must be finite and >= 0");
  }
  const double m = mass();
  if (std::abs(m - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "density is not normalized: mass " << m;
    throw InvalidInput(os.str());
  }
}

GridDensity GridDensity::normalized(Grid grid, std::vector<double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  total *= grid.spacing();
  if (!(total > 0.0) || !std::isfinite(total)) throw InvalidInput("cannot normalize density with mass " + std::to_string(total));
  for (double& v : values) v /= total;
  return GridDensity(grid, std::move(values));
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.spacing();
}

double GridDensity::moment(int k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += std::pow(grid_.x(i), k) * values_[i];
  return s * grid_.spacing();
}

std::vector<double> GridDensity::cdf_at_edges() const {
  std::vector<double> cdf(values_.size() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += values_[i] * grid_.spacing();
    cdf[i + 1] = acc;
  }
  // Absorb rounding so the CDF ends exactly at 1.
  const double total = cdf.back();
  for (double& c : cdf) c /= total;
  return cdf;
}

LogKernel::LogKernel(Grid grid) : grid_(grid), row_(grid.size()), reversed_(grid.size()) {
  for (std::size_t d = 0; d < row_.size(); ++d) row_[d] = cell_log_average(d, grid_.spacing());
  for (std::size_t k = 0; k < row_.size(); ++k) reversed_[k] = row_[row_.size() - 1 - k];
}

void LogKernel::log_potential(std::span<const double> rho, std::span<double> out) const {
  const std::size_t m = row_.size();
  if (rho.size() != m || out.size() != m) throw InvalidInput("log_potential: size mismatch");
  const double h = grid_.spacing();
  for (std::size_t i = 0; i < m; ++i) {
    // j < i uses K_{i-j} = reversed_[m-1-i+j]; j >= i uses row_[j-i].
    const double left = dot(reversed_.data() + (m - 1 - i), rho.data(), i);
    const double right = dot(row_.data(), rho.data() + i, m - i);
    out[i] = h * (left + right);
  }
}

std::vector<double> LogKernel::log_potential(std::span<const double> rho) const {
  std::vector<double> out(rho.size());
  log_potential(rho, out);
  return out;
}

double LogKernel::bilinear(std::span<const double> a, std::span<const double> b) const {
  const auto phi = log_potential(b);
  return grid_.spacing() * dot(a.data(), phi.data(), a.size());
}

LogKernel build_log_kernel(const Grid& grid) { return LogKernel(grid); }

void write_density_csv(std::ostream& os, const GridDensity& density) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "x,rho\n";
  for (std::size_t i = 0; i < density.grid().size(); ++i) {
    os << density.grid().x(i) << ',' << density[i] << '\n';
  }
  os.precision(old_precision);
}

GridDensity read_density_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("density CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,rho") throw InvalidInput("density CSV: header must be 'x,rho'");
  std::vector<double> xs, rho;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("density CSV: malformed row '" + line + "'");
    xs.push_back(std::stod(line.substr(0, comma)));
    rho.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < kMinGridPoints) throw InvalidInput("density CSV: too few rows");
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  Grid grid(-(xs.front() - 0.5 * h), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.x(i)) > 1e-9 * (1.0 + grid.half_width())) {
      throw InvalidInput("density CSV: abscissae are not a symmetric uniform midpoint grid");
    }
  }
  return GridDensity::normalized(grid, std::move(rho));
}

}  // namespace toda
