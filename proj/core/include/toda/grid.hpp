#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace toda {

/// Uniform midpoint grid on [-L, L]: x_i = -L + (i + 1/2) h, h = 2L / M.
class Grid {
 public:
  Grid(double half_width, std::size_t points);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return points_; }
  double spacing() const noexcept { return spacing_; }
  double x(std::size_t i) const noexcept {
    return -half_width_ + (static_cast<double>(i) + 0.5) * spacing_;
  }
  /// Left edge of cell i (i = M gives the right end L).
  double edge(std::size_t i) const noexcept { return -half_width_ + static_cast<double>(i) * spacing_; }
  std::vector<double> points() const;

  bool operator==(const Grid& other) const noexcept {
    return half_width_ == other.half_width_ && points_ == other.points_;
  }

 private:
  double half_width_;
  std::size_t points_;
  double spacing_;
};

inline constexpr std::size_t kMinGridPoints = 16;
inline constexpr double kNormalizationTolerance = 1e-10;

/// Piecewise-constant probability density on a Grid (value rho_i on cell i).
class GridDensity {
 public:
  /// Validates finiteness, non-negativity and unit mass (within 1e-10).
  GridDensity(Grid grid, std::vector<double> values);

  /// Rescales `values` to unit mass before validating.
  static GridDensity normalized(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double mass() const;
  /// Midpoint-rule moment sum_i x_i^k rho_i h.
  double moment(int k) const;
  /// CDF at cell edges, M + 1 values from 0 to 1.
  std::vector<double> cdf_at_edges() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Cell-averaged logarithmic kernel K_ij = (1/h) int_{cell j} ln|x_i - y| dy.
///
/// The cell integral depends only on |i - j|, so one Toeplitz row is stored and
/// symmetry is exact. Entries come from the closed-form antiderivative
/// (y - x) ln|y - x| - y, rewritten around the cell centre to avoid
/// cancellation; the diagonal is ln(h/2) - 1.
class LogKernel {
 public:
  explicit LogKernel(Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  double entry(std::size_t i, std::size_t j) const noexcept {
    return row_[i > j ? i - j : j - i];
  }
  std::span<const double> toeplitz_row() const noexcept { return row_; }

  /// Log-potential on the grid: out_i = h * sum_j K_ij rho_j.
  std::vector<double> log_potential(std::span<const double> rho) const;
  void log_potential(std::span<const double> rho, std::span<double> out) const;

  /// h^2 * a^T K b.
  double bilinear(std::span<const double> a, std::span<const double> b) const;

 private:
  Grid grid_;
  std::vector<double> row_;
  std::vector<double> reversed_;
};

LogKernel build_log_kernel(const Grid& grid);

/// CSV with header "x,rho" and round-trip precision.
void write_density_csv(std::ostream& os, const GridDensity& density);
/// Reads "x,rho" CSV; the abscissae must form a uniform midpoint grid.
GridDensity read_density_csv(std::istream& is);

}  // namespace toda
