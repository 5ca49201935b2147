#pragma once

// Independent reference computations used only by the tests. None of these
// share code paths with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "toda/jacobi.hpp"

namespace oracle {

/// det(M - x I) by Gaussian elimination with partial pivoting on the dense
/// matrix.
inline double characteristic_polynomial(const toda::JacobiMatrix& m, double x) {
  const std::size_t n = m.size();
  std::vector<double> a(n * n, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i) at(i, i) = m.diag()[i] - x;
  for (std::size_t i = 0; i + 1 < n; ++i) at(i, i + 1) = at(i + 1, i) = m.offdiag()[i];
  if (m.periodic()) {
    at(0, n - 1) += m.offdiag()[n - 1];
    at(n - 1, 0) += m.offdiag()[n - 1];
  }
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(at(r, c)) > std::abs(at(pivot, c))) pivot = r;
    }
    if (at(pivot, c) == 0.0) return 0.0;
    if (pivot != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(at(c, k), at(pivot, k));
      det = -det;
    }
    det *= at(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = at(r, c) / at(c, c);
      for (std::size_t k = c; k < n; ++k) at(r, k) -= f * at(c, k);
    }
  }
  return det;
}

/// Roots of the characteristic polynomial: sign changes on a fine scan of the
/// Gershgorin interval, refined by bisection. Assumes simple eigenvalues.
inline std::vector<double> eigenvalues_by_bracketing(const toda::JacobiMatrix& m, std::size_t scan = 200000) {
  double bound = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double left = m.periodic() || i > 0 ? std::abs(m.offdiag()[(i + m.size() - 1) % m.size()]) : 0.0;
    const double right = m.periodic() || i + 1 < m.size() ? std::abs(m.offdiag()[i]) : 0.0;
    bound = std::max(bound, std::abs(m.diag()[i]) + left + right);
  }
  bound += 1.0;
  std::vector<double> roots;
  double x0 = -bound, f0 = characteristic_polynomial(m, x0);
  for (std::size_t k = 1; k <= scan; ++k) {
    const double x1 = -bound + 2.0 * bound * static_cast<double>(k) / static_cast<double>(scan);
    const double f1 = characteristic_polynomial(m, x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = characteristic_polynomial(m, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

/// Dense tableau simplex for max c^T x subject to A x <= b, x >= 0, b >= 0,
/// using Bland's rule (no cycling).
inline double simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                               const std::vector<double>& c) {
  const std::size_t rows = A.size(), cols = c.size();
  // Tableau columns: x (cols), slacks (rows), rhs.
  const std::size_t width = cols + rows + 1;
  std::vector<std::vector<double>> t(rows + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) t[r][j] = A[r][j];
    t[r][cols + r] = 1.0;
    t[r][width - 1] = b[r];
    basis[r] = cols + r;
  }
  for (std::size_t j = 0; j < cols; ++j) t[rows][j] = -c[j];
  constexpr double eps = 1e-13;
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t[rows][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) return t[rows][width - 1];
    std::size_t leave = rows;
    double best = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (t[r][enter] > eps) {
        const double ratio = t[r][width - 1] / t[r][enter];
        if (leave == rows || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave == rows) throw std::runtime_error("simplex: unbounded");
    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave || t[r][enter] == 0.0) continue;
      const double f = t[r][enter];
      for (std::size_t j = 0; j < width; ++j) t[r][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  throw std::runtime_error("simplex: iteration limit");
}

/// BV-Lipschitz distance between two discrete measures (atoms with weights),
/// as the linear program over g = u - v on the merged partition:
///   max sum_k dF_k l_k (u_k - v_k)  s.t.  u, v in [0, 1],  sum l_k (u_k + v_k) <= 1.
inline double bl_bv_by_linear_program(std::vector<std::pair<double, double>> mu,
                                      std::vector<std::pair<double, double>> nu) {
  std::vector<double> xs;
  for (auto& [x, w] : mu) xs.push_back(x);
  for (auto& [x, w] : nu) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto cdf = [](const std::vector<std::pair<double, double>>& m, double x) {
    double s = 0.0;
    for (auto& [y, w] : m) {
      if (y <= x) s += w;
    }
    return s;
  };
  const std::size_t k = xs.size() - 1;
  if (k == 0) return 0.0;
  std::vector<double> diff(k), len(k);
  for (std::size_t i = 0; i < k; ++i) {
    diff[i] = cdf(mu, xs[i]) - cdf(nu, xs[i]);
    len[i] = xs[i + 1] - xs[i];
  }
  const std::size_t cols = 2 * k;
  std::vector<std::vector<double>> A;
  std::vector<double> b, c(cols);
  for (std::size_t i = 0; i < k; ++i) {
    c[i] = diff[i] * len[i];
    c[k + i] = -diff[i] * len[i];
  }
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> row(cols, 0.0);
    row[j] = 1.0;
    A.push_back(row);
    b.push_back(1.0);
  }
  std::vector<double> budget(cols);
  for (std::size_t i = 0; i < k; ++i) budget[i] = budget[k + i] = len[i];
  A.push_back(budget);
  b.push_back(1.0);
  return simplex_maximize(A, b, c);
}

/// Adaptive Simpson integration.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> recurse =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
          return left + right + (left + right - whole) / 15.0;
        }
        return recurse(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) +
               recurse(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return recurse(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Mixture of Gaussians sum w_k N(m_k, s_k^2) (weights may be signed).
struct GaussianMix {
  std::vector<double> weight, mean, sd;

  std::complex<double> characteristic(double t) const {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
      acc += weight[k] * std::exp(std::complex<double>(-0.5 * sd[k] * sd[k] * t * t, mean[k] * t));
    }
    return acc;
  }

  double first_moment() const {
    double s = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) s += weight[k] * mean[k];
    return s;
  }

  /// Exact mass of [a, b].
  double mass(double a, double b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
      auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean[k]) / (sd[k] * std::numbers::sqrt2)); };
      s += weight[k] * (cdf(b) - cdf(a));
    }
    return s;
  }
};

/// D^2 = int_0^inf |phi_diff(t)|^2 / t dt for a zero-mass signed mixture.
/// Log-spaced Simpson on [1e-4, 1e4]; below 1e-4 the integrand is replaced
/// by its small-t limit (m1 t)^2 / t, whose integral is m1^2 t^2 / 2.
inline double log_energy_fourier(const GaussianMix& diff, std::size_t panels = 40000) {
  const double lo = std::log(1e-4), hi = std::log(1e4);
  const double du = (hi - lo) / static_cast<double>(panels);
  auto g = [&](double u) {
    const double t = std::exp(u);
    return std::norm(diff.characteristic(t));  // |phi|^2 / t * dt/du, dt/du = t
  };
  double s = g(lo) + g(hi);
  for (std::size_t k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * g(lo + du * static_cast<double>(k));
  const double m1 = diff.first_moment();
  return s * du / 3.0 + 0.5 * m1 * m1 * 1e-8;
}

/// E[lambda_1^2 + lambda_2^2] under density proportional to
/// |l1 - l2|^beta exp(-(l1^2 + l2^2)/2), by brute-force tensor midpoint
/// quadrature on [-R, R]^2.
inline double two_point_beta_second_moment(double beta, double R = 12.0, std::size_t n = 3000) {
  const double h = 2.0 * R / static_cast<double>(n);
  double z = 0.0, m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -R + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = -R + (static_cast<double>(j) + 0.5) * h;
      const double w = std::pow(std::abs(x - y), beta) * std::exp(-0.5 * (x * x + y * y));
      z += w;
      m += w * (x * x + y * y);
    }
  }
  return m / z;
}

}  // namespace oracle
