#include "toda/jacobi.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "toda/error.hpp"

namespace toda {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + " contains a non-finite entry");
  }
}

/// Read access to the entries of a matrix with at most one entry replaced.
struct EntryView {
  std::span<const double> diag;
  std::span<const double> off;
  bool periodic;
  EntryKind override_kind = EntryKind::diag;
  std::ptrdiff_t override_site = -1;
  double override_value = 0.0;

  std::ptrdiff_t n() const { return static_cast<std::ptrdiff_t>(diag.size()); }

  double a(std::ptrdiff_t g) const {
    if (override_kind == EntryKind::diag && g == override_site) return override_value;
    return diag[static_cast<std::size_t>(g)];
  }
  /// Coupling between g and g+1 (mod N for periodic matrices).
  double b(std::ptrdiff_t g) const {
    if (!periodic && g == n() - 1) return 0.0;
    if (override_kind == EntryKind::offdiag && g == override_site) return override_value;
    return off[static_cast<std::size_t>(g)];
  }
};

/// Closed-walk weights (M^k)_{row,row}, k = 0..max_power, written into `out`.
///
/// The walk vectors u_t = M^t e_row live on a window of offsets [-R, R] around
/// the row; (M^{2t})_{rr} = <u_t, u_t> and (M^{2t+1})_{rr} = <u_t, M u_t>.
/// When the window would wrap onto itself on a periodic ring the full-length
/// vectors are used instead.
void diagonal_powers_into(const EntryView& e, std::ptrdiff_t row, int max_power,
                          std::vector<double>& out, std::vector<double>& u,
                          std::vector<double>& w) {
  const std::ptrdiff_t n = e.n();
  const int half = max_power / 2;
  const std::ptrdiff_t radius = half + 1;
  out.assign(static_cast<std::size_t>(max_power) + 1, 0.0);
  out[0] = 1.0;
  if (max_power == 0) return;

  const bool windowed = !e.periodic || 2 * radius + 1 <= n;
  const std::ptrdiff_t width = windowed ? 2 * radius + 1 : n;
  // Offset slot o (0..width) maps to a global index, or -1 when absent.
  auto global = [&](std::ptrdiff_t slot) -> std::ptrdiff_t {
    if (!windowed) return slot;
    std::ptrdiff_t g = row + slot - radius;
    if (e.periodic) return ((g % n) + n) % n;
    return (g < 0 || g >= n) ? -1 : g;
  };
  const std::ptrdiff_t centre = windowed ? radius : row;

  u.assign(static_cast<std::size_t>(width), 0.0);
  w.assign(static_cast<std::size_t>(width), 0.0);
  u[static_cast<std::size_t>(centre)] = 1.0;

  auto apply = [&](int support) {
    // w = M u on slots within `support` of the centre (all slots when unwindowed).
    std::ptrdiff_t lo = windowed ? centre - support : 0;
    std::ptrdiff_t hi = windowed ? centre + support : width - 1;
    std::fill(w.begin(), w.end(), 0.0);
    for (std::ptrdiff_t s = lo; s <= hi; ++s) {
      const std::ptrdiff_t g = global(s);
      if (g < 0) continue;
      double acc = e.a(g) * u[static_cast<std::size_t>(s)];
      const std::ptrdiff_t left = windowed ? s - 1 : (s - 1 + width) % width;
      const std::ptrdiff_t right = windowed ? s + 1 : (s + 1) % width;
      if (left >= 0 && left < width) {
        const std::ptrdiff_t gl = global(left);
        if (gl >= 0) acc += e.b(gl) * u[static_cast<std::size_t>(left)];
      }
      if (right >= 0 && right < width) {
        if (global(right) >= 0) acc += e.b(g) * u[static_cast<std::size_t>(right)];
      }
      w[static_cast<std::size_t>(s)] = acc;
    }
  };

  for (int t = 0; t <= half; ++t) {
    if (t > 0) out[static_cast<std::size_t>(2 * t)] = std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
    if (2 * t + 1 > max_power) break;
    apply(t + 1);
    out[static_cast<std::size_t>(2 * t + 1)] = std::inner_product(u.begin(), u.end(), w.begin(), 0.0);
    std::swap(u, w);
  }
}

std::ptrdiff_t wrap(std::ptrdiff_t g, std::ptrdiff_t n) { return ((g % n) + n) % n; }

}  // namespace

JacobiMatrix::JacobiMatrix(std::vector<double> diag, std::vector<double> offdiag, bool periodic)
    : diag_(std::move(diag)), offdiag_(std::move(offdiag)), periodic_(periodic) {
  const std::size_t n = diag_.size();
  if (n < 2) throw InvalidInput("Jacobi matrix needs N >= 2");
  if (periodic_ && n < 3) throw InvalidInput("periodic Jacobi matrix needs N >= 3");
  if (!periodic_ && offdiag_.size() + 1 == n) offdiag_.push_back(0.0);
  if (offdiag_.size() != n) {
    throw InvalidInput("Jacobi matrix: expected " + std::to_string(n) + " off-diagonal entries, got " +
                       std::to_string(offdiag_.size()));
  }
  if (!periodic_) offdiag_.back() = 0.0;
  require_finite(diag_, "diagonal");
  require_finite(offdiag_, "off-diagonal");
}

double JacobiMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double a : diag_) s += a * a;
  for (std::size_t j = 0; j < coupling_count(); ++j) s += 2.0 * offdiag_[j] * offdiag_[j];
  return std::sqrt(s);
}

double JacobiMatrix::max_abs_entry() const {
  double m = 0.0;
  for (double a : diag_) m = std::max(m, std::abs(a));
  for (double b : offdiag_) m = std::max(m, std::abs(b));
  return m;
}

JacobiMatrix JacobiMatrix::with_diag(std::size_t site, double value) const {
  if (site >= size()) throw InvalidInput("with_diag: site out of range");
  JacobiMatrix copy = *this;
  copy.diag_[site] = value;
  return copy;
}

JacobiMatrix JacobiMatrix::with_offdiag(std::size_t site, double value) const {
  if (site >= coupling_count()) throw InvalidInput("with_offdiag: site out of range");
  JacobiMatrix copy = *this;
  copy.offdiag_[site] = value;
  return copy;
}

EmpiricalSpectralMeasure::EmpiricalSpectralMeasure(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("empirical measure needs at least one atom");
  require_finite(values_, "empirical measure");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalSpectralMeasure::moment(int k) const {
  double s = 0.0;
  for (double x : values_) s += std::pow(x, k);
  return s / static_cast<double>(values_.size());
}

EmpiricalSpectralMeasure EmpiricalSpectralMeasure::pooled(
    std::span<const EmpiricalSpectralMeasure> parts) {
  std::vector<double> all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.values_.begin(), p.values_.end());
  return EmpiricalSpectralMeasure(std::move(all));
}

EmpiricalSpectralMeasure eigenvalues(const JacobiMatrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("eigenvalue tolerance must be positive");
  const auto n = static_cast<lapack_int>(m.size());
  std::vector<double> values(m.diag().begin(), m.diag().end());

  if (!m.periodic()) {
    std::vector<double> e(m.offdiag().begin(), m.offdiag().end() - 1);
    const lapack_int info = LAPACKE_dsterf(n, values.data(), e.data());
    if (info != 0) throw NotConverged("dsterf failed to converge", static_cast<double>(info));
  } else {
    // Interleaved order 0, 1, N-1, 2, N-2, ... puts every cyclic neighbour
    // pair at most two positions apart.
    const std::size_t size = m.size();
    std::vector<std::size_t> position(size);
    {
      std::size_t lo = 1, hi = size - 1, k = 1;
      position[0] = 0;
      while (lo <= hi) {
        position[lo++] = k++;
        if (lo <= hi) position[hi--] = k++;
      }
    }
    constexpr lapack_int kd = 2;
    constexpr lapack_int ldab = kd + 1;
    std::vector<double> band(static_cast<std::size_t>(ldab) * size, 0.0);
    for (std::size_t g = 0; g < size; ++g) band[ldab * position[g]] = m.diag()[g];
    for (std::size_t g = 0; g < size; ++g) {
      const std::size_t p = position[g];
      const std::size_t q = position[(g + 1) % size];
      const std::size_t row = std::max(p, q), col = std::min(p, q);
      band[ldab * col + (row - col)] = m.offdiag()[g];
    }
    const lapack_int info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'L', n, kd, band.data(), ldab,
                                          values.data(), nullptr, 1);
    if (info != 0) throw NotConverged("dsbev failed to converge", static_cast<double>(info));
  }
  return EmpiricalSpectralMeasure(std::move(values));
}

std::vector<double> diagonal_powers(const JacobiMatrix& m, std::size_t row, int max_power) {
  if (row >= m.size()) throw InvalidInput("diagonal_powers: row out of range");
  if (max_power < 0) throw InvalidInput("diagonal_powers: negative power");
  EntryView view{m.diag(), m.offdiag(), m.periodic()};
  std::vector<double> out, u, w;
  diagonal_powers_into(view, static_cast<std::ptrdiff_t>(row), max_power, out, u, w);
  return out;
}

double trace_power(const JacobiMatrix& m, int power) {
  if (power < 1) throw InvalidInput("trace_power: power must be >= 1");
  const double n = static_cast<double>(m.size());
  if (power == 1) return std::accumulate(m.diag().begin(), m.diag().end(), 0.0) / n;
  if (power == 2) {
    double s = 0.0;
    for (double a : m.diag()) s += a * a;
    for (std::size_t j = 0; j < m.coupling_count(); ++j) s += 2.0 * m.offdiag()[j] * m.offdiag()[j];
    return s / n;
  }
  EntryView view{m.diag(), m.offdiag(), m.periodic()};
  std::vector<double> out, u, w;
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    diagonal_powers_into(view, static_cast<std::ptrdiff_t>(j), power, out, u, w);
    s += out[static_cast<std::size_t>(power)];
  }
  return s / n;
}

double trace_potential(const JacobiMatrix& m, const Potential& v) {
  if (v.is_zero()) return 0.0;
  const auto spectrum = eigenvalues(m);
  double s = 0.0;
  for (double x : spectrum.values()) s += v.v(x);
  return s / static_cast<double>(m.size());
}

double trace_potential_moments(const JacobiMatrix& m, const Potential& v) {
  if (!v.is_polynomial()) throw InvalidInput("moment path needs a polynomial potential");
  const auto& c = v.coefficients();
  double s = c.empty() ? 0.0 : c[0];
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (c[k] != 0.0) s += c[k] * trace_power(m, static_cast<int>(k));
  }
  return s;
}

double local_trace_delta(std::span<const double> diag, std::span<const double> offdiag,
                         bool periodic, std::size_t site, EntryKind kind, double new_value,
                         std::span<const double> coefficients) {
  const auto n = static_cast<std::ptrdiff_t>(diag.size());
  const std::ptrdiff_t couplings = periodic ? n : n - 1;
  if (static_cast<std::ptrdiff_t>(site) >= (kind == EntryKind::diag ? n : couplings)) {
    throw InvalidInput("local_trace_delta: site out of range");
  }
  if (!std::isfinite(new_value)) throw InvalidInput("local_trace_delta: non-finite value");
  const int degree = static_cast<int>(coefficients.size()) - 1;
  if (degree < 1) return 0.0;

  EntryView before{diag, offdiag, periodic};
  EntryView after = before;
  after.override_kind = kind;
  after.override_site = static_cast<std::ptrdiff_t>(site);
  after.override_value = new_value;

  // Rows whose closed walks of length <= degree can touch the entry.
  const std::ptrdiff_t reach = degree / 2;
  const auto s = static_cast<std::ptrdiff_t>(site);
  std::ptrdiff_t first = s - reach;
  std::ptrdiff_t last = (kind == EntryKind::diag ? s : s + 1) + reach;
  const bool full = periodic && (2 * degree > n || last - first + 1 > n);
  if (full) {
    first = 0;
    last = n - 1;
  } else if (!periodic) {
    first = std::max<std::ptrdiff_t>(first, 0);
    last = std::min<std::ptrdiff_t>(last, n - 1);
  }

  std::vector<double> old_w, new_w, u, w;
  double delta = 0.0;
  for (std::ptrdiff_t r = first; r <= last; ++r) {
    const std::ptrdiff_t row = periodic ? wrap(r, n) : r;
    diagonal_powers_into(before, row, degree, old_w, u, w);
    diagonal_powers_into(after, row, degree, new_w, u, w);
    for (int k = 1; k <= degree; ++k) {
      const double c = coefficients[static_cast<std::size_t>(k)];
      if (c != 0.0) delta += c * (new_w[static_cast<std::size_t>(k)] - old_w[static_cast<std::size_t>(k)]);
    }
  }
  return delta;
}

double local_trace_delta(const JacobiMatrix& m, std::size_t site, EntryKind kind,
                         double new_value, const Potential& v) {
  if (!v.is_polynomial()) throw InvalidInput("local_trace_delta needs a polynomial potential");
  return local_trace_delta(m.diag(), m.offdiag(), m.periodic(), site, kind, new_value,
                           v.coefficients());
}

void write_matrix_dump(std::ostream& os, const JacobiMatrix& m) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << m.size() << ' ' << (m.periodic() ? 1 : 0) << '\n';
  for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << m.diag()[j];
  os << '\n';
  for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << m.offdiag()[j];
  os << '\n';
  os.precision(old_precision);
}

JacobiMatrix read_matrix_dump(std::istream& is) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(is, line)) throw InvalidInput(std::string("matrix dump: missing ") + what);
    return std::istringstream(line);
  };
  std::size_t n = 0;
  int flag = -1;
  {
    auto header = next_line("header");
    if (!(header >> n >> flag) || (flag != 0 && flag != 1)) {
      throw InvalidInput("matrix dump: header must be 'N periodic_flag'");
    }
  }
  auto read_values = [&](const char* what) {
    auto row = next_line(what);
    std::vector<double> xs;
    std::string token;
    while (row >> token) xs.push_back(std::stod(token));
    return xs;
  };
  auto diag = read_values("diagonal line");
  auto off = read_values("off-diagonal line");
  if (diag.size() != n) throw InvalidInput("matrix dump: diagonal length does not match N");
  return JacobiMatrix(std::move(diag), std::move(off), flag == 1);
}

}  // namespace toda
