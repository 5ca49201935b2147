#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "toda/potential.hpp"

namespace toda {

/// Symmetric tridiagonal matrix with an optional periodic corner.
///
/// Stored as two sequences: `diag[j]` = a_j and `offdiag[j]` = b_j, where b_j
/// couples rows j and j+1 and b_{N-1} is the corner coupling rows N-1 and 0.
/// For non-periodic matrices the corner slot is kept at zero and ignored.
/// Periodic matrices need N >= 3 so the corner is a distinct entry.
class JacobiMatrix {
 public:
  /// `offdiag` may have N entries, or N-1 for a non-periodic matrix.
  JacobiMatrix(std::vector<double> diag, std::vector<double> offdiag, bool periodic);

  std::size_t size() const noexcept { return diag_.size(); }
  bool periodic() const noexcept { return periodic_; }
  std::span<const double> diag() const noexcept { return diag_; }
  /// Always N entries; the last is the corner (zero when non-periodic).
  std::span<const double> offdiag() const noexcept { return offdiag_; }

  /// Number of couplings actually present: N if periodic, N-1 otherwise.
  std::size_t coupling_count() const noexcept { return periodic_ ? size() : size() - 1; }

  double frobenius_norm() const;
  double max_abs_entry() const;

  JacobiMatrix with_diag(std::size_t site, double value) const;
  JacobiMatrix with_offdiag(std::size_t site, double value) const;

  bool operator==(const JacobiMatrix&) const = default;

 private:
  std::vector<double> diag_;
  std::vector<double> offdiag_;
  bool periodic_;
};

/// Uniform probability measure on a sorted list of eigenvalues.
class EmpiricalSpectralMeasure {
 public:
  /// Sorts its input; rejects empty or non-finite data.
  explicit EmpiricalSpectralMeasure(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double weight() const noexcept { return 1.0 / static_cast<double>(values_.size()); }
  double moment(int k) const;

  /// Pools several measures (multiset union, equal weight per atom).
  static EmpiricalSpectralMeasure pooled(std::span<const EmpiricalSpectralMeasure> parts);

 private:
  std::vector<double> values_;
};

inline constexpr double kDefaultEigenTolerance = 1e-12;

/// Eigenvalues with multiplicity, ascending.
///
/// Non-periodic matrices go through LAPACK's implicit-shift QL/QR (dsterf).
/// Periodic matrices are reordered 0, 1, N-1, 2, N-2, ... which turns the
/// cyclic tridiagonal into a symmetric band of half-width 2, then solved by
/// band reduction (dsbev); O(N^2) instead of a dense O(N^3) solve.
EmpiricalSpectralMeasure eigenvalues(const JacobiMatrix& m, double tol = kDefaultEigenTolerance);

/// (1/N) Tr(M^power), computed from local closed walks without diagonalizing.
/// power == 2 uses the entry formula (1/N)(sum a^2 + 2 sum b^2) directly.
double trace_power(const JacobiMatrix& m, int power);

/// (1/N) sum_i V(lambda_i) through the eigenvalues. Works for every potential
/// kind; tabulated potentials throw DomainError if the spectrum leaves the table.
double trace_potential(const JacobiMatrix& m, const Potential& v);

/// (1/N) Tr V(M) for polynomial V through trace_power of each monomial.
double trace_potential_moments(const JacobiMatrix& m, const Potential& v);

enum class EntryKind { diag, offdiag };

/// Unnormalized Tr V(M') - Tr V(M) where M' replaces one symmetric entry pair.
///
/// Only rows within walking distance deg(V)/2 of the changed entry contribute,
/// so the cost is independent of N. When the degree exceeds N/2 the local
/// windows would wrap around the ring; the function then falls back to the
/// full polynomial-trace difference.
double local_trace_delta(const JacobiMatrix& m, std::size_t site, EntryKind kind,
                         double new_value, const Potential& v);

/// Span form used by the MCMC kernel on its mutable state.
double local_trace_delta(std::span<const double> diag, std::span<const double> offdiag,
                         bool periodic, std::size_t site, EntryKind kind, double new_value,
                         std::span<const double> coefficients);

/// (M^k)_{jj} for k = 0..max_power.
std::vector<double> diagonal_powers(const JacobiMatrix& m, std::size_t row, int max_power);

/// Plain-text dump: "N periodic_flag", then the diagonal, then N off-diagonal
/// values (corner last), whitespace separated with round-trip precision.
void write_matrix_dump(std::ostream& os, const JacobiMatrix& m);
JacobiMatrix read_matrix_dump(std::istream& is);

}  // namespace toda
