#pragma once

#include <span>
#include <string>
#include <vector>

namespace toda {

/// Lower bound W(x) >= slope * x^2 + offset certified for a confinement.
struct ConfinementBound {
  double slope = 0.0;
  double offset = 0.0;
};

/// The external potential V and the confinement W(x) = x^2/2 + V(x).
///
/// Three representations:
///  - zero: V = 0, the independent-entry Toda ensemble;
///  - polynomial: an even polynomial with positive leading coefficient;
///  - tabulated: samples of a continuous V on an increasing abscissa, linearly
///    interpolated, plus an even-polynomial growth envelope describing V
///    outside the table.
///
/// Construction validates confinement: W must dominate a positive multiple of
/// x^2 up to a constant, checked numerically on a wide grid.
class Potential {
 public:
  enum class Kind { zero, polynomial, tabulated };

  static Potential zero();
  /// `coefficients[k]` multiplies x^k. Odd coefficients must vanish.
  static Potential polynomial(std::vector<double> coefficients);
  /// `table_x` strictly increasing (>= 2 points); `envelope` are even-polynomial
  /// coefficients; |V - envelope| at both table ends must not exceed `slack`.
  static Potential tabulated(std::vector<double> table_x, std::vector<double> table_v,
                             std::vector<double> envelope, double slack);

  Kind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept { return kind_ == Kind::zero; }
  bool is_polynomial() const noexcept { return kind_ != Kind::tabulated; }

  /// Polynomial coefficients (empty for zero; envelope for tabulated).
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  int degree() const noexcept;

  /// V(x). Tabulated potentials throw DomainError off the table.
  double v(double x) const;
  double w(double x) const { return 0.5 * x * x + v(x); }

  /// W with the growth envelope used off the table. Identical to w() for
  /// polynomial potentials. Used only where the caller needs W on an unbounded
  /// domain (solver grids, domain sizing).
  double w_extended(double x) const;

  /// Table range, or +-infinity for non-tabulated potentials.
  double table_min() const noexcept;
  double table_max() const noexcept;

  const ConfinementBound& confinement() const noexcept { return bound_; }

  const std::vector<double>& table_x() const noexcept { return table_x_; }
  const std::vector<double>& table_v() const noexcept { return table_v_; }
  double slack() const noexcept { return slack_; }

  /// Human-readable description, e.g. "0.1*x^4".
  std::string describe() const;

  /// Evaluates W on each point of `xs` (extended form).
  std::vector<double> w_on(std::span<const double> xs) const;

  bool operator==(const Potential&) const = default;

 private:
  Potential() = default;
  void certify_confinement();

  Kind kind_ = Kind::zero;
  std::vector<double> coefficients_;
  std::vector<double> table_x_;
  std::vector<double> table_v_;
  double slack_ = 0.0;
  ConfinementBound bound_;
};

/// Horner evaluation of sum_k c[k] x^k.
double evaluate_polynomial(std::span<const double> coefficients, double x);

}  // namespace toda
