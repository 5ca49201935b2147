#include "toda/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kConfinementSlope = 0.25;
constexpr double kScanHalfWidth = 200.0;
constexpr int kScanPoints = 400001;

std::vector<double> trim(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

void validate_even_polynomial(const std::vector<double>& c, const char* what) {
  for (double x : c) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite coefficient");
  }
  for (std::size_t k = 1; k < c.size(); k += 2) {
    if (c[k] != 0.0) throw InvalidInput(std::string(what) + ": odd-power coefficients must vanish");
  }
  if (!c.empty() && c.back() <= 0.0) {
    throw InvalidInput(std::string(what) + ": leading coefficient must be positive");
  }
}

}  // namespace

double evaluate_polynomial(std::span<const double> coefficients, double x) {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Potential Potential::zero() {
  Potential p;
  p.certify_confinement();
  return p;
}

Potential Potential::polynomial(std::vector<double> coefficients) {
  Potential p;
  p.coefficients_ = trim(std::move(coefficients));
  validate_even_polynomial(p.coefficients_, "polynomial potential");
  p.kind_ = p.coefficients_.empty() ? Kind::zero : Kind::polynomial;
  p.certify_confinement();
  return p;
}

Potential Potential::tabulated(std::vector<double> table_x, std::vector<double> table_v,
                               std::vector<double> envelope, double slack) {
  if (table_x.size() < 2 || table_x.size() != table_v.size()) {
    throw InvalidInput("tabulated potential: need >= 2 matching abscissae and values");
  }
  for (std::size_t i = 0; i < table_x.size(); ++i) {
    if (!std::isfinite(table_x[i]) || !std::isfinite(table_v[i])) {
      throw InvalidInput("tabulated potential: non-finite table entry");
    }
    if (i > 0 && !(table_x[i] > table_x[i - 1])) {
      throw InvalidInput("tabulated potential: abscissae must be strictly increasing");
    }
  }
  if (!(slack >= 0.0) || !std::isfinite(slack)) {
    throw InvalidInput("tabulated potential: slack must be finite and non-negative");
  }
  Potential p;
  p.kind_ = Kind::tabulated;
  p.coefficients_ = trim(std::move(envelope));
  validate_even_polynomial(p.coefficients_, "tabulated potential envelope");
  p.table_x_ = std::move(table_x);
  p.table_v_ = std::move(table_v);
  p.slack_ = slack;
  for (std::size_t end : {std::size_t{0}, p.table_x_.size() - 1}) {
    const double gap =
        std::abs(p.table_v_[end] - evaluate_polynomial(p.coefficients_, p.table_x_[end]));
    if (gap > slack) {
      std::ostringstream os;
      os << "tabulated potential: envelope misses table end x=" << p.table_x_[end] << " by "
         << gap << " > slack " << slack;
      throw InvalidInput(os.str());
    }
  }
  p.certify_confinement();
  return p;
}

int Potential::degree() const noexcept {
  return coefficients_.empty() ? 0 : static_cast<int>(coefficients_.size()) - 1;
}

double Potential::table_min() const noexcept {
  return kind_ == Kind::tabulated ? table_x_.front() : -std::numeric_limits<double>::infinity();
}

double Potential::table_max() const noexcept {
  return kind_ == Kind::tabulated ? table_x_.back() : std::numeric_limits<double>::infinity();
}

double Potential::v(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::polynomial:
      return evaluate_polynomial(coefficients_, x);
    case Kind::tabulated: {
      if (!(x >= table_x_.front() && x <= table_x_.back())) {
        std::ostringstream os;
        os << "tabulated potential queried at " << x << " outside [" << table_x_.front() << ", "
           << table_x_.back() << "]";
        throw DomainError(os.str());
      }
      const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x);
      if (it == table_x_.end()) return table_v_.back();
      const std::size_t hi = static_cast<std::size_t>(it - table_x_.begin());
      const std::size_t lo = hi - 1;
      const double t = (x - table_x_[lo]) / (table_x_[hi] - table_x_[lo]);
      return (1.0 - t) * table_v_[lo] + t * table_v_[hi];
    }
  }
  return 0.0;
}

double Potential::w_extended(double x) const {
  if (kind_ == Kind::tabulated && (x < table_x_.front() || x > table_x_.back())) {
    return 0.5 * x * x + evaluate_polynomial(coefficients_, x);
  }
  return w(x);
}

std::vector<double> Potential::w_on(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return w_extended(x); });
  return out;
}

void Potential::certify_confinement() {
  // W(x) - x^2/4 must be bounded below; its minimum on a wide scan is the
  // reported offset. Beyond the scan the even polynomial with positive leading
  // coefficient (or the bare x^2/4 remainder) only grows.
  double lowest = std::numeric_limits<double>::infinity();
  const double step = 2.0 * kScanHalfWidth / (kScanPoints - 1);
  for (int i = 0; i < kScanPoints; ++i) {
    const double x = -kScanHalfWidth + i * step;
    lowest = std::min(lowest, w_extended(x) - kConfinementSlope * x * x);
  }
  const double edge = w_extended(kScanHalfWidth) - kConfinementSlope * kScanHalfWidth * kScanHalfWidth;
  const double inner =
      w_extended(0.5 * kScanHalfWidth) - kConfinementSlope * 0.25 * kScanHalfWidth * kScanHalfWidth;
  if (!std::isfinite(lowest) || edge < inner) {
    throw InvalidInput("potential is not confining: W(x) - x^2/4 is not bounded below");
  }
  bound_ = {kConfinementSlope, lowest};
}

std::string Potential::describe() const {
  if (kind_ == Kind::zero) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (std::size_t k = 0; k < coefficients_.size(); ++k) {
    if (coefficients_[k] == 0.0) continue;
    if (!first) os << " + ";
    os << coefficients_[k];
    if (k > 0) os << "*x^" << k;
    first = false;
  }
  if (kind_ == Kind::tabulated) return "tabulated[" + std::to_string(table_x_.size()) + "] envelope " + os.str();
  return os.str();
}

}  // namespace toda
