#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "toda/error.hpp"
#include "toda/jacobi.hpp"
#include "toda/metrics.hpp"
#include "toda/rng.hpp"
#include "toda/samplers.hpp"

using namespace toda;

namespace {

JacobiMatrix random_matrix(std::uint64_t seed, std::size_t n, bool periodic) {
  SeededStream s(seed, 0);
  std::vector<double> a(n), b(n);
  for (auto& x : a) x = s.normal();
  for (auto& x : b) x = 0.2 + s.uniform();
  return JacobiMatrix(a, b, periodic);
}

double trace_power_from_eigenvalues(const JacobiMatrix& m, int p) {
  const auto ev = eigenvalues(m);
  return ev.moment(p);
}

}  // namespace

TEST(JacobiMatrix, RejectsInvalidShapes) {
  EXPECT_THROW(JacobiMatrix({1.0}, {}, false), InvalidInput);
  EXPECT_THROW(JacobiMatrix({1.0, 2.0}, {1.0, 1.0}, true), InvalidInput);
  EXPECT_THROW(JacobiMatrix({1.0, 2.0, 3.0}, {1.0}, false), InvalidInput);
  EXPECT_THROW(JacobiMatrix({1.0, 2.0, 3.0}, {1.0, 1.0}, true), InvalidInput);
  EXPECT_THROW(JacobiMatrix({1.0, std::nan(""), 3.0}, {1.0, 1.0}, false), InvalidInput);
}

TEST(JacobiMatrix, NonPeriodicCornerIsIgnored) {
  const JacobiMatrix m({1.0, 2.0, 3.0}, {0.5, 0.25, 7.0}, false);
  EXPECT_EQ(m.offdiag()[2], 0.0);
  EXPECT_EQ(m.coupling_count(), 2u);
}

TEST(Eigenvalues, TwoByTwoClosedForm) {
  const double a = 0.7, b = 1.3;
  const auto ev = eigenvalues(JacobiMatrix({a, a}, {b}, false));
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev.values()[0], a - b, 1e-14);
  EXPECT_NEAR(ev.values()[1], a + b, 1e-14);
}

TEST(Eigenvalues, ZeroMatrixGivesZeros) {
  const auto ev = eigenvalues(JacobiMatrix(std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), true));
  ASSERT_EQ(ev.size(), 5u);
  for (double x : ev.values()) EXPECT_EQ(x, 0.0);
}

TEST(Eigenvalues, PeriodicMatchesCharacteristicPolynomialRoots) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = random_matrix(seed, 6, true);
    const auto ev = eigenvalues(m);
    const auto roots = oracle::eigenvalues_by_bracketing(m);
    ASSERT_EQ(roots.size(), 6u) << "seed " << seed;
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(ev.values()[i], roots[i], 1e-10);
  }
}

TEST(Eigenvalues, NonPeriodicMatchesCharacteristicPolynomialRoots) {
  const auto m = random_matrix(11, 7, false);
  const auto ev = eigenvalues(m);
  const auto roots = oracle::eigenvalues_by_bracketing(m);
  ASSERT_EQ(roots.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(ev.values()[i], roots[i], 1e-10);
}

TEST(Eigenvalues, PeriodicThreeByThreeCirculant) {
  // Circulant with zero diagonal and unit couplings: eigenvalues 2cos(2 pi k / 3).
  const auto ev = eigenvalues(JacobiMatrix({0, 0, 0}, {1, 1, 1}, true));
  EXPECT_NEAR(ev.values()[0], -1.0, 1e-13);
  EXPECT_NEAR(ev.values()[1], -1.0, 1e-13);
  EXPECT_NEAR(ev.values()[2], 2.0, 1e-13);
}

TEST(Eigenvalues, SumEqualsTraceForSampledMatrices) {
  for (std::size_t n : {3u, 10u, 257u, 1000u}) {
    SeededStream s(3, n);
    const auto m = sample_toda_matrix(s, n, 1.0);
    const auto ev = eigenvalues(m);
    double sum = 0.0, tr = 0.0;
    for (double x : ev.values()) sum += x;
    for (double x : m.diag()) tr += x;
    EXPECT_LE(std::abs(sum - tr), 1e-9 * static_cast<double>(n) * (1.0 + m.max_abs_entry()));
  }
}

TEST(Eigenvalues, RejectsNonPositiveTolerance) {
  EXPECT_THROW(eigenvalues(random_matrix(1, 4, false), 0.0), InvalidInput);
}

TEST(TracePower, PeriodicAllOnesSquare) {
  EXPECT_DOUBLE_EQ(trace_power(JacobiMatrix({0, 0, 0}, {1, 1, 1}, true), 2), 2.0);
}

TEST(TracePower, FirstPowerIsMeanDiagonal) {
  const auto m = random_matrix(5, 9, true);
  double mean = 0.0;
  for (double a : m.diag()) mean += a / 9.0;
  EXPECT_NEAR(trace_power(m, 1), mean, 1e-15);
}

TEST(TracePower, SquareIsEntryFormula) {
  for (bool periodic : {true, false}) {
    const auto m = random_matrix(6, 8, periodic);
    double s = 0.0;
    for (double a : m.diag()) s += a * a;
    for (std::size_t j = 0; j < m.coupling_count(); ++j) s += 2.0 * m.offdiag()[j] * m.offdiag()[j];
    EXPECT_EQ(trace_power(m, 2), s / 8.0);
  }
}

TEST(TracePower, MatchesEigenvaluesForHigherPowers) {
  for (bool periodic : {true, false}) {
    for (int p = 3; p <= 8; ++p) {
      const auto m = random_matrix(7, 8, periodic);
      EXPECT_NEAR(trace_power(m, p), trace_power_from_eigenvalues(m, p), 1e-10) << "p=" << p;
    }
  }
  // Powers whose walks wrap the ring.
  const auto small = random_matrix(8, 3, true);
  for (int p = 1; p <= 10; ++p) {
    EXPECT_NEAR(trace_power(small, p), trace_power_from_eigenvalues(small, p),
                1e-10 * (1.0 + std::abs(trace_power_from_eigenvalues(small, p))));
  }
}

TEST(TracePower, RejectsZeroPower) { EXPECT_THROW(trace_power(random_matrix(1, 4, true), 0), InvalidInput); }

TEST(TracePotential, QuadraticEqualsTraceSquare) {
  const auto m = random_matrix(9, 12, true);
  const auto v = Potential::polynomial({0, 0, 1});
  EXPECT_NEAR(trace_potential(m, v), trace_power(m, 2), 1e-12);
  EXPECT_NEAR(trace_potential_moments(m, v), trace_power(m, 2), 1e-15);
}

TEST(TracePotential, ZeroPotential) {
  const auto m = random_matrix(9, 12, true);
  EXPECT_EQ(trace_potential(m, Potential::zero()), 0.0);
  EXPECT_EQ(trace_potential_moments(m, Potential::zero()), 0.0);
}

TEST(TracePotential, QuarticDualPathsAgree) {
  const auto m = random_matrix(10, 6, true);
  const auto v = Potential::polynomial({0.5, 0, -0.3, 0, 1.0});
  const double a = trace_potential(m, v), b = trace_potential_moments(m, v);
  EXPECT_NEAR(a, b, 1e-9 * std::abs(b));
}

TEST(TracePotential, TabulatedOffTableIsDomainError) {
  const auto v = Potential::tabulated({-1.0, 0.0, 1.0}, {0.5, 0.0, 0.5}, {0.0, 0.0, 0.5}, 0.1);
  const JacobiMatrix wide({5.0, -5.0, 0.0}, {0.1, 0.1, 0.1}, true);
  EXPECT_THROW(trace_potential(wide, v), DomainError);
  const JacobiMatrix narrow({0.1, -0.1, 0.0}, {0.1, 0.1, 0.1}, true);
  EXPECT_NO_THROW(trace_potential(narrow, v));
}

TEST(LocalTraceDelta, UnchangedValueGivesZero) {
  const auto m = random_matrix(12, 12, true);
  const auto v = Potential::polynomial({0, 0, 0, 0, 1.0});
  EXPECT_EQ(local_trace_delta(m, 4, EntryKind::offdiag, m.offdiag()[4], v), 0.0);
  EXPECT_EQ(local_trace_delta(m, 4, EntryKind::diag, m.diag()[4], v), 0.0);
}

TEST(LocalTraceDelta, QuadraticOffdiagonal) {
  const auto m = random_matrix(13, 12, true);
  const auto v = Potential::polynomial({0, 0, 1.0});
  const double b = m.offdiag()[11], nb = 1.7;
  EXPECT_NEAR(local_trace_delta(m, 11, EntryKind::offdiag, nb, v), 2.0 * (nb * nb - b * b), 1e-12);
}

TEST(LocalTraceDelta, MatchesFullRecomputation) {
  const auto v = Potential::polynomial({0.2, 0, 0.5, 0, 1.0, 0, 0.05});
  for (bool periodic : {true, false}) {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
      const auto m = random_matrix(100 + trial, 12, periodic);
      SeededStream s(200 + trial, 0);
      const auto site = static_cast<std::size_t>(s.uniform() * (periodic ? 12 : 11));
      const bool diag = s.uniform() < 0.5;
      const double value = diag ? s.normal() : 0.1 + s.uniform();
      const auto m2 = diag ? m.with_diag(site, value) : m.with_offdiag(site, value);
      const double full = 12.0 * (trace_potential_moments(m2, v) - trace_potential_moments(m, v));
      const double local = local_trace_delta(m, site, diag ? EntryKind::diag : EntryKind::offdiag, value, v);
      EXPECT_NEAR(local, full, 1e-10 * (1.0 + std::abs(full)));
    }
  }
}

TEST(LocalTraceDelta, HighDegreeOnSmallRingFallsBack) {
  const auto v = Potential::polynomial({0, 0, 0, 0, 0, 0, 0, 0, 1.0});
  const auto m = random_matrix(21, 5, true);
  const auto m2 = m.with_offdiag(4, 0.9);
  const double full = 5.0 * (trace_potential_moments(m2, v) - trace_potential_moments(m, v));
  EXPECT_NEAR(local_trace_delta(m, 4, EntryKind::offdiag, 0.9, v), full, 1e-10 * (1.0 + std::abs(full)));
}

TEST(LocalTraceDelta, SweepComposesToGlobalDifference) {
  const auto v = Potential::polynomial({0, 0, 0.3, 0, 0.1});
  auto m = random_matrix(31, 40, true);
  const auto start = m;
  SeededStream s(32, 0);
  double accumulated = 0.0;
  for (std::size_t i = 0; i < 40; ++i) {
    const double a = s.normal();
    accumulated += local_trace_delta(m, i, EntryKind::diag, a, v);
    m = m.with_diag(i, a);
    const double b = 0.2 + s.uniform();
    accumulated += local_trace_delta(m, i, EntryKind::offdiag, b, v);
    m = m.with_offdiag(i, b);
  }
  const double global = 40.0 * (trace_potential_moments(m, v) - trace_potential_moments(start, v));
  EXPECT_NEAR(accumulated, global, 1e-8);
}

TEST(LocalTraceDelta, RejectsNonPolynomial) {
  const auto v = Potential::tabulated({-1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0, 0.5}, 1.0);
  EXPECT_THROW(local_trace_delta(random_matrix(1, 6, true), 0, EntryKind::diag, 0.0, v), InvalidInput);
}

TEST(DiagonalPowers, MatchesDenseProducts) {
  const auto m = random_matrix(41, 5, true);
  const auto d = diagonal_powers(m, 2, 4);
  ASSERT_EQ(d.size(), 5u);
  EXPECT_EQ(d[0], 1.0);
  EXPECT_NEAR(d[1], m.diag()[2], 1e-15);
  const double b1 = m.offdiag()[1], b2 = m.offdiag()[2];
  EXPECT_NEAR(d[2], m.diag()[2] * m.diag()[2] + b1 * b1 + b2 * b2, 1e-14);
}

TEST(MatrixDump, RoundTripsExactly) {
  for (bool periodic : {true, false}) {
    const auto m = random_matrix(51, 9, periodic);
    std::stringstream ss;
    write_matrix_dump(ss, m);
    EXPECT_EQ(read_matrix_dump(ss), m);
  }
}

TEST(MatrixDump, RejectsMalformedInput) {
  std::stringstream bad("3 1\n1 2\n");
  EXPECT_THROW(read_matrix_dump(bad), InvalidInput);
}

TEST(EmpiricalSpectralMeasure, SortsAndWeights) {
  const EmpiricalSpectralMeasure e({3.0, -1.0, 2.0, 2.0});
  EXPECT_EQ(e.values()[0], -1.0);
  EXPECT_EQ(e.values()[3], 3.0);
  EXPECT_DOUBLE_EQ(e.weight(), 0.25);
  EXPECT_DOUBLE_EQ(e.moment(1), 1.5);
  EXPECT_THROW(EmpiricalSpectralMeasure({}), InvalidInput);
  EXPECT_THROW(EmpiricalSpectralMeasure({std::numeric_limits<double>::infinity()}), InvalidInput);
}

TEST(EmpiricalSpectralMeasure, PoolingKeepsMultiplicity) {
  const std::vector<EmpiricalSpectralMeasure> parts{EmpiricalSpectralMeasure({1.0, 2.0}),
                                                    EmpiricalSpectralMeasure({2.0})};
  const auto pooled = EmpiricalSpectralMeasure::pooled(parts);
  ASSERT_EQ(pooled.size(), 3u);
  EXPECT_EQ(pooled.values()[1], 2.0);
  EXPECT_EQ(pooled.values()[2], 2.0);
}

// Changing k symmetric entry pairs is a perturbation of rank at most 2k.
TEST(RankInequality, RandomPerturbations) {
  SeededStream s(61, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + static_cast<std::size_t>(s.uniform() * 200);
    auto m = sample_toda_matrix(s, n, 0.5 + 2.0 * s.uniform());
    const auto start = m;
    const std::size_t k = 1 + static_cast<std::size_t>(s.uniform() * 5);
    for (std::size_t c = 0; c < k; ++c) {
      const auto site = static_cast<std::size_t>(s.uniform() * static_cast<double>(n));
      m = s.uniform() < 0.5 ? m.with_diag(site, 5.0 * s.normal()) : m.with_offdiag(site, 3.0 * s.uniform());
    }
    const double d = bl_bv_distance(eigenvalues(start), eigenvalues(m));
    EXPECT_LE(d, 2.0 * static_cast<double>(k) / static_cast<double>(n) + 1e-8) << "trial " << trial;
  }
}
