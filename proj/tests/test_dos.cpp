#include <gtest/gtest.h>

#include <cmath>

#include "toda/dos.hpp"
#include "toda/error.hpp"
#include "toda/metrics.hpp"

using namespace toda;

namespace {

const Potential kZero = Potential::zero();
const Potential kQuartic = Potential::polynomial({0, 0, 0, 0, 0.1});

class DosTest : public ::testing::Test {
 protected:
  DosTest() : grid_(domain_auto(3.0, kZero), 1000), kernel_(grid_) {}
  Grid grid_;
  LogKernel kernel_;
};

double sup_diff(const GridDensity& a, const GridDensity& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(DefaultStep, SmallPressureScalesDown) {
  EXPECT_DOUBLE_EQ(default_fd_step(1.0), 1e-3);
  EXPECT_DOUBLE_EQ(default_fd_step(0.005), 5e-4);
}

TEST_F(DosTest, SecondMomentIsOnePlusTwoP) {
  for (double p : {0.5, 1.0, 2.0}) {
    const auto dos = dos_from_equilibrium(p, kZero, kernel_);
    EXPECT_NEAR(dos.nu.moment(2), 1.0 + 2.0 * p, 2e-3) << "P=" << p;
    EXPECT_NEAR(dos.pre_clip_mass, 1.0, 1e-8);
    EXPECT_NEAR(dos.nu.mass(), 1.0, 1e-12);
    EXPECT_LE(dos.negativity, 1e-3);
  }
}

TEST_F(DosTest, EvenPotentialGivesEvenDos) {
  const auto dos = dos_from_equilibrium(1.0, kQuartic, kernel_);
  const std::size_t m = grid_.size();
  for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(dos.nu[i], dos.nu[m - 1 - i], 1e-8);
}

TEST_F(DosTest, RejectsBadStep) {
  DosOptions opt;
  opt.fd_step = 0.6;
  EXPECT_THROW(dos_from_equilibrium(1.0, kZero, kernel_, opt), InvalidInput);
  EXPECT_THROW(dos_from_equilibrium(0.0, kZero, kernel_), InvalidInput);
}

TEST_F(DosTest, NonConvergedSolvePropagates) {
  DosOptions opt;
  opt.solver.max_iter = 2;
  EXPECT_THROW(dos_from_equilibrium(1.0, kZero, kernel_, opt), NotConverged);
}

TEST_F(DosTest, StepRefinementIsSecondOrder) {
  std::vector<GridDensity> nus;
  for (double h : {0.1, 0.05, 0.025}) {
    DosOptions opt;
    opt.fd_step = h;
    opt.solver.tol = 1e-12;
    nus.push_back(dos_from_equilibrium(1.0, kZero, kernel_, opt).nu);
  }
  const double first = sup_diff(nus[0], nus[1]), second = sup_diff(nus[1], nus[2]);
  EXPECT_LE(second, first / 4.0 * 1.05);
  EXPECT_GE(second, first / 4.0 * 0.95);
}

TEST_F(DosTest, ConstantProfileMixtureEqualsSingleDos) {
  const auto mix = mixture_over_profile(VarianceProfile::constant(1.3), kZero, kernel_, {.nodes = 5});
  const auto dos = dos_from_equilibrium(1.3, kZero, kernel_);
  EXPECT_LE(sup_diff(mix, dos.nu), 1e-8);
}

TEST_F(DosTest, LinearProfileSecondMoment) {
  const auto mix = mixture_over_profile(VarianceProfile({1.0, 2.0}), kZero, kernel_, {.nodes = 8});
  EXPECT_NEAR(mix.moment(2), 4.0, 5e-3);
}

TEST_F(DosTest, ProfileNodeDoublingIsStable) {
  const VarianceProfile sigma({1.0, 2.0});
  const auto a = mixture_over_profile(sigma, kZero, kernel_, {.nodes = 6});
  const auto b = mixture_over_profile(sigma, kZero, kernel_, {.nodes = 12});
  EXPECT_LE(sup_diff(a, b), 1e-6);
}

TEST_F(DosTest, ProfileRejectsTooFewNodes) {
  EXPECT_THROW(mixture_over_profile(VarianceProfile({1.0}), kZero, kernel_, {.nodes = 4}), InvalidInput);
}

TEST_F(DosTest, BetaMixtureMatchesEquilibrium) {
  const auto report = beta_mixture_check(1.0, kZero, kernel_, {.nodes = 11});
  EXPECT_LE(report.sup_cdf_gap, 1e-2);
  EXPECT_NEAR(report.mixture_second_moment, report.mu_second_moment, 1e-3);
  EXPECT_NEAR(report.mu_second_moment, 2.0, 1e-3);
  EXPECT_EQ(report.anchored_nodes, 0u);
}

TEST_F(DosTest, BetaMixtureAtTinyPressureApproachesGibbs) {
  const auto report = beta_mixture_check(1e-3, kZero, kernel_, {.nodes = 7});
  EXPECT_EQ(report.anchored_nodes, 7u);
  EXPECT_LE(report.sup_cdf_gap, 1e-3);
}

TEST_F(DosTest, NuDensityRelation) {
  const auto report = nu_density_relation_check(1.0, kZero, kernel_);
  EXPECT_NEAR(report.normalization, 1.0, 1e-3);
  EXPECT_LE(report.residual, 5e-3);
  EXPECT_GE(report.min_factor, -1e-6);
}

TEST_F(DosTest, NuDensityRelationQuartic) {
  const auto report = nu_density_relation_check(1.5, kQuartic, kernel_);
  EXPECT_LE(report.residual, 5e-3);
  EXPECT_GE(report.min_factor, -1e-6);
}

TEST_F(DosTest, LipschitzRatiosStayBounded) {
  for (double p : {0.5, 1.0, 2.0}) {
    const auto sweep = log_energy_lipschitz_sweep(p, kZero, kernel_, {1e-1, 1e-2, 1e-3});
    ASSERT_EQ(sweep.ratios.size(), 3u);
    const double largest = *std::max_element(sweep.ratios.begin(), sweep.ratios.end());
    EXPECT_LE(sweep.ratios[2], 1.1 * sweep.ratios[0]);
    EXPECT_LT(largest, 10.0);
    for (double r : sweep.ratios) EXPECT_GT(r, 0.0);
  }
}

TEST_F(DosTest, CoulombFreeEnergyIsConvexInPressure) {
  std::vector<double> ps;
  for (int k = 0; k <= 15; ++k) ps.push_back(0.5 + 0.1 * k);
  for (const auto& v : {kZero, kQuartic}) {
    const auto curve = coulomb_free_energy_curve(ps, v, kernel_);
    for (double d : curve.convexity_of_fc) EXPECT_GE(d, -1e-6);
  }
}

TEST_F(DosTest, CoulombCurveRejectsNonUniformGrid) {
  EXPECT_THROW(coulomb_free_energy_curve({0.5, 0.6, 0.8}, kZero, kernel_), InvalidInput);
}

TEST(FreeEnergyRelation, ZeroPotentialGivesExactZeros) {
  const auto report = free_energy_relation_check(1.0, kZero, 200);
  EXPECT_EQ(report.lhs, 0.0);
  EXPECT_EQ(report.rhs, 0.0);
  EXPECT_EQ(report.lhs_stderr, 0.0);
}

TEST(FreeEnergyRelation, SmallQuarticCase) {
  FreeEnergyCheckOptions opt;
  opt.alpha_nodes = 5;
  opt.replicas = 3;
  opt.mcmc.sweeps = 600;
  opt.grid_points = 600;
  opt.seed = 11;
  const auto report = free_energy_relation_check(1.0, kQuartic, 60, opt);
  ASSERT_EQ(report.node_means.size(), 5u);
  // More confinement lowers the mean of Tr V along alpha.
  EXPECT_GT(report.node_means.front(), report.node_means.back());
  EXPECT_LT(report.lhs, 0.0);
  EXPECT_LT(report.rhs, 0.0);
  EXPECT_NEAR(report.lhs, report.rhs, std::max(4.0 * report.lhs_stderr, 0.05));
}

TEST(FreeEnergyRelation, AlphaRules) {
  FreeEnergyCheckOptions opt;
  opt.alpha_nodes = 3;
  opt.replicas = 2;
  opt.mcmc.sweeps = 50;
  opt.grid_points = 300;
  for (auto rule : {AlphaRule::gauss_legendre, AlphaRule::trapezoid}) {
    opt.alpha_rule = rule;
    const auto report = free_energy_relation_check(1.0, kQuartic, 10, opt);
    double total = 0.0;
    for (double w : report.alpha_weights) total += w;
    EXPECT_NEAR(total, 1.0, 1e-14);
    const bool endpoints = report.alphas.front() == 0.0 && report.alphas.back() == 1.0;
    EXPECT_EQ(endpoints, rule == AlphaRule::trapezoid);
  }
}

TEST(FreeEnergyRelation, RejectsBadInput) {
  const auto tab = Potential::tabulated({-1.0, 1.0}, {0.05, 0.05}, {0, 0, 0, 0, 0.05}, 1e-9);
  EXPECT_THROW(free_energy_relation_check(1.0, tab, 50), InvalidInput);
  EXPECT_THROW(free_energy_relation_check(1.0, kQuartic, 401), InvalidInput);
  FreeEnergyCheckOptions opt;
  opt.replicas = 1;
  EXPECT_THROW(free_energy_relation_check(1.0, kQuartic, 50, opt), InvalidInput);
}
