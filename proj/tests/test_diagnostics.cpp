#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fracpf/diagnostics.hpp"
#include "harness.hpp"

using namespace fracpf;
using harness::kTorus;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Energy, ConstantFields) {
  SpectralWorkspace ws(16, kTorus);
  EXPECT_NEAR(energy_original(ws, Field2D(16, kTorus, 0.0), 0.1), kPi * kPi, 1e-12);
  EXPECT_EQ(energy_original(ws, Field2D(16, kTorus, 1.0), 0.1), 0.0);
  EXPECT_EQ(energy_original(ws, Field2D(16, kTorus, -1.0), 0.7), 0.0);
}

TEST(Energy, TrigonometricFieldMatchesClosedForm) {
  // phi = sin x sin y: int |grad phi|^2 = 2 pi^2, int phi^2 = pi^2, int phi^4 = 9 pi^2 / 16.
  const double eps = 0.3;
  const double exact = 0.5 * eps * eps * 2 * kPi * kPi + 0.25 * (4 * kPi * kPi - 2 * kPi * kPi + 9 * kPi * kPi / 16);
  for (std::size_t M : {8u, 16u, 64u}) {
    SpectralWorkspace ws(M, kTorus);
    const auto phi = Field2D::sample(M, kTorus, [](double x, double y) { return std::sin(x) * std::sin(y); });
    EXPECT_NEAR(energy_original(ws, phi, eps), exact, 1e-12 * exact) << "M=" << M;
  }
}

TEST(Energy, ModifiedEqualsOriginalWhenAuxIsConsistent) {
  SpectralWorkspace ws(32, kTorus);
  ModelParams p;
  p.epsilon = 0.2;
  for (double beta : {0.0, 1.0, 4.0}) {
    p.beta = beta;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto phi = harness::smooth_random(32, kTorus, seed, 1.2);
      const double E = energy_original(ws, phi, p.epsilon);
      EXPECT_NEAR(energy_ieq(ws, phi, ieq_value(phi, beta), p), E, 1e-10 * std::abs(E));
      EXPECT_NEAR(energy_sav(ws, phi, sav_value(phi, beta, p.C0), p), E, 1e-10 * std::abs(E));
    }
  }
}

TEST(Energy, IeqZeroFieldExample) {
  SpectralWorkspace ws(16, kTorus);
  ModelParams p;
  p.beta = 1.0;
  const Field2D zero(16, kTorus);
  const double omega = kTorus.area();
  EXPECT_NEAR(energy_ieq(ws, zero, Field2D(16, kTorus, -2.0), p), omega / 4, 1e-12);
  EXPECT_NEAR(energy_ieq(ws, zero, ieq_value(zero, 1.0), p), energy_original(ws, zero, p.epsilon), 1e-12);
}

TEST(Volume, Examples) {
  EXPECT_NEAR(volume(Field2D(16, kTorus, 0.3)), 0.3 * kTorus.area(), 1e-12);
  EXPECT_NEAR(volume(Field2D::sample(16, kTorus, [](double x, double) { return std::sin(x); })), 0.0, 1e-14);
}

TEST(PowerLaw, Examples) {
  std::vector<double> t, E;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(std::pow(10.0, i / 20.0));
    E.push_back(2.0 * std::pow(t.back(), -1.0 / 3.0));
  }
  const auto fit = fit_power_law(t, E);
  EXPECT_NEAR(fit.beta, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(fit.beta0, std::log10(2.0), 1e-12);
  EXPECT_EQ(fit.points, 41u);

  std::vector<double> flat(t.size(), 5.0);
  EXPECT_NEAR(fit_power_law(t, flat).beta, 0.0, 1e-14);

  // Small multiplicative noise leaves the slope close.
  CounterRng rng(4);
  std::vector<double> noisy;
  for (double x : t) noisy.push_back(std::pow(x, -0.3) * (1.0 + 0.01 * rng.next_in(-1.0, 1.0)));
  EXPECT_NEAR(fit_power_law(t, noisy).beta, 0.3, 0.01);

  // The window excludes early data.
  std::vector<double> kinked;
  for (double x : t) kinked.push_back(x < 1.0 ? 1.0 : std::pow(x, -0.5));
  std::vector<double> tt{0.1, 0.5}, ee{1.0, 1.0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    tt.push_back(t[i]);
    ee.push_back(kinked[i]);
  }
  EXPECT_NEAR(fit_power_law(tt, ee, 1.0).beta, 0.5, 1e-12);
}

TEST(PowerLaw, Errors) {
  const std::vector<double> t{1.0, 2.0}, e{1.0};
  EXPECT_THROW(fit_power_law(t, e), std::invalid_argument);
  const std::vector<double> one{2.0}, v{1.0};
  EXPECT_THROW(fit_power_law(one, v), std::invalid_argument);
  const std::vector<double> neg{1.0, -1.0};
  EXPECT_THROW(fit_power_law(t, neg), std::invalid_argument);
}

TEST(Orders, TwoLevelAndFitted) {
  const std::vector<double> e{0.02, 0.005}, tau{0.1, 0.05};
  const auto o = max_error_and_order(e, tau);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_NEAR(o[0], 2.0, 1e-14);
  const std::vector<double> same{0.01, 0.01};
  EXPECT_EQ(max_error_and_order(same, tau)[0], 0.0);

  std::vector<double> errs, taus;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    taus.push_back(h);
    errs.push_back(3.0 * std::pow(h, 1.7));
  }
  EXPECT_NEAR(fitted_order(errs, taus), 1.7, 1e-12);
  EXPECT_THROW(fitted_order(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(SingularitySlope, PowerLawData) {
  // v(t) = t^alpha: difference quotients behave like t^{alpha-1}.
  const auto mesh = build_graded(1e-2, 200, 3.0);
  for (double alpha : {0.3, 0.7}) {
    std::vector<double> v;
    for (std::size_t k = 0; k <= mesh.steps(); ++k) v.push_back(std::pow(mesh.node(k), alpha));
    EXPECT_NEAR(singularity_slope(mesh, v, mesh.steps()), alpha - 1.0, 0.03) << "alpha=" << alpha;
  }
  std::vector<double> lin;
  for (std::size_t k = 0; k <= mesh.steps(); ++k) lin.push_back(2.0 * mesh.node(k));
  EXPECT_NEAR(singularity_slope(mesh, lin, 50), 0.0, 1e-12);
}

TEST(SingularitySlope, Errors) {
  const auto mesh = build_graded(1.0, 10, 2.0);
  EXPECT_THROW(singularity_slope(mesh, std::vector<double>(11, 1.0), 10), std::domain_error);
  EXPECT_THROW(singularity_slope(mesh, std::vector<double>(5, 1.0), 10), std::invalid_argument);
  EXPECT_THROW(singularity_slope(mesh, std::vector<double>(11, 1.0), 1), std::invalid_argument);
}

TEST(EnergyLog, ModifiedEnergyNeverIncreasesOnARun) {
  ModelParams p;
  p.alpha = 0.8;
  p.epsilon = 0.3;
  p.beta = 2.0;
  SpectralWorkspace ws(16, kTorus);
  const auto phi0 = harness::smooth_random(16, kTorus, 6);
  const auto mesh = extend_uniform(build_graded(0.1, 10, 3.0), 2.0, 20);
  for (auto scheme : {SchemeKind::ieq, SchemeKind::sav}) {
    auto s = make_state(phi0, p, IncrementHistory<Field2D>::direct(p.alpha, zero_like(phi0)));
    const auto tr = harness::run_steps(PhaseFieldStepper(ModelKind::cahn_hilliard, scheme, p), ws, mesh, s);
    for (std::size_t n = 1; n < tr.E_modified.size(); ++n)
      EXPECT_LE(tr.E_modified[n], tr.E_modified[n - 1] + 1e-10 * std::abs(tr.E_modified[0])) << "n=" << n;
  }
}
