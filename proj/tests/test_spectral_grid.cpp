#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracpf/random.hpp"
#include "fracpf/spectral_grid.hpp"

using namespace fracpf;

namespace {

constexpr double kPi = std::numbers::pi;
const Domain kTorus{0.0, 2 * kPi, 0.0, 2 * kPi};

Field2D random_field(std::size_t M, Domain d, std::uint64_t seed) {
  CounterRng rng(seed);
  Field2D f(M, d);
  for (std::size_t p = 0; p < f.points(); ++p) f[p] = rng.next_in(-1.0, 1.0);
  return f;
}

}  // namespace

TEST(Field2D, Validation) {
  EXPECT_THROW(Field2D(3, kTorus), std::invalid_argument);
  EXPECT_THROW(Field2D(2, kTorus), std::invalid_argument);
  EXPECT_THROW(Field2D(8, Domain{0, 0, 0, 1}), std::invalid_argument);
  Field2D a(8, kTorus, 1.0), b(16, kTorus, 1.0);
  EXPECT_THROW(a += b, ContractError);
  EXPECT_THROW(inner(a, b), ContractError);
}

TEST(Field2D, LayoutAndCoordinates) {
  const Domain d{-1.0, 1.0, 0.0, 4.0};
  const auto f = Field2D::sample(8, d, [](double x, double y) { return x + 10 * y; });
  EXPECT_DOUBLE_EQ(f.x(0), -1.0);
  EXPECT_DOUBLE_EQ(f.x(4), 0.0);
  EXPECT_DOUBLE_EQ(f.y(2), 1.0);
  EXPECT_DOUBLE_EQ(f(4, 2), 10.0);
  EXPECT_DOUBLE_EQ(f[2 * 8 + 4], 10.0);
  EXPECT_DOUBLE_EQ(f.cell_area(), 8.0 / 64.0);
}

TEST(Field2D, ReductionsAndArithmetic) {
  const Field2D c(16, kTorus, 2.5);
  EXPECT_DOUBLE_EQ(mean(c), 2.5);
  EXPECT_NEAR(integral(c), 2.5 * 4 * kPi * kPi, 1e-12);
  const auto s = Field2D::sample(16, kTorus, [](double x, double y) { return std::sin(x) * std::sin(y); });
  EXPECT_NEAR(inner(s, s), kPi * kPi, 1e-12);
  EXPECT_NEAR(mean(Field2D::sample(16, kTorus, [](double x, double) { return std::sin(x); })), 0.0, 1e-16);

  const auto f = random_field(16, kTorus, 1), g = random_field(16, kTorus, 2);
  EXPECT_DOUBLE_EQ(inner(f, g), inner(g, f));
  EXPECT_GE(inner(f, f), 0.0);
  Field2D h = f;
  axpy(h, 2.0, g);
  EXPECT_NEAR(max_abs_diff(h, f + 2.0 * g), 0.0, 1e-15);
  EXPECT_NEAR(inner(h, g), inner(f, g) + 2.0 * inner(g, g), 1e-12);
  scale_add(h, 0.0, 1.0, g);
  EXPECT_EQ(h, g);
  EXPECT_DOUBLE_EQ(hadamard(f, g)[7], f[7] * g[7]);
}

TEST(Spectral, RoundTrip) {
  for (std::size_t M : {8u, 32u, 64u}) {
    SpectralWorkspace ws(M, Domain{-1, 1, -1, 1});
    const auto f = random_field(M, ws.domain(), M);
    const auto back = ws.inverse(ws.forward(f));
    EXPECT_LE(max_abs_diff(f, back), 1e-13 * f.max_abs());
  }
}

TEST(Spectral, LaplacianEigenfunctions) {
  SpectralWorkspace ws(32, kTorus);
  const auto s = Field2D::sample(32, kTorus, [](double x, double y) { return std::sin(x) * std::sin(y); });
  EXPECT_LE(max_abs_diff(laplacian(ws, s), -2.0 * s), 1e-13);
  const auto s3 = Field2D::sample(32, kTorus, [](double x, double) { return std::sin(3 * x); });
  EXPECT_LE(max_abs_diff(laplacian(ws, s3), -9.0 * s3), 1e-12);
  EXPECT_LE(laplacian(ws, Field2D(32, kTorus, 4.0)).max_abs(), 1e-14);

  // Non-square periods: wavenumbers scale with the side lengths.
  const Domain d{0.0, 2.0, 0.0, 4.0};
  SpectralWorkspace wr(16, d);
  const auto f = Field2D::sample(16, d, [](double x, double y) { return std::cos(kPi * x) * std::sin(kPi * y / 2); });
  EXPECT_LE(max_abs_diff(wr.laplacian(f), -(kPi * kPi + kPi * kPi / 4) * f), 1e-12);
}

TEST(Spectral, LaplacianHasZeroMean) {
  SpectralWorkspace ws(32, kTorus);
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    EXPECT_NEAR(mean(laplacian(ws, random_field(32, kTorus, seed))), 0.0, 1e-12);
}

TEST(Spectral, Helmholtz) {
  SpectralWorkspace ws(32, kTorus);
  const auto s = Field2D::sample(32, kTorus, [](double x, double y) { return std::sin(x) * std::sin(y); });
  const double c0 = 0.7, c2 = 1.3;
  EXPECT_LE(max_abs_diff(solve_helmholtz(ws, c0, c2, (c0 + 2 * c2) * s), s), 1e-13);
  EXPECT_LE(max_abs_diff(solve_helmholtz(ws, c0, c2, Field2D(32, kTorus, c0)), Field2D(32, kTorus, 1.0)), 1e-14);

  const auto r = random_field(32, kTorus, 9);
  const auto u = solve_helmholtz(ws, c0, c2, r);
  Field2D applied = c0 * u;
  axpy(applied, -c2, laplacian(ws, u));
  EXPECT_LE(max_abs_diff(applied, r), 1e-12);

  EXPECT_THROW(solve_helmholtz(ws, 0.0, 1.0, r), std::invalid_argument);
  EXPECT_THROW(solve_helmholtz(ws, -1.0, 1.0, r), std::invalid_argument);
}

TEST(Spectral, Derivatives) {
  SpectralWorkspace ws(32, kTorus);
  const auto f = Field2D::sample(32, kTorus, [](double x, double y) { return std::sin(2 * x) * std::cos(3 * y); });
  const auto fx = Field2D::sample(32, kTorus, [](double x, double y) { return 2 * std::cos(2 * x) * std::cos(3 * y); });
  const auto fy = Field2D::sample(32, kTorus, [](double x, double y) { return -3 * std::sin(2 * x) * std::sin(3 * y); });
  EXPECT_LE(max_abs_diff(ws.derivative_x(f), fx), 1e-12);
  EXPECT_LE(max_abs_diff(ws.derivative_y(f), fy), 1e-12);
}

TEST(Spectral, GradientEnergy) {
  SpectralWorkspace ws(32, kTorus);
  const auto s = Field2D::sample(32, kTorus, [](double x, double) { return std::sin(x); });
  EXPECT_NEAR(grad_sq_integral(ws, s), 2 * kPi * kPi, 1e-11);
  const auto sx = ws.derivative_x(s);
  EXPECT_NEAR(grad_sq_integral(ws, s), inner(sx, sx), 1e-11);

  // Band-limited random field: Parseval against pointwise derivative quadrature.
  auto f = ws.truncate_two_thirds(random_field(32, kTorus, 4));
  const auto dx = ws.derivative_x(f), dy = ws.derivative_y(f);
  EXPECT_NEAR(grad_sq_integral(ws, f), inner(dx, dx) + inner(dy, dy), 1e-10 * grad_sq_integral(ws, f));

  // Same symbol as the Laplacian, Nyquist modes included.
  const auto r = random_field(32, kTorus, 5);
  EXPECT_NEAR(grad_sq_integral(ws, r), -inner(r, laplacian(ws, r)), 1e-10 * grad_sq_integral(ws, r));
}

TEST(Spectral, TwoThirdsTruncation) {
  SpectralWorkspace ws(24, kTorus, true);
  EXPECT_TRUE(ws.dealias());
  const auto low = Field2D::sample(24, kTorus, [](double x, double y) { return std::cos(3 * x) + std::sin(8 * y); });
  EXPECT_LE(max_abs_diff(ws.truncate_two_thirds(low), low), 1e-13);
  const auto high = Field2D::sample(24, kTorus, [](double x, double) { return std::cos(10 * x); });
  EXPECT_LE(ws.truncate_two_thirds(high).max_abs(), 1e-13);
  const auto r = random_field(24, kTorus, 6);
  const auto once = ws.truncate_two_thirds(r);
  EXPECT_LE(max_abs_diff(ws.truncate_two_thirds(once), once), 1e-14);
}

TEST(Spectral, GridMismatch) {
  SpectralWorkspace ws(16, kTorus);
  EXPECT_THROW(ws.forward(Field2D(32, kTorus)), ContractError);
  EXPECT_THROW(ws.laplacian(Field2D(16, Domain{0, 1, 0, 1})), ContractError);
}
