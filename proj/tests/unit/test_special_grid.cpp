#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fvwigner/grid.hpp"
#include "fvwigner/special.hpp"

using namespace fvw;

TEST(Laguerre, LowOrderClosedForms) {
  for (double x : {0.0, 0.3, 1.7, 6.0}) {
    EXPECT_DOUBLE_EQ(laguerre(0, 2, x), 1.0);
    EXPECT_NEAR(laguerre(1, 1, x), 2.0 - x, 1e-14);
    EXPECT_NEAR(laguerre(2, 0, x), 0.5 * (x * x - 4.0 * x + 2.0), 1e-13);
    EXPECT_NEAR(laguerre(3, 0, x), (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0, 1e-13);
  }
}

TEST(Laguerre, ValueAtZeroIsBinomial) {
  // L_n^a(0) = C(n + a, n)
  EXPECT_NEAR(laguerre(10, 0, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(laguerre(5, 3, 0.0), 56.0, 1e-12);
  EXPECT_NEAR(laguerre(20, 2, 0.0), 231.0, 1e-10);
}

TEST(Laguerre, SequenceMatchesPointwise) {
  std::vector<double> seq(30);
  const double x = 2.5, scale = std::exp(-0.5 * x);
  laguerre_sequence(0, x, scale, seq);
  for (int n = 0; n < 30; ++n) EXPECT_NEAR(seq[n], scale * laguerre(n, 0, x), 1e-12) << n;
}

TEST(Special, LogFactorial) {
  EXPECT_NEAR(log_factorial(0), 0.0, 1e-15);
  EXPECT_NEAR(log_factorial(5), std::log(120.0), 1e-13);
  EXPECT_NEAR(log_factorial(170), std::lgamma(171.0), 1e-10);
}

TEST(Special, IndexWrapping) {
  EXPECT_EQ(signed_index(0, 8), 0);
  EXPECT_EQ(signed_index(3, 8), 3);
  EXPECT_EQ(signed_index(5, 8), -3);
  EXPECT_EQ(wrap_index(-3, 8), 5u);
  EXPECT_EQ(wrap_index(3, 8), 3u);
}

TEST(Grid, Spacing) {
  const auto g = make_grid(8, 16, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(g.dp(), 0.25);
  EXPECT_DOUBLE_EQ(g.dq(), 0.25);
  EXPECT_DOUBLE_EQ(g.p(0), -1.0);
  EXPECT_DOUBLE_EQ(g.p(4), 0.0);
  EXPECT_DOUBLE_EQ(g.q(8), 0.0);
  EXPECT_EQ(g.size(), 128u);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(make_grid(7, 8, 1.0, 1.0), DomainError);
  EXPECT_THROW(make_grid(8, 4, 1.0, 1.0), DomainError);
  EXPECT_THROW(make_grid(8, 8, 0.0, 1.0), DomainError);
  EXPECT_THROW(make_grid(8, 8, 1.0, -1.0), DomainError);
}

TEST(Grid, CompatibilityRules) {
  const auto s = PhysicalScales::canonical(0.1);
  const auto gw = make_wigner_grid(64, 128, 0.5, s);
  EXPECT_TRUE(is_wigner_compatible(gw, s));
  // half a dual-momentum step is one p cell
  EXPECT_NEAR(0.5 * s.hbar * gw.dk(), gw.dp(), 1e-14);
  const auto gm = make_moyal_grid(64, s.oscillator_length(), s);
  EXPECT_TRUE(is_moyal_compatible(gm, s));
  EXPECT_FALSE(is_moyal_compatible(make_grid(64, 64, 1.0, 1.0), s));
}

TEST(Grid, MixedRoundTrip) {
  const auto g = make_grid(32, 64, 1.3, 2.1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const auto F = PhaseField::sample(g, [&](double, double) { return cplx{nd(rng), nd(rng)}; });
  const auto M = to_mixed(F);
  EXPECT_EQ(M.representation(), Representation::mixed);
  EXPECT_LT(max_abs_diff(to_direct(M), F), 1e-13);
}

TEST(Grid, IntegrateAndMarginal) {
  const auto g = make_grid(64, 64, 8.0, 8.0);
  const auto F = PhaseField::sample(g, [](double p, double q) {
    return cplx{std::exp(-0.5 * (p * p + q * q)) / (2.0 * std::numbers::pi), 0.0};
  });
  EXPECT_NEAR(integrate(F).real(), 1.0, 1e-12);
  const auto m = q_marginal(F);
  ASSERT_EQ(m.size(), g.n_p);
  EXPECT_NEAR(m[32].real(), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12);
}
