#include <gtest/gtest.h>

#include <random>

#include "fvwigner/fock.hpp"
#include "fvwigner/oracle.hpp"
#include "fvwigner/star.hpp"

using namespace fvw;

namespace {
const PhysicalScales kS = PhysicalScales::canonical(0.1);
}

TEST(Quadrature, GaussHermiteMoments) {
  const auto rule = oracle::gauss_hermite(20);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = rule.nodes[k], w = rule.weights[k];
    m0 += w;
    m2 += w * x * x;
    m4 += w * x * x * x * x;
  }
  const double sp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(m0, sp, 1e-13);
  EXPECT_NEAR(m2, sp / 2.0, 1e-13);
  EXPECT_NEAR(m4, 3.0 * sp / 4.0, 1e-13);
}

TEST(Quadrature, HermiteFunctionsOrthonormal) {
  const auto rule = oracle::gauss_hermite(80);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(10, 10);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const auto h = oracle::hermite_functions(9, rule.nodes[k]);
    const double w = rule.weights[k];
    for (int m = 0; m < 10; ++m)
      for (int n = 0; n < 10; ++n) G(m, n) += w * h[m] * h[n];
  }
  EXPECT_LT((G - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Oracle, DisplacementQuadratureAgrees) {
  const double a = kS.oscillator_length();
  const double P = -0.6 * kS.hbar / a, Q = 1.2 * a;
  const auto D = displacement_elements(P, Q, 8, kS);
  for (std::size_t m = 0; m < 8; ++m)
    for (std::size_t n = 0; n < 8; ++n)
      EXPECT_LT(std::abs(oracle::quad_displacement(m, n, P, Q, kS) - D.entries(m, n)), 1e-9) << m << "," << n;
}

TEST(Oracle, QuasiprobQuadratureAgrees) {
  const double a = kS.oscillator_length();
  const double p = 0.7 * kS.hbar / a, q = -0.2 * a;
  const auto T = quasiprob_elements(p, q, 6, kS);
  for (std::size_t m = 0; m < 6; ++m)
    for (std::size_t n = 0; n < 6; ++n)
      EXPECT_LT(std::abs(oracle::quad_wigner(n, m, p, q, kS) - T.entries(m, n)) * std::numbers::pi * kS.hbar, 1e-9);
}

TEST(Oracle, DenseOperatorsAreHermitian) {
  EXPECT_TRUE(oracle::dense_position(12, kS).is_hermitian());
  EXPECT_TRUE(oracle::dense_momentum(12, kS).is_hermitian());
  const auto H = oracle::dense_oscillator_hamiltonian(12, kS);
  EXPECT_TRUE(H.is_hermitian());
  EXPECT_TRUE(H.is_positive());
  EXPECT_NEAR(H.entries(0, 0).real(), 0.5 * kS.hbar * kS.omega_c, 1e-14);
}

TEST(Oracle, DenmanBeaversSquareRoot) {
  const auto H = oracle::dense_oscillator_hamiltonian(30, kS).entries;
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(30, 30) + (2.0 / kS.rest_energy()) * H;
  const Eigen::MatrixXcd R = oracle::sqrtm_denman_beavers(A);
  EXPECT_LT((R * R - A).cwiseAbs().maxCoeff(), 1e-12);
  const auto sp = landau_spectrum(16, 0.1, kS);
  for (Eigen::Index n = 0; n < 16; ++n) EXPECT_NEAR(R(n, n).real(), sp.E[n], 1e-12);
}

TEST(Oracle, IntegralStarProductAgrees) {
  const auto g = make_moyal_grid(64, kS.oscillator_length(), kS);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd X(3, 3), Y(3, 3);
  for (Eigen::Index m = 0; m < 3; ++m)
    for (Eigen::Index n = 0; n < 3; ++n) {
      X(m, n) = cplx{nd(rng), nd(rng)};
      Y(m, n) = cplx{nd(rng), nd(rng)};
    }
  const auto A = wigner_of_operator(X, g, kS), B = wigner_of_operator(Y, g, kS);
  const auto fast = star_product(A, B, kS);
  EXPECT_LT(max_abs_diff(fast, oracle::star_product_integral(A, B, kS)) / fast.max_abs(), 1e-8);
}

TEST(Oracle, IntegralStarProductCostGuard) {
  const auto g = make_moyal_grid(128, kS.oscillator_length(), kS);
  const PhaseField A(g);
  EXPECT_THROW(oracle::star_product_integral(A, A, kS), DomainError);
}

TEST(Oracle, FreeWavefunctionEvolutionIsUnitary) {
  const auto f = PhysicalScales::canonical(0.0);
  const auto g = make_wigner_grid(128, 128, 0.6, f);
  FVState st(g);
  st.psi_plus = gaussian_packet(g, 0.1, 0.03, 0.0, f);
  st.psi_minus = gaussian_packet(g, -0.1, 0.03, 0.0, f, 0.5);
  const auto out = oracle::wavefunction_evolution_free(st, 6.0, f);
  EXPECT_NEAR(out.norm2(+1), st.norm2(+1), 1e-13);
  EXPECT_NEAR(out.norm2(-1), st.norm2(-1), 1e-13);
  const auto back = oracle::wavefunction_evolution_free(out, -6.0, f);
  for (std::size_t i = 0; i < g.n_p; ++i) EXPECT_LT(std::abs(back.psi_plus[i] - st.psi_plus[i]), 1e-14);
}
