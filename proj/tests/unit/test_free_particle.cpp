#include <gtest/gtest.h>

#include <random>

#include "fvwigner/free_particle.hpp"
#include "fvwigner/oracle.hpp"

using namespace fvw;

namespace {

const PhysicalScales kF = PhysicalScales::canonical(0.0);

FVState two_packets(const PhaseGrid& g) {
  FVState st(g);
  st.psi_plus = gaussian_packet(g, 0.12, 0.02, 0.0, kF);
  st.psi_minus = gaussian_packet(g, -0.1, 0.02, 3.0, kF, cplx{0.0, 0.6});
  return st;
}

}  // namespace

TEST(EpsChi, HyperbolicIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double p1 = u(rng), p2 = u(rng);
    const auto ec = epsilon_chi(p1, p2, kF);
    EXPECT_NEAR(ec.eps * ec.eps - ec.chi * ec.chi, 1.0, 1e-13);
    const auto sw = epsilon_chi(p2, p1, kF);
    EXPECT_EQ(ec.eps, sw.eps);
    EXPECT_EQ(ec.chi, -sw.chi);
  }
  const auto same = epsilon_chi(0.4, 0.4, kF);
  EXPECT_DOUBLE_EQ(same.eps, 1.0);
  EXPECT_DOUBLE_EQ(same.chi, 0.0);
}

TEST(FreeParticle, EnergyLimits) {
  EXPECT_DOUBLE_EQ(energy_free(0.0, kF), 1.0);
  EXPECT_NEAR(energy_free(1e-4, kF), 1.0 + 0.5e-8, 1e-15);
  EXPECT_NEAR(energy_free(100.0, kF), 100.005, 1e-4);
}

TEST(FreeParticle, PacketIsNormalized) {
  const auto g = make_wigner_grid(256, 256, 0.6, kF);
  FVState st(g);
  st.psi_plus = gaussian_packet(g, 0.1, 0.03, 2.0, kF);
  EXPECT_NEAR(st.norm2(+1), 1.0, 1e-12);
  EXPECT_NEAR(st.charge_norm(), 1.0, 1e-12);
}

TEST(FreeParticle, StructureAndMarginals) {
  const auto g = make_wigner_grid(256, 256, 0.6, kF);
  const auto st = two_packets(g);
  const auto W = wigner_components(st, kF);
  const auto r = structure_report(W);
  EXPECT_LT(r.even_imag, 1e-12);
  EXPECT_LT(r.antisymmetry, 1e-12);
  EXPECT_LT(r.odd_marginal, 1e-12);
  EXPECT_NEAR(r.charge_norm, st.charge_norm(), 1e-12);
  const auto m = q_marginal(W.even_plus);
  for (std::size_t i = 0; i < g.n_p; ++i) EXPECT_NEAR(m[i].real(), std::norm(st.psi_plus[i]), 1e-10) << i;
}

TEST(FreeParticle, CommutingSquare) {
  const auto g = make_wigner_grid(256, 256, 0.6, kF);
  const auto st = two_packets(g);
  const auto W0 = wigner_components(st, kF);
  for (double t : {1.0, 4.0, 10.0}) {
    const auto lhs = wigner_components(oracle::wavefunction_evolution_free(st, t, kF), kF);
    EXPECT_LT(max_abs_diff(lhs, evolve_free(W0, t, kF)), 1e-10) << t;
  }
}

TEST(FreeParticle, EvolutionPreservesInvariants) {
  const auto g = make_wigner_grid(256, 256, 0.6, kF);
  const auto W0 = wigner_components(two_packets(g), kF);
  const auto r0 = structure_report(W0);
  const auto r = structure_report(evolve_free(W0, 7.5, kF));
  EXPECT_NEAR(r.charge_norm, r0.charge_norm, 1e-12);
  EXPECT_LT(r.antisymmetry, 1e-12);
  EXPECT_LT(r.even_imag, 1e-12);
}

TEST(FreeParticle, GalileanLimitForSlowPackets) {
  const auto g = make_wigner_grid(256, 256, 0.1, kF);
  FVState st(g);
  st.psi_plus = gaussian_packet(g, 0.02, 0.005, 0.0, kF);
  const auto W0 = wigner_components(st, kF);
  const auto rel = evolve_free(W0, 50.0, kF);
  const auto gal = evolve_free(W0, 50.0, kF, NonRelativisticDispersion{kF});
  EXPECT_LT(max_abs_diff(rel, gal) / W0.peak(), 1e-3);
}

TEST(FreeParticle, MomentsTrackGroupVelocity) {
  const auto g = make_wigner_grid(256, 256, 0.6, kF);
  FVState st(g);
  st.psi_plus = gaussian_packet(g, 0.1, 0.02, 0.0, kF);
  const double t = 10.0;
  const auto W = evolve_free(wigner_components(st, kF), t, kF);
  const double mq = moments(W, 0, 1).even().real();
  // <q>(t) = <dE/dp> t
  double v = 0.0;
  for (std::size_t i = 0; i < g.n_p; ++i) v += std::norm(st.psi_plus[i]) * g.p(i) / energy_free(g.p(i), kF) * g.dp();
  EXPECT_NEAR(mq, v * t, 1e-10);
  EXPECT_THROW(moments(W, 5, 0), DomainError);
}

TEST(FreeParticle, RejectsIncompatibleGrid) {
  const auto g = make_grid(64, 64, 0.6, 3.0);
  const WignerComponents W(g);
  EXPECT_THROW(evolve_free(W, 1.0, kF), DomainError);
}
