#include <gtest/gtest.h>

#include "fvwigner/coherent.hpp"

using namespace fvw;

namespace {
const PhysicalScales kBase = [] {
  PhysicalScales s;
  s.omega_c = 1.0;
  return s;
}();
}

TEST(Nlcs, NormalizedAndGlauberAtZeroField) {
  const auto s = scales_for_b(0.0, kBase);
  NonlinearCoherentSpec spec{1.5 * s.oscillator_length(), 40, DeformationConvention::adjacent};
  const auto em = coherent_eps_chi(spec, 0.0, s);
  const auto st = nlcs_coefficients(spec, em, s);
  EXPECT_NEAR(st.total_norm(), 1.0, 1e-14);
  const double lambda2 = 1.5 * 1.5 / 2.0;
  for (Eigen::Index n = 0; n < 10; ++n) {
    const double poisson = std::exp(-lambda2 + n * std::log(lambda2) - log_factorial(n));
    EXPECT_NEAR(std::norm(st.C_plus(n)), poisson, 1e-14) << n;
  }
}

TEST(Nlcs, DeformedFactorialConventions) {
  const auto s = scales_for_b(0.1, kBase);
  const auto em = eps_chi_matrix(landau_spectrum(12, 0.1, s));
  const auto adj = log_deformed_factorial(em, 10, DeformationConvention::adjacent);
  const auto sh = log_deformed_factorial(em, 10, DeformationConvention::shifted);
  EXPECT_EQ(adj[0], 0.0);
  EXPECT_NEAR(adj[1], 2.0 * std::log(em.eps(1, 0)), 1e-15);
  EXPECT_NEAR(sh[1], 2.0 * std::log(em.eps(2, 3)), 1e-15);
  EXPECT_THROW(log_deformed_factorial(em, 11, DeformationConvention::shifted), DomainError);
  EXPECT_EQ(parse_convention("shifted"), DeformationConvention::shifted);
  EXPECT_THROW(parse_convention("other"), DomainError);
}

TEST(Nlcs, TruncationGuard) {
  const auto s = scales_for_b(0.1, kBase);
  NonlinearCoherentSpec spec{3.0 * s.oscillator_length(), 6, DeformationConvention::adjacent};
  EXPECT_THROW(nlcs_coefficients(spec, coherent_eps_chi(spec, 0.1, s), s), NumericalError);
  EXPECT_GE(suggested_truncation(4.5, 1e-16), 20u);
}

TEST(DeltaR2, ZeroFieldLimitIsA2) {
  const auto s = scales_for_b(0.0, kBase);
  const double a2 = s.oscillator_length2();
  for (double r : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    NonlinearCoherentSpec spec{r * s.oscillator_length(), 48, DeformationConvention::adjacent};
    const auto em = coherent_eps_chi(spec, 0.0, s);
    EXPECT_NEAR(deltaR2_closed_form(spec, em, s), a2, 1e-10 * a2) << r;
    EXPECT_NEAR(deltaR2_direct(nlcs_coefficients(spec, em, s), spec.R_bar, s).dispersion, a2, 1e-10 * a2) << r;
  }
}

TEST(DeltaR2, ClosedFormMatchesDirect) {
  for (double b : {0.01, 0.1, 0.5}) {
    const auto s = scales_for_b(b, kBase);
    for (double r : {0.25, 1.0, 2.5}) {
      NonlinearCoherentSpec spec{r * s.oscillator_length(), 48, DeformationConvention::adjacent};
      const auto em = coherent_eps_chi(spec, b, s);
      const double closed = deltaR2_closed_form(spec, em, s);
      const double direct = deltaR2_direct(nlcs_coefficients(spec, em, s), spec.R_bar, s).dispersion;
      EXPECT_NEAR(closed / direct, 1.0, 1e-8) << b << " " << r;
    }
  }
}

TEST(Audit, NoFlagsWithoutFieldAndDeterministic) {
  const std::vector<double> R{0.0, 0.5, 1.0, 2.0, 3.0};
  const auto zero = uncertainty_audit(0.0, R, 48, DeformationConvention::adjacent, kBase);
  EXPECT_EQ(zero.flag_count(), 0u);
  const auto r1 = uncertainty_audit(0.1, R, 48, DeformationConvention::adjacent, kBase);
  const auto r2 = uncertainty_audit(0.1, R, 48, DeformationConvention::adjacent, kBase);
  ASSERT_EQ(r1.rows.size(), R.size());
  for (std::size_t k = 0; k < R.size(); ++k) {
    EXPECT_EQ(r1.rows[k].flag, r2.rows[k].flag);
    EXPECT_EQ(r1.rows[k].deltaR2_direct, r2.rows[k].deltaR2_direct);
    EXPECT_GE(r1.rows[k].dq_dp, 0.5 * kBase.hbar * (1.0 - 1e-12));
  }
}

TEST(Modulation, BeatCenterOfGlauberState) {
  const auto s = scales_for_b(0.0, kBase);
  NonlinearCoherentSpec spec{2.0 * s.oscillator_length(), 40, DeformationConvention::adjacent};
  const auto st = nlcs_coefficients(spec, coherent_eps_chi(spec, 0.0, s), s);
  const double nb = beat_center(st, eps_chi_matrix(landau_spectrum(40, 0.0, s)));
  EXPECT_NEAR(nb, 2.0, 0.6);
}

TEST(Modulation, EnvelopeFrequencyNearPrediction) {
  const double b = 0.05;
  const auto s = scales_for_b(b, kBase);
  const double R = s.oscillator_length();
  const double T = 10.0 * 2.0 * std::numbers::pi / s.modulation_frequency() * std::pow(1.0 + 3.0 * b, 1.5);
  const auto samples = static_cast<std::size_t>(4.0 * (T * s.omega_c / std::numbers::pi + 1.0));
  const auto r = modulation_experiment(b, R, T, samples, kBase);
  EXPECT_LT(std::abs(r.omega_est / r.omega_pred - 1.0), 0.05);
  EXPECT_LT(r.mean_R2_drift, 1e-10);
}

TEST(Modulation, RejectsUndersampling) {
  const auto s = scales_for_b(0.05, kBase);
  EXPECT_THROW(modulation_experiment(0.05, s.oscillator_length(), 1e4, 10, kBase), DomainError);
}
