#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "fvwigner/fock.hpp"
#include "fvwigner/free_particle.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/io/checks.hpp"
#include "fvwigner/oracle.hpp"
#include "fvwigner/rotator.hpp"
#include "fvwigner/special.hpp"
#include "fvwigner/star.hpp"

namespace fvw::io {

namespace detail {

inline double rel_diff(const PhaseField& a, const PhaseField& b) {
  const double scale = std::max(a.max_abs(), b.max_abs());
  return max_abs_diff(a, b) / (scale > 0.0 ? scale : 1.0);
}

/// Weyl symbol of a random N-level operator: band-limited and Gaussian-decayed.
inline PhaseField random_fock_symbol(std::mt19937_64& rng, std::size_t N, const PhaseGrid& g, const PhysicalScales& s) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd rho(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (Eigen::Index m = 0; m < rho.rows(); ++m)
    for (Eigen::Index n = 0; n < rho.cols(); ++n) rho(m, n) = cplx{nd(rng), nd(rng)};
  return wigner_of_operator(rho, g, s);
}

/// max |F - target| over points with q^2/a^2 + p^2 a^2/hbar^2 <= r2max, relative to max |target| there.
template <class Target>
double inner_deviation(const PhaseField& F, const PhysicalScales& s, double r2max, Target&& target) {
  const auto& g = F.grid();
  const double a = s.oscillator_length();
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.n_p; ++i) {
    for (std::size_t j = 0; j < g.n_q; ++j) {
      const double p = g.p(i), q = g.q(j);
      const double r2 = q * q / (a * a) + p * p * a * a / (s.hbar * s.hbar);
      if (r2 > r2max) continue;
      const cplx t = target(p, q);
      dev = std::max(dev, std::abs(F(i, j) - t));
      scale = std::max(scale, std::abs(t));
    }
  }
  return dev / (scale > 0.0 ? scale : 1.0);
}

}  // namespace detail

/// Kernel invariants: grid transforms, special functions, star product, Fock elements, symbols.
inline void kernels_selftest(CheckList& out) {
  const double b = 0.1;
  const PhysicalScales s = PhysicalScales::canonical(b);
  const double a = s.oscillator_length();
  std::mt19937_64 rng(20240611);

  {
    const auto g8 = make_grid(8, 8, 1.0, 1.0);
    const auto g16 = make_grid(8, 16, 1.0, 2.0);
    out.expect_le("grid.dp(8,8,1,1)", std::abs(g8.dp() - 0.25), 0.0);
    out.expect_le("grid.dq(8,16,1,2)", std::abs(g16.dq() - 0.25), 0.0);
    out.expect_le("grid.center_index", std::abs(g8.p(4)) + std::abs(g16.q(8)), 0.0);
    const auto g = make_grid(32, 64, 1.3, 2.1);
    std::normal_distribution<double> nd;
    PhaseField F = PhaseField::sample(g, [&](double, double) { return cplx{nd(rng), nd(rng)}; });
    out.expect_le("grid.round_trip", detail::rel_diff(to_direct(to_mixed(F)), F), 1e-12);
  }
  {
    out.expect_le("laguerre.L0", std::abs(laguerre(0, 3, 1.7) - 1.0), 0.0);
    out.expect_le("laguerre.L1", std::abs(laguerre(1, 2, 0.4) - (1.0 + 2.0 - 0.4)), 1e-15);
    out.expect_le("laguerre.L2(2)", std::abs(laguerre(2, 0, 2.0) + 1.0), 1e-15);
  }
  {
    using P = PolySymbol;
    const P q = P::q(), p = P::p();
    const P qp = star_product(q, p, s);
    const P want_qp = q * p + P::constant(cplx{0.0, s.hbar / 2.0});
    out.expect_le("star.q*p", qp.max_coefficient_diff(want_qp), 1e-12);
    out.expect_le("star.q*q", star_product(q, q, s).max_coefficient_diff(q * q), 1e-12);
    const P p2q2 = star_product(p * p, q * q, s);
    const P want = (p * p) * (q * q) - P::monomial(1, 1, cplx{0.0, 2.0 * s.hbar}) -
                   P::constant(s.hbar * s.hbar / 2.0);
    out.expect_le("star.p2*q2", p2q2.max_coefficient_diff(want), 1e-12);
  }
  {
    const auto g = make_moyal_grid(128, a, s);
    const PhaseField A = detail::random_fock_symbol(rng, 5, g, s);
    const PhaseField B = detail::random_fock_symbol(rng, 5, g, s);
    const PhaseField C = detail::random_fock_symbol(rng, 5, g, s);
    const PhaseField left = star_product(star_product(A, B, s), C, s);
    const PhaseField right = star_product(A, star_product(B, C, s), s);
    out.expect_le("star.associativity", detail::rel_diff(left, right), 1e-9);
    const PhaseField lhs = star_product(A, B, s).conj();
    const PhaseField rhs = star_product(B.conj(), A.conj(), s);
    out.expect_le("star.conjugation", detail::rel_diff(lhs, rhs), 1e-10);
    const PhaseField one = PhaseField::sample(g, [](double, double) { return cplx{1.0, 0.0}; });
    out.expect_le("star.identity", detail::rel_diff(star_product(one, A, s), A), 1e-12);
    const double t1 = 0.5, t2 = 0.8;
    const PhaseField G1 = PhaseField::sample(g, [&](double p, double q) { return cplx{oracle::gaussian_symbol(t1, p, q, s), 0.0}; });
    const PhaseField G2 = PhaseField::sample(g, [&](double p, double q) { return cplx{oracle::gaussian_symbol(t2, p, q, s), 0.0}; });
    const PhaseField G12 = PhaseField::sample(
        g, [&](double p, double q) { return cplx{oracle::gaussian_star_closed_form(t1, t2, p, q, s), 0.0}; });
    out.expect_le("star.gaussian_closed_form", detail::rel_diff(star_product(G1, G2, s), G12), 1e-10);
  }
  {
    const std::size_t N = 64;
    const auto D0 = displacement_elements(0.0, 0.0, N, s);
    out.expect_le("fock.displacement_identity",
                  (D0.entries - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff(), 1e-15);
    // |beta| = 2
    const double Q = std::sqrt(2.0) * 2.0 * a * std::cos(0.7), P = std::sqrt(2.0) * 2.0 * s.hbar / a * std::sin(0.7);
    const auto D = displacement_elements(P, Q, N, s);
    double tail = 0.0;
    for (Eigen::Index n = 0; n < 16; ++n) tail = std::max(tail, std::abs(D.entries.col(n).squaredNorm() - 1.0));
    out.expect_le("fock.displacement_column_norms", tail, 1e-10);
    const auto Dm = displacement_elements(-P, -Q, N, s);
    out.expect_le("fock.displacement_adjoint",
                  (D.entries.topLeftCorner(32, 32) - Dm.entries.adjoint().topLeftCorner(32, 32)).cwiseAbs().maxCoeff(),
                  1e-12);
    const auto T = quasiprob_elements(0.3 * s.hbar / a, -0.7 * a, 8, s);
    out.expect_le("fock.quasiprob_hermitian", (T.entries - T.entries.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    double im_diag = 0.0;
    for (Eigen::Index n = 0; n < 8; ++n) im_diag = std::max(im_diag, std::abs(T.entries(n, n).imag()));
    out.expect_le("fock.quasiprob_diagonal_real", im_diag, 1e-15);
    const double t00 = std::exp(-0.49 - 0.09) / (std::numbers::pi * s.hbar);
    out.expect_le("fock.T00_gaussian", std::abs(T.entries(0, 0) - t00) * std::numbers::pi * s.hbar, 1e-14);
  }
  {
    const auto g = make_moyal_grid(128, a, s);
    double trace = 0.0;
    for (std::size_t n = 0; n <= 8; ++n) {
      Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(9, 9);
      rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
      trace = std::max(trace, std::abs(integrate(wigner_of_operator(rho, g, s)) - 1.0));
    }
    out.expect_le("fock.quasiprob_trace", trace, 1e-10);
  }
  {
    const auto g = make_moyal_grid(128, a, s);
    const std::size_t N = 256;
    const SymbolWindow w{SymbolWindow::Kind::smooth, 0.1};
    const PhaseField one = fock_diagonal_to_symbol(std::vector<double>(N, 1.0), g, s, w);
    out.expect_le("symbol.identity", detail::inner_deviation(one, s, 8.0, [](double, double) { return cplx{1.0, 0.0}; }),
                  1e-8);
    std::vector<double> f(N);
    for (std::size_t n = 0; n < N; ++n) f[n] = s.hbar * s.omega_c * (n + 0.5);
    const PhaseField H = fock_diagonal_to_symbol(f, g, s, w);
    out.expect_le("symbol.oscillator", detail::inner_deviation(H, s, 8.0, [&](double p, double q) {
                    return cplx{p * p / (2.0 * s.mass) + 0.5 * s.mass * s.omega_c * s.omega_c * q * q, 0.0};
                  }),
                  1e-8);
    const auto g2 = make_moyal_grid(256, a, s);
    const PhaseField four = PhaseField::sample(g2, [](double, double) { return cplx{4.0, 0.0}; });
    StarSqrtOptions opt;
    opt.window = SymbolWindow{SymbolWindow::Kind::smooth, 0.4};
    const auto r = star_sqrt_detailed(four, s, 1e-10, opt);
    double worst = 0.0;
    for (std::size_t n = 0; n < r.exact_levels; ++n) worst = std::max(worst, std::abs(r.root_eigenvalues[n] - 2.0) / 2.0);
    out.expect_le("star_sqrt.constant_eigenvalues", worst, 1e-10);
    out.expect_le("star_sqrt.constant_residual", r.residual, 1e-10);
    // pointwise convergence of the resummed root is limited by the levels the grid resolves
    out.expect_le("star_sqrt.constant_symbol_inner",
                  detail::inner_deviation(r.root, s, 8.0, [](double, double) { return cplx{2.0, 0.0}; }), 1e-4);
  }
}

/// Independent-route comparisons: quadrature, dense Fock algebra, integral star product, wavefunctions.
inline void oracle_verify(CheckList& out) {
  const double b = 0.1;
  const PhysicalScales s = PhysicalScales::canonical(b);
  const double a = s.oscillator_length();
  {
    double worst = 0.0;
    const double pts[][2] = {{0.0, 0.0}, {0.4, -0.9}, {-1.1, 0.3}, {1.5, 1.2}};
    for (const auto& pt : pts) {
      const double P = pt[0] * s.hbar / a, Q = pt[1] * a;
      const auto D = displacement_elements(P, Q, 8, s);
      for (std::size_t m = 0; m < 8; ++m)
        for (std::size_t n = 0; n < 8; ++n)
          worst = std::max(worst, std::abs(oracle::quad_displacement(m, n, P, Q, s) -
                                           D.entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n))));
    }
    out.expect_le("oracle.displacement_quadrature", worst, 1e-9);
    const double beta2 = 0.5 * (0.16 + 0.81);
    const cplx d00 = oracle::quad_displacement(0, 0, 0.4 * s.hbar / a, -0.9 * a, s);
    out.expect_le("oracle.D00_gaussian", std::abs(std::abs(d00) - std::exp(-beta2 / 2.0)), 1e-12);
  }
  {
    double worst = 0.0;
    const double pts[][2] = {{0.0, 0.0}, {0.7, -0.2}, {-1.3, 1.1}, {2.0, 0.5}};
    for (const auto& pt : pts) {
      const double p = pt[0] * s.hbar / a, q = pt[1] * a;
      const auto T = quasiprob_elements(p, q, 8, s);
      for (std::size_t m = 0; m < 8; ++m)
        for (std::size_t n = 0; n < 8; ++n)
          worst = std::max(worst, std::abs(oracle::quad_wigner(n, m, p, q, s) -
                                           T.entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n))));
    }
    out.expect_le("oracle.quasiprob_quadrature", worst * std::numbers::pi * s.hbar, 1e-9);
  }
  {
    const auto sp = landau_spectrum(12, b, s);
    EnergyRepState st(12);
    st.C_plus(0) = 0.6;
    st.C_plus(3) = cplx{0.0, 0.5};
    st.C_minus(1) = 0.4;
    st.C_minus(7) = std::sqrt(1.0 - 0.36 - 0.25 - 0.16);
    double worst = 0.0;
    for (double t : {0.0, 1.7, 25.0, 310.0}) {
      const auto x = evolve_energy_rep(st, sp, t, s);
      const auto y = oracle::dense_evolution(st, sp, t, s);
      worst = std::max({worst, (x.C_plus - y.C_plus).cwiseAbs().maxCoeff(), (x.C_minus - y.C_minus).cwiseAbs().maxCoeff()});
    }
    out.expect_le("oracle.dense_evolution", worst, 1e-13);
  }
  {
    const std::size_t N = 40;
    const auto H = oracle::dense_oscillator_hamiltonian(N, s).entries;
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(N, N) + (2.0 / s.rest_energy()) * H;
    const Eigen::MatrixXcd R = oracle::sqrtm_denman_beavers(A);
    const auto sp = landau_spectrum(17, b, s);
    double worst = 0.0;
    for (std::size_t n = 0; n < 17; ++n)
      worst = std::max(worst, std::abs(R(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real() -
                                       sp.E[n] / s.rest_energy()));
    out.expect_le("oracle.dense_sqrt_spectrum", worst, 1e-12);
  }
  {
    std::mt19937_64 rng(77);
    const auto g = make_moyal_grid(64, a, s);
    const PhaseField A = detail::random_fock_symbol(rng, 3, g, s);
    const PhaseField B = detail::random_fock_symbol(rng, 3, g, s);
    out.expect_le("oracle.star_integral_64", detail::rel_diff(star_product(A, B, s), oracle::star_product_integral(A, B, s)),
                  1e-8);
  }
  {
    const PhysicalScales f = PhysicalScales::canonical(0.0);
    const auto g = make_wigner_grid(256, 256, 0.6, f);
    FVState st(g);
    st.psi_plus = gaussian_packet(g, 0.12, 0.02, 0.0, f);
    const auto second = gaussian_packet(g, -0.1, 0.02, 3.0, f, cplx{0.0, 0.6});
    for (std::size_t i = 0; i < g.n_p; ++i) st.psi_minus[i] = second[i];
    const auto W0 = wigner_components(st, f);
    double worst = 0.0;
    for (double t : {0.0, 2.5, 10.0}) {
      const auto lhs = wigner_components(oracle::wavefunction_evolution_free(st, t, f), f);
      worst = std::max(worst, max_abs_diff(lhs, evolve_free(W0, t, f)));
    }
    out.expect_le("oracle.free_commuting_square", worst, 1e-10);
  }
}

}  // namespace fvw::io
