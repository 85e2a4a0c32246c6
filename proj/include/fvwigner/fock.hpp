#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/scales.hpp"

namespace fvw {

/// Truncated N x N matrix in the oscillator Fock basis, entries(m, n) = <m|X|n>.
struct FockMatrix {
  Eigen::MatrixXcd entries;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  cplx operator()(std::size_t m, std::size_t n) const {
    return entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  }
};

namespace detail {

/// h[k][n] = sqrt(n!/(n+k)!) x^{k/2} exp(-x/2) L_n^k(x) for n + k < N.
/// Bounded by one in magnitude; built with a normalized three-term recurrence in n.
inline void normalized_laguerre_table(double x, std::size_t N, std::vector<std::vector<double>>& h) {
  h.resize(N);
  double head = std::exp(-0.5 * x);
  const double sx = std::sqrt(x);
  for (std::size_t k = 0; k < N; ++k) {
    if (k > 0) head *= sx / std::sqrt(static_cast<double>(k));
    auto& row = h[k];
    const std::size_t len = N - k;
    row.assign(len, 0.0);
    row[0] = head;
    if (len > 1) row[1] = (1.0 + static_cast<double>(k) - x) * head / std::sqrt(static_cast<double>(k) + 1.0);
    for (std::size_t n = 1; n + 1 < len; ++n) {
      const double nn = static_cast<double>(n);
      const double kk = static_cast<double>(k);
      row[n + 1] = ((2.0 * nn + 1.0 + kk - x) * row[n] - std::sqrt(nn * (nn + kk)) * row[n - 1]) /
                   std::sqrt((nn + 1.0) * (nn + 1.0 + kk));
    }
  }
}

/// Dimensionless oscillator coordinates xi = q/a, eta = p a / hbar.
struct OscCoords {
  double a;
  double hbar;
  double xi(double q) const { return q / a; }
  double eta(double p) const { return p * a / hbar; }
};

inline OscCoords osc_coords(const PhysicalScales& s) { return {s.oscillator_length(), s.hbar}; }

/// Visits w = W_{|m><n|}(p, q) for every m >= n (m, n < N); the m < n entries are conj(w).
template <class Visit>
void visit_fock_wigner(double xi, double eta, std::size_t N, double hbar,
                       std::vector<std::vector<double>>& h, Visit&& visit) {
  const double rho2 = xi * xi + eta * eta;
  normalized_laguerre_table(2.0 * rho2, N, h);
  const double phi = std::atan2(eta, xi);
  const double norm = 1.0 / (std::numbers::pi * hbar);
  for (std::size_t k = 0; k < N; ++k) {
    const cplx phase = std::polar(norm, -static_cast<double>(k) * phi);
    const auto& row = h[k];
    for (std::size_t n = 0; n < row.size(); ++n) {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      visit(n + k, n, sign * row[n] * phase);
    }
  }
}

}  // namespace detail

/// <m|D(P,Q)|n> with beta = (Q/a + i a P/hbar)/sqrt(2) and D = exp(beta a^+ - beta^* a).
inline FockMatrix displacement_elements(double P, double Q, std::size_t N, const PhysicalScales& s) {
  if (N < 2) throw DomainError("displacement_elements: N must be >= 2");
  const auto oc = detail::osc_coords(s);
  const cplx beta = cplx{oc.xi(Q), oc.eta(P)} / std::numbers::sqrt2;
  const double x = std::norm(beta);
  const double arg = std::arg(beta);
  std::vector<std::vector<double>> h;
  detail::normalized_laguerre_table(x, N, h);
  FockMatrix D{Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N))};
  for (std::size_t k = 0; k < N; ++k) {
    const cplx up = std::polar(1.0, static_cast<double>(k) * arg);
    const cplx down = std::polar((k % 2 == 0) ? 1.0 : -1.0, -static_cast<double>(k) * arg);
    for (std::size_t n = 0; n < h[k].size(); ++n) {
      const auto m = static_cast<Eigen::Index>(n + k);
      const auto nn = static_cast<Eigen::Index>(n);
      D.entries(m, nn) = h[k][n] * up;
      if (k > 0) D.entries(nn, m) = h[k][n] * down;
    }
  }
  return D;
}

/// <m|T(p,q)|n> for the quasi-probability operator T(p,q); equals W_{|n><m|}(p,q).
/// A state sum_n C_n|n> has Wigner function sum_{m,n} C_m C_n^* <n|T|m>.
inline FockMatrix quasiprob_elements(double p, double q, std::size_t N, const PhysicalScales& s) {
  if (N < 2) throw DomainError("quasiprob_elements: N must be >= 2");
  const auto oc = detail::osc_coords(s);
  std::vector<std::vector<double>> h;
  FockMatrix T{Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N))};
  detail::visit_fock_wigner(oc.xi(q), oc.eta(p), N, s.hbar, h, [&](std::size_t m, std::size_t n, cplx w) {
    T.entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = std::conj(w);
    T.entries(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) = w;
  });
  return T;
}

/// Wigner function sum_{m,n} rho(m,n) W_{|m><n|} of a truncated operator on the grid.
/// The Weyl symbol of the same operator is 2 pi hbar times this field.
inline PhaseField wigner_of_operator(const Eigen::MatrixXcd& rho, const PhaseGrid& g, const PhysicalScales& s) {
  const auto N = static_cast<std::size_t>(rho.rows());
  const auto oc = detail::osc_coords(s);
  PhaseField out(g);
  std::vector<std::vector<double>> h;
  for (std::size_t i = 0; i < g.n_p; ++i) {
    for (std::size_t j = 0; j < g.n_q; ++j) {
      cplx acc{0.0, 0.0};
      detail::visit_fock_wigner(oc.xi(g.q(j)), oc.eta(g.p(i)), N, s.hbar, h,
                                [&](std::size_t m, std::size_t n, cplx w) {
                                  const auto mi = static_cast<Eigen::Index>(m);
                                  const auto ni = static_cast<Eigen::Index>(n);
                                  acc += rho(mi, ni) * w;
                                  if (m != n) acc += rho(ni, mi) * std::conj(w);
                                });
      out(i, j) = acc;
    }
  }
  return out;
}

/// <m|A|n> = \int A(p,q) W_{|n><m|}(p,q) dp dq by grid quadrature, m, n < N.
inline Eigen::MatrixXcd fock_project(const PhaseField& A, std::size_t N, const PhysicalScales& s) {
  if (A.representation() != Representation::direct) throw DomainError("fock_project: needs direct field");
  const auto& g = A.grid();
  const auto oc = detail::osc_coords(s);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  std::vector<std::vector<double>> h;
  for (std::size_t i = 0; i < g.n_p; ++i) {
    for (std::size_t j = 0; j < g.n_q; ++j) {
      const cplx a = A(i, j);
      if (a == cplx{0.0, 0.0}) continue;
      detail::visit_fock_wigner(oc.xi(g.q(j)), oc.eta(g.p(i)), N, s.hbar, h,
                                [&](std::size_t m, std::size_t n, cplx w) {
                                  const auto mi = static_cast<Eigen::Index>(m);
                                  const auto ni = static_cast<Eigen::Index>(n);
                                  M(mi, ni) += a * std::conj(w);
                                  if (m != n) M(ni, mi) += a * w;
                                });
    }
  }
  M *= g.cell();
  return M;
}

/// Spectral window applied to Fock-diagonal coefficients before resummation.
/// Sharp truncation gives the exact truncated operator, but its symbol never converges
/// pointwise; the smooth window keeps levels below exact_levels(N) untouched and rolls
/// the rest off with a C-infinity step, which makes the resummed symbol converge inside.
struct SymbolWindow {
  enum class Kind { sharp, smooth };
  Kind kind = Kind::smooth;
  double exact_fraction = 0.25;

  std::size_t exact_levels(std::size_t N) const {
    if (kind == Kind::sharp) return N;
    return std::max<std::size_t>(1, static_cast<std::size_t>(exact_fraction * static_cast<double>(N)));
  }

  std::vector<double> weights(std::size_t N) const {
    std::vector<double> w(N, 1.0);
    if (kind == Kind::sharp) return w;
    const std::size_t start = exact_levels(N);
    auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    for (std::size_t n = start; n < N; ++n) {
      const double t = static_cast<double>(n - start + 1) / static_cast<double>(N - start + 1);
      w[n] = g(1.0 - t) / (g(1.0 - t) + g(t));
    }
    return w;
  }

  static SymbolWindow sharp() { return {Kind::sharp, 1.0}; }
};

/// Weyl symbol of sum_n w_n f_n |n><n| (w from the window), i.e. sum_n w_n f_n 2 pi hbar T_nn.
inline PhaseField fock_diagonal_to_symbol(const std::vector<double>& f, const PhaseGrid& g, const PhysicalScales& s,
                                          const SymbolWindow& window = {}, Diagnostics* diag = nullptr) {
  const std::size_t N = f.size();
  if (N == 0) throw DomainError("fock_diagonal_to_symbol: empty coefficient list");
  const auto oc = detail::osc_coords(s);
  const auto w = window.weights(N);
  std::vector<double> c(N);
  for (std::size_t n = 0; n < N; ++n) c[n] = 2.0 * w[n] * f[n] * ((n % 2 == 0) ? 1.0 : -1.0);
  PhaseField out(g);
  std::vector<double> ell(N);
  for (std::size_t i = 0; i < g.n_p; ++i) {
    const double eta = oc.eta(g.p(i));
    for (std::size_t j = 0; j < g.n_q; ++j) {
      const double xi = oc.xi(g.q(j));
      const double x = 2.0 * (xi * xi + eta * eta);
      laguerre_sequence(0, x, std::exp(-0.5 * x), ell);
      double acc = 0.0;
      for (std::size_t n = 0; n < N; ++n) acc += c[n] * ell[n];
      out(i, j) = acc;
    }
  }
  check_boundary_decay(out, "fock_diagonal_to_symbol (truncation tail)", diag);
  return out;
}

}  // namespace fvw
