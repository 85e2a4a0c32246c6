#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/free_particle.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/rotator.hpp"
#include "fvwigner/scales.hpp"

// Brute-force reference computations. Nothing here calls the Laguerre closed forms,
// the Moyal kernels or the mixed-representation propagators it is used to check.
namespace fvw::oracle {

/// h_k(x) for k <= n_max: normalized Hermite functions without the exp(-x^2/2) factor,
/// so that int h_m h_n exp(-x^2) dx = delta_mn.
inline std::vector<double> hermite_functions(std::size_t n_max, double x) {
  std::vector<double> h(n_max + 1);
  h[0] = std::pow(std::numbers::pi, -0.25);
  if (n_max >= 1) h[1] = std::numbers::sqrt2 * x * h[0];
  for (std::size_t k = 1; k < n_max; ++k) {
    const double kk = static_cast<double>(k);
    h[k + 1] = std::sqrt(2.0 / (kk + 1.0)) * x * h[k] - std::sqrt(kk / (kk + 1.0)) * h[k - 1];
  }
  return h;
}

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for weight exp(-x^2) by Golub-Welsch.
inline Quadrature gauss_hermite(std::size_t order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be >= 1");
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    J(k, k - 1) = std::sqrt(static_cast<double>(k) / 2.0);
    J(k - 1, k) = J(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  for (Eigen::Index k = 0; k < n; ++k) {
    q.nodes[k] = eig.eigenvalues()(k);
    const double v = eig.eigenvectors()(0, k);
    q.weights[k] = std::sqrt(std::numbers::pi) * v * v;
  }
  return q;
}

inline constexpr std::size_t kMaxQuadIndex = 60;
inline constexpr std::size_t kMaxQuadOrder = 600;

namespace detail {

/// Evaluates `rule(quadrature)` at increasing order until two orders 20 apart agree to tol.
template <class Rule>
cplx converged_quadrature(std::size_t start, Rule&& rule, const char* who, double tol = 1e-13) {
  cplx prev = rule(gauss_hermite(start));
  for (std::size_t order = start + 20; order <= kMaxQuadOrder; order += 20) {
    const cplx cur = rule(gauss_hermite(order));
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << who << ": quadrature did not converge by order " << kMaxQuadOrder;
  throw NumericalError(os.str());
}

}  // namespace detail

/// <m|exp(i(P q - Q p)/hbar)|n> by quadrature of oscillator eigenfunctions against the displaced argument.
inline cplx quad_displacement(std::size_t m, std::size_t n, double P, double Q, const PhysicalScales& s) {
  if (m > kMaxQuadIndex || n > kMaxQuadIndex) throw DomainError("quad_displacement: indices must be <= 60");
  const double a = s.oscillator_length();
  const double c = Q / (2.0 * a);
  auto rule = [&](const Quadrature& gh) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double u = gh.nodes[i];
      const auto hm = hermite_functions(m, u + c);
      const auto hn = hermite_functions(n, u - c);
      acc += gh.weights[i] * hm[m] * hn[n] * std::polar(1.0, P * (a * u + Q / 2.0) / s.hbar);
    }
    return acc * std::exp(-c * c) * std::polar(1.0, -P * Q / (2.0 * s.hbar));
  };
  return detail::converged_quadrature(4 * std::max(m, n) + 20, rule, "quad_displacement");
}

/// W_{|m><n|}(p, q) = (1/2 pi hbar) int phi_m(q + y/2) phi_n(q - y/2) exp(-i p y / hbar) dy.
inline cplx quad_wigner(std::size_t m, std::size_t n, double p, double q, const PhysicalScales& s) {
  if (m > kMaxQuadIndex || n > kMaxQuadIndex) throw DomainError("quad_wigner: indices must be <= 60");
  const double a = s.oscillator_length();
  const double xi = q / a;
  auto rule = [&](const Quadrature& gh) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double u = gh.nodes[i];
      const auto hm = hermite_functions(m, xi + u);
      const auto hn = hermite_functions(n, xi - u);
      acc += gh.weights[i] * hm[m] * hn[n] * std::polar(1.0, -2.0 * p * a * u / s.hbar);
    }
    return acc * (2.0 * std::exp(-xi * xi) / (2.0 * std::numbers::pi * s.hbar));
  };
  return detail::converged_quadrature(4 * std::max(m, n) + 20, rule, "quad_wigner");
}

/// Wigner function of the position wavefunction sum_n C_n phi_n(x) by quadrature.
inline cplx quad_wigner_state(const Eigen::VectorXcd& C, double p, double q, const PhysicalScales& s) {
  const auto N = static_cast<std::size_t>(C.size());
  if (N == 0 || N - 1 > kMaxQuadIndex) throw DomainError("quad_wigner_state: need 1..61 coefficients");
  const double a = s.oscillator_length();
  const double xi = q / a;
  auto psi = [&](double x) {
    const auto h = hermite_functions(N - 1, x);
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < N; ++k) acc += C(static_cast<Eigen::Index>(k)) * h[k];
    return acc;
  };
  auto rule = [&](const Quadrature& gh) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double u = gh.nodes[i];
      acc += gh.weights[i] * psi(xi + u) * std::conj(psi(xi - u)) * std::polar(1.0, -2.0 * p * a * u / s.hbar);
    }
    return acc * (2.0 * std::exp(-xi * xi) / (2.0 * std::numbers::pi * s.hbar));
  };
  return detail::converged_quadrature(4 * N + 20, rule, "quad_wigner_state");
}

/// Truncated operator in the oscillator Fock basis.
struct DenseOperator {
  Eigen::MatrixXcd entries;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  double hermiticity() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }
  bool is_hermitian(double tol = 1e-12) const { return hermiticity() <= tol; }
  bool is_positive(double tol = 0.0) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(entries);
    return eig.eigenvalues().minCoeff() >= -tol;
  }
};

/// Annihilation operator a|n> = sqrt(n)|n-1>.
inline DenseOperator annihilation(std::size_t N) {
  const auto n = static_cast<Eigen::Index>(N);
  DenseOperator A{Eigen::MatrixXcd::Zero(n, n)};
  for (Eigen::Index k = 1; k < n; ++k) A.entries(k - 1, k) = std::sqrt(static_cast<double>(k));
  return A;
}

/// q = a (a + a^+)/sqrt 2, p = i hbar (a^+ - a)/(sqrt 2 a).
inline DenseOperator dense_position(std::size_t N, const PhysicalScales& s) {
  const auto A = annihilation(N).entries;
  return {s.oscillator_length() / std::numbers::sqrt2 * (A + A.adjoint())};
}

inline DenseOperator dense_momentum(std::size_t N, const PhysicalScales& s) {
  const auto A = annihilation(N).entries;
  return {cplx{0.0, s.hbar / (std::numbers::sqrt2 * s.oscillator_length())} * (A.adjoint() - A)};
}

/// p^2/2m + m omega_c^2 q^2 / 2 built from the truncated q and p (last level is truncation-affected).
inline DenseOperator dense_oscillator_hamiltonian(std::size_t N, const PhysicalScales& s) {
  const auto X = dense_position(N, s).entries;
  const auto P = dense_momentum(N, s).entries;
  return {P * P / (2.0 * s.mass) + 0.5 * s.mass * s.omega_c * s.omega_c * X * X};
}

/// Principal square root by the Denman-Beavers iteration.
inline Eigen::MatrixXcd sqrtm_denman_beavers(const Eigen::MatrixXcd& A, double tol = 1e-14, int max_iter = 100) {
  Eigen::MatrixXcd Y = A;
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Identity(A.rows(), A.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXcd Yi = Y.inverse();
    const Eigen::MatrixXcd Zi = Z.inverse();
    const Eigen::MatrixXcd Yn = 0.5 * (Y + Zi);
    Z = 0.5 * (Z + Yi);
    const double change = (Yn - Y).cwiseAbs().maxCoeff();
    Y = Yn;
    if (change <= tol * Y.cwiseAbs().maxCoeff()) return Y;
  }
  throw NumericalError("sqrtm_denman_beavers: no convergence");
}

/// exp(-i H t / hbar) with H = tau_3 (x) diag(E), by eigendecomposition of the 2N x 2N Hamiltonian.
inline EnergyRepState dense_evolution(const EnergyRepState& st, const RotatorSpectrum& sp, double t,
                                      const PhysicalScales& s) {
  const auto N = static_cast<Eigen::Index>(sp.N);
  if (static_cast<std::size_t>(st.C_plus.size()) != sp.N) throw DomainError("dense_evolution: size mismatch");
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (Eigen::Index n = 0; n < N; ++n) {
    H(n, n) = sp.E[n];
    H(N + n, N + n) = -sp.E[n];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  Eigen::VectorXcd phases(2 * N);
  for (Eigen::Index k = 0; k < 2 * N; ++k) phases(k) = std::polar(1.0, -eig.eigenvalues()(k) * t / s.hbar);
  const Eigen::MatrixXcd V = eig.eigenvectors().cast<cplx>();
  const Eigen::MatrixXcd U = V * phases.asDiagonal() * V.adjoint();
  Eigen::VectorXcd v(2 * N);
  v << st.C_plus, st.C_minus;
  const Eigen::VectorXcd w = U * v;
  EnergyRepState out(sp.N);
  out.C_plus = w.head(N);
  out.C_minus = w.tail(N);
  return out;
}

inline constexpr std::size_t kMaxIntegralGrid = 64;

/// Star product from its integral representation
/// (A*B)(x) = (pi hbar)^{-2} int int A(x + x1) B(x + x2) exp(2i(q1 p2 - p1 q2)/hbar) dx1 dx2,
/// evaluated by direct sums over the grid with A, B taken as zero outside it.
inline PhaseField star_product_integral(const PhaseField& A, const PhaseField& B, const PhysicalScales& s) {
  const auto& g = A.grid();
  if (!(B.grid() == g)) throw DomainError("star_product_integral: grid mismatch");
  if (g.n_p > kMaxIntegralGrid || g.n_q > kMaxIntegralGrid)
    throw DomainError("star_product_integral: cost guard, grids above 64 per axis are refused");
  const std::size_t np = g.n_p, nq = g.n_q;
  const double dp = g.dp(), dq = g.dq();
  const PhaseField Ad = to_direct(A), Bd = to_direct(B);
  // phase(i1, j1, i2, j2) = 2 (q1 p2 - p1 q2) / hbar with offsets measured in cells
  auto phase = [&](long i1, long j1, long i2, long j2) {
    return 2.0 * dq * dp * (static_cast<double>(j1 * i2) - static_cast<double>(i1 * j2)) / s.hbar;
  };
  // Ahat(i2, j2) = sum_{y1} A(y1) exp(i phase(iy1, jy1, i2, j2)), offsets taken from the origin cell
  std::vector<cplx> Ahat(np * nq * 4, cplx{0.0, 0.0});
  const long span_q = 2 * static_cast<long>(nq);
  auto ah = [&](long i2, long j2) -> cplx& {
    return Ahat[static_cast<std::size_t>((i2 + static_cast<long>(np)) * span_q + (j2 + static_cast<long>(nq)))];
  };
  for (long i2 = -static_cast<long>(np); i2 < static_cast<long>(np); ++i2) {
    for (long j2 = -static_cast<long>(nq); j2 < static_cast<long>(nq); ++j2) {
      cplx acc{0.0, 0.0};
      for (std::size_t i1 = 0; i1 < np; ++i1)
        for (std::size_t j1 = 0; j1 < nq; ++j1)
          acc += Ad(i1, j1) * std::polar(1.0, phase(static_cast<long>(i1), static_cast<long>(j1), i2, j2));
      ah(i2, j2) = acc;
    }
  }
  const double pref = (dp * dq) * (dp * dq) / (std::numbers::pi * s.hbar * std::numbers::pi * s.hbar);
  PhaseField out(g);
  for (std::size_t ix = 0; ix < np; ++ix) {
    for (std::size_t jx = 0; jx < nq; ++jx) {
      cplx acc{0.0, 0.0};
      const long ixl = static_cast<long>(ix), jxl = static_cast<long>(jx);
      for (std::size_t i2 = 0; i2 < np; ++i2) {
        for (std::size_t j2 = 0; j2 < nq; ++j2) {
          const long di = static_cast<long>(i2) - ixl, dj = static_cast<long>(j2) - jxl;
          // shift the first offset by -x: exp(i phase(iy1 - ix, jy1 - jx, di, dj))
          const cplx corr = std::polar(1.0, phase(-ixl, -jxl, di, dj));
          acc += Bd(i2, j2) * ah(di, dj) * corr;
        }
      }
      out(ix, jx) = pref * acc;
    }
  }
  return out;
}

/// psi_a(p) exp(-i a sqrt(m^2 c^4 + p^2 c^2) t / hbar)
inline FVState wavefunction_evolution_free(const FVState& st, double t, const PhysicalScales& s) {
  FVState out = st;
  const double mc2 = s.mass * s.c * s.c;
  for (std::size_t i = 0; i < st.grid.n_p; ++i) {
    const double E = std::hypot(mc2, st.grid.p(i) * s.c);
    out.psi_plus[i] *= std::polar(1.0, -E * t / s.hbar);
    out.psi_minus[i] *= std::polar(1.0, E * t / s.hbar);
  }
  return out;
}

/// G_t = exp(-t r^2), r^2 = q^2/a^2 + p^2 a^2/hbar^2: G_t1 * G_t2 = exp(-r^2 (t1+t2)/(1+t1 t2)) / (1 + t1 t2).
inline double gaussian_star_closed_form(double t1, double t2, double p, double q, const PhysicalScales& s) {
  const double a = s.oscillator_length();
  const double r2 = q * q / (a * a) + p * p * a * a / (s.hbar * s.hbar);
  return std::exp(-r2 * (t1 + t2) / (1.0 + t1 * t2)) / (1.0 + t1 * t2);
}

inline double gaussian_symbol(double tau, double p, double q, const PhysicalScales& s) {
  const double a = s.oscillator_length();
  return std::exp(-tau * (q * q / (a * a) + p * p * a * a / (s.hbar * s.hbar)));
}

}  // namespace fvw::oracle
