#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/fock.hpp"
#include "fvwigner/free_particle.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/scales.hpp"
#include "fvwigner/star.hpp"
#include "fvwigner/wigner.hpp"

namespace fvw {

struct RotatorSpectrum {
  std::size_t N = 0;
  double b = 0.0;
  double rest_energy = 1.0;
  std::vector<double> E;
};

/// E_n = mc^2 sqrt(1 + (2n+1) b)
inline RotatorSpectrum landau_spectrum(std::size_t N, double b, const PhysicalScales& s) {
  if (N < 2) throw DomainError("landau_spectrum: N must be >= 2");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("landau_spectrum: b must be >= 0");
  RotatorSpectrum sp{N, b, s.rest_energy(), std::vector<double>(N)};
  for (std::size_t n = 0; n < N; ++n) sp.E[n] = sp.rest_energy * std::sqrt(1.0 + (2.0 * n + 1.0) * b);
  return sp;
}

inline RotatorSpectrum landau_spectrum(std::size_t N, const PhysicalScales& s) { return landau_spectrum(N, s.b(), s); }

/// hbar omega_c (n + 1/2): the oscillator levels, used for the harmonic limit.
inline RotatorSpectrum harmonic_spectrum(std::size_t N, const PhysicalScales& s) {
  if (N < 2) throw DomainError("harmonic_spectrum: N must be >= 2");
  RotatorSpectrum sp{N, s.b(), 0.0, std::vector<double>(N)};
  for (std::size_t n = 0; n < N; ++n) sp.E[n] = s.hbar * s.omega_c * (n + 0.5);
  return sp;
}

struct EpsilonChiMatrix {
  std::size_t N = 0;
  Eigen::MatrixXd eps;
  Eigen::MatrixXd chi;
};

inline EpsilonChiMatrix eps_chi_matrix(const RotatorSpectrum& sp) {
  const auto N = static_cast<Eigen::Index>(sp.N);
  EpsilonChiMatrix em{sp.N, Eigen::MatrixXd(N, N), Eigen::MatrixXd(N, N)};
  for (Eigen::Index m = 0; m < N; ++m) {
    for (Eigen::Index n = 0; n < N; ++n) {
      const auto ec = epsilon_chi_energies(sp.E[m], sp.E[n]);
      em.eps(m, n) = ec.eps;
      em.chi(m, n) = ec.chi;
    }
  }
  for (Eigen::Index m = 0; m < N; ++m) {
    em.eps(m, m) = 1.0;
    em.chi(m, m) = 0.0;
  }
  return em;
}

struct EnergyRepState {
  Eigen::VectorXcd C_plus;
  Eigen::VectorXcd C_minus;

  EnergyRepState() = default;
  explicit EnergyRepState(std::size_t N)
      : C_plus(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N))),
        C_minus(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N))) {}

  std::size_t size() const { return static_cast<std::size_t>(C_plus.size()); }
  const Eigen::VectorXcd& component(int alpha) const { return alpha > 0 ? C_plus : C_minus; }
  Eigen::VectorXcd& component(int alpha) { return alpha > 0 ? C_plus : C_minus; }

  double total_norm() const { return C_plus.squaredNorm() + C_minus.squaredNorm(); }
  double charge_norm() const { return C_plus.squaredNorm() - C_minus.squaredNorm(); }
  /// (|C_{N-1,+}|^2 + |C_{N-1,-}|^2) / total
  double tail_fraction() const {
    const auto last = C_plus.size() - 1;
    const double t = std::norm(C_plus(last)) + std::norm(C_minus(last));
    const double tot = total_norm();
    return tot > 0.0 ? t / tot : 0.0;
  }
};

inline constexpr double kTailTolerance = 1e-12;

inline void validate_energy_state(const EnergyRepState& st, std::size_t N, Diagnostics* diag = nullptr) {
  if (st.C_minus.size() != st.C_plus.size()) throw DomainError("EnergyRepState: components differ in length");
  if (st.size() != N) {
    std::ostringstream os;
    os << "EnergyRepState: truncation " << st.size() << " does not match spectrum size " << N;
    throw DomainError(os.str());
  }
  if (!st.C_plus.allFinite() || !st.C_minus.allFinite()) throw DomainError("EnergyRepState: non-finite coefficient");
  if (st.tail_fraction() > kTailTolerance) {
    std::ostringstream os;
    os << "EnergyRepState: tail mass " << st.tail_fraction() << " exceeds " << kTailTolerance;
    warn(diag, os.str());
  }
}

/// Required grid half-width (in q) so that Fock functions up to N are resolved: 1.5 a sqrt(2N).
inline double required_extent(std::size_t N, const PhysicalScales& s) {
  return 1.5 * s.oscillator_length() * std::sqrt(2.0 * static_cast<double>(N));
}

inline void require_resolved(const PhaseGrid& g, std::size_t N, const PhysicalScales& s, const char* who) {
  const double need = required_extent(N, s);
  const double a = s.oscillator_length();
  const double have = std::min(g.q_extent, g.p_extent * a * a / s.hbar);
  if (have < need * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << who << ": grid extent " << have << " (q units) is below the required " << need << " for N = " << N;
    throw NumericalError(os.str());
  }
}

/// W_a^a = sum eps_mn C_{m,a} C*_{n,a} W_{|m><n|}; W_a^-a = sum chi_mn C_{m,-a} C*_{n,a} W_{|m><n|}.
inline WignerComponents wigner_energy_rep(const EnergyRepState& st, const EpsilonChiMatrix& em, const PhaseGrid& g,
                                          const PhysicalScales& s, Diagnostics* diag = nullptr) {
  const std::size_t N = em.N;
  validate_energy_state(st, N, diag);
  require_resolved(g, N, s, "wigner_energy_rep");
  const Eigen::MatrixXcd rpp = em.eps.cast<cplx>().cwiseProduct(st.C_plus * st.C_plus.adjoint());
  const Eigen::MatrixXcd rmm = em.eps.cast<cplx>().cwiseProduct(st.C_minus * st.C_minus.adjoint());
  const Eigen::MatrixXcd rpm = em.chi.cast<cplx>().cwiseProduct(st.C_minus * st.C_plus.adjoint());
  const Eigen::MatrixXcd rmp = em.chi.cast<cplx>().cwiseProduct(st.C_plus * st.C_minus.adjoint());
  const bool odd = st.C_plus.squaredNorm() > 0.0 && st.C_minus.squaredNorm() > 0.0;

  const auto oc = detail::osc_coords(s);
  WignerComponents w(g);
  std::vector<std::vector<double>> h;
  for (std::size_t i = 0; i < g.n_p; ++i) {
    for (std::size_t j = 0; j < g.n_q; ++j) {
      cplx a{0.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{0.0, 0.0};
      detail::visit_fock_wigner(oc.xi(g.q(j)), oc.eta(g.p(i)), N, s.hbar, h,
                                [&](std::size_t m, std::size_t n, cplx v) {
                                  const auto mi = static_cast<Eigen::Index>(m);
                                  const auto ni = static_cast<Eigen::Index>(n);
                                  a += rpp(mi, ni) * v;
                                  b += rmm(mi, ni) * v;
                                  if (odd) {
                                    c += rpm(mi, ni) * v;
                                    d += rmp(mi, ni) * v;
                                  }
                                  if (m != n) {
                                    const cplx vc = std::conj(v);
                                    a += rpp(ni, mi) * vc;
                                    b += rmm(ni, mi) * vc;
                                    if (odd) {
                                      c += rpm(ni, mi) * vc;
                                      d += rmp(ni, mi) * vc;
                                    }
                                  }
                                });
      w.even_plus(i, j) = a;
      w.even_minus(i, j) = b;
      w.odd_plus(i, j) = c;
      w.odd_minus(i, j) = d;
    }
  }
  return w;
}

/// C_{n,a}(t) = exp(-i a E_n t / hbar) C_{n,a}(0)
inline EnergyRepState evolve_energy_rep(const EnergyRepState& st, const RotatorSpectrum& sp, double t,
                                        const PhysicalScales& s) {
  validate_energy_state(st, sp.N);
  EnergyRepState out = st;
  for (std::size_t n = 0; n < sp.N; ++n) {
    const double ph = sp.E[n] * t / s.hbar;
    const auto k = static_cast<Eigen::Index>(n);
    out.C_plus(k) *= std::polar(1.0, -ph);
    out.C_minus(k) *= std::polar(1.0, ph);
  }
  return out;
}

/// Weyl symbol of mc^2 + sum_n w_n (E_n - mc^2) |n><n|; the constant is carried exactly,
/// so the windowed part decays at the grid edge.
inline PhaseField rotator_energy_symbol(const RotatorSpectrum& sp, const PhaseGrid& g, const PhysicalScales& s,
                                        const SymbolWindow& window = {}, Diagnostics* diag = nullptr) {
  std::vector<double> f(sp.N);
  for (std::size_t n = 0; n < sp.N; ++n) f[n] = sp.E[n] - sp.rest_energy;
  PhaseField out = fock_diagonal_to_symbol(f, g, s, window, diag);
  for (auto& v : out.values()) v += sp.rest_energy;
  return out;
}

struct MoyalEvolution {
  WignerComponents W;
  double stability = 0.0;       ///< dt * 2 sup|E - mc^2| / hbar; RK4 needs <= 2 sqrt(2)
  double error_estimate = 0.0;  ///< a-priori RK4 global error bound relative to the field peak
};

inline constexpr double kRk4ImaginaryBound = 2.8284271247461903;

/// Fourth-order Runge-Kutta integration of dW_a^a/dt = -(i a/hbar)(E*W - W*E) and
/// dW_a^-a/dt = (i a/hbar)(E*W + W*E). The odd flow is integrated in the frame rotating at 2 mc^2/hbar.
inline MoyalEvolution evolve_moyal_rotator(const WignerComponents& W, const PhaseField& symbol_E, double t,
                                           std::size_t steps, const PhysicalScales& s, double rest_energy) {
  const auto& g = W.grid();
  if (!(symbol_E.grid() == g)) throw DomainError("evolve_moyal_rotator: symbol grid differs from Wigner grid");
  if (!is_moyal_compatible(g, s)) throw DomainError("evolve_moyal_rotator: grid is not Moyal-compatible");
  if (steps == 0) throw DomainError("evolve_moyal_rotator: steps must be >= 1");

  MoyalEvolution res;
  PhaseField Ep = to_direct(symbol_E);
  for (auto& v : Ep.values()) v -= rest_energy;
  double sup = 0.0;
  for (const auto& v : Ep.values()) sup = std::max(sup, std::abs(v));
  const double dt = t / static_cast<double>(steps);
  const double lam = 2.0 * sup / s.hbar;
  res.stability = std::abs(dt) * lam;
  if (res.stability > kRk4ImaginaryBound) {
    std::ostringstream os;
    os << "evolve_moyal_rotator: step bound exceeded, dt*2*sup|E'|/hbar = " << res.stability << " > "
       << kRk4ImaginaryBound << "; need steps >= " << std::ceil(std::abs(t) * lam / kRk4ImaginaryBound);
    throw NumericalError(os.str());
  }
  res.error_estimate = std::abs(t) * std::pow(lam, 5) * std::pow(std::abs(dt), 4) / 120.0;
  if (t == 0.0) {
    res.W = W;
    return res;
  }

  const std::size_t n = g.n_p;
  const MixedColumns E = MixedColumns::from_field(Ep);
  // rhs = coef * (E*V + sign V*E)
  auto rhs = [&](const MixedColumns& V, cplx coef, double sign, MixedColumns& out) {
    std::fill(out.data.begin(), out.data.end(), cplx{0.0, 0.0});
    star_accumulate(E, V, coef, out);
    star_accumulate(V, E, coef * sign, out);
  };
  auto integrate_one = [&](const PhaseField& f, cplx coef, double sign) -> MixedColumns {
    MixedColumns V = MixedColumns::from_field(f);
    if (V.is_zero()) return V;
    MixedColumns k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t step = 0; step < steps; ++step) {
      rhs(V, coef, sign, k1);
      for (std::size_t k = 0; k < V.data.size(); ++k) tmp.data[k] = V.data[k] + 0.5 * dt * k1.data[k];
      rhs(tmp, coef, sign, k2);
      for (std::size_t k = 0; k < V.data.size(); ++k) tmp.data[k] = V.data[k] + 0.5 * dt * k2.data[k];
      rhs(tmp, coef, sign, k3);
      for (std::size_t k = 0; k < V.data.size(); ++k) tmp.data[k] = V.data[k] + dt * k3.data[k];
      rhs(tmp, coef, sign, k4);
      for (std::size_t k = 0; k < V.data.size(); ++k)
        V.data[k] += dt / 6.0 * (k1.data[k] + 2.0 * k2.data[k] + 2.0 * k3.data[k] + k4.data[k]);
    }
    return V;
  };

  const cplx iu{0.0, 1.0};
  res.W = WignerComponents(g);
  res.W.even_plus = integrate_one(W.even_plus, -iu / s.hbar, -1.0).to_field(g);
  res.W.even_minus = integrate_one(W.even_minus, iu / s.hbar, -1.0).to_field(g);
  const double rot = 2.0 * rest_energy * t / s.hbar;
  res.W.odd_plus = integrate_one(W.odd_plus, iu / s.hbar, 1.0).to_field(g);
  res.W.odd_plus *= std::polar(1.0, rot);
  res.W.odd_minus = integrate_one(W.odd_minus, -iu / s.hbar, 1.0).to_field(g);
  res.W.odd_minus *= std::polar(1.0, -rot);
  return res;
}

inline MoyalEvolution evolve_moyal_rotator(const WignerComponents& W, const PhaseField& symbol_E, double t,
                                           std::size_t steps, const PhysicalScales& s) {
  return evolve_moyal_rotator(W, symbol_E, t, steps, s, s.rest_energy());
}

/// <n|q|m> and <n|p|m> in the oscillator basis, N x N.
inline Eigen::MatrixXcd position_matrix(std::size_t N, const PhysicalScales& s) {
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
  const double f = s.oscillator_length() / std::numbers::sqrt2;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double v = f * std::sqrt(static_cast<double>(k + 1));
    X(k, k + 1) = v;
    X(k + 1, k) = v;
  }
  return X;
}

inline Eigen::MatrixXcd momentum_matrix(std::size_t N, const PhysicalScales& s) {
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
  const double f = s.hbar / (std::numbers::sqrt2 * s.oscillator_length());
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double v = f * std::sqrt(static_cast<double>(k + 1));
    P(k + 1, k) = cplx{0.0, v};
    P(k, k + 1) = cplx{0.0, -v};
  }
  return P;
}

/// Phase-space moment of the even part: sum_a sum_{mn} eps_mn C_{m,a} C*_{n,a} <n|A|m>.
inline cplx even_expectation(const EnergyRepState& st, const EpsilonChiMatrix& em, const Eigen::MatrixXcd& A) {
  cplx acc{0.0, 0.0};
  const auto N = static_cast<Eigen::Index>(st.size());
  for (int alpha : {+1, -1}) {
    const auto& C = st.component(alpha);
    for (Eigen::Index m = 0; m < N; ++m)
      for (Eigen::Index n = 0; n < N; ++n) acc += em.eps(m, n) * C(m) * std::conj(C(n)) * A(n, m);
  }
  return acc;
}

/// Orbit-radius observables of a rotator state. R^2 = q^2 + p^2/(m omega_c)^2 is diagonal,
/// <R^2> = a^2 sum (2n+1)(|C_n+|^2 + |C_n-|^2); the mean orbit radius uses <q> and <p> of the even part.
struct OrbitObservables {
  double mean_R2 = 0.0;
  double mean_q = 0.0;
  double mean_p = 0.0;
  double orbit_radius2 = 0.0;  ///< <q>^2 + <p>^2 / (m omega_c)^2
  double charge_norm = 0.0;
};

inline double radius_observable(const EnergyRepState& st, const PhysicalScales& s) {
  const double a2 = s.oscillator_length2();
  double acc = 0.0;
  for (std::size_t n = 0; n < st.size(); ++n) {
    const auto k = static_cast<Eigen::Index>(n);
    acc += (2.0 * n + 1.0) * (std::norm(st.C_plus(k)) + std::norm(st.C_minus(k)));
  }
  return a2 * acc;
}

/// Phase-space route: int int (q^2 + p^2/(m omega_c)^2)(W_+^+ + W_-^-) dp dq.
inline double radius_observable(const WignerComponents& W, const PhysicalScales& s) {
  const double mw = s.mass * s.omega_c;
  const auto q2 = moments(W, 0, 2);
  const auto p2 = moments(W, 2, 0);
  return (q2.even() + p2.even() / (mw * mw)).real();
}

inline OrbitObservables orbit_observables(const EnergyRepState& st, const EpsilonChiMatrix& em,
                                          const PhysicalScales& s) {
  OrbitObservables o;
  o.mean_R2 = radius_observable(st, s);
  o.mean_q = even_expectation(st, em, position_matrix(st.size(), s)).real();
  o.mean_p = even_expectation(st, em, momentum_matrix(st.size(), s)).real();
  const double mw = s.mass * s.omega_c;
  o.orbit_radius2 = o.mean_q * o.mean_q + o.mean_p * o.mean_p / (mw * mw);
  o.charge_norm = st.charge_norm();
  return o;
}

}  // namespace fvw
