#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/scales.hpp"
#include "fvwigner/wigner.hpp"

namespace fvw {

/// E(p) = sqrt(m^2 c^4 + p^2 c^2)
inline double energy_free(double p, const PhysicalScales& s) {
  const double mc2 = s.rest_energy();
  const double pc = p * s.c;
  return std::sqrt(mc2 * mc2 + pc * pc);
}

struct EpsChi {
  double eps;
  double chi;
};

/// eps = (E1 + E2) / (2 sqrt(E1 E2)), chi = (E1 - E2) / (2 sqrt(E1 E2)).
inline EpsChi epsilon_chi_energies(double E1, double E2) {
  const double d = 2.0 * std::sqrt(E1 * E2);
  return {(E1 + E2) / d, (E1 - E2) / d};
}

inline EpsChi epsilon_chi(double p1, double p2, const PhysicalScales& s) {
  return epsilon_chi_energies(energy_free(p1, s), energy_free(p2, s));
}

struct RelativisticDispersion {
  PhysicalScales scales;
  double operator()(double p) const { return energy_free(p, scales); }
};

/// mc^2 + p^2/2m, the Galilean limit of E(p).
struct NonRelativisticDispersion {
  PhysicalScales scales;
  double operator()(double p) const { return scales.rest_energy() + p * p / (2.0 * scales.mass); }
};

/// Two-component momentum wavefunction psi_a(p) sampled on the p axis of a Wigner-compatible grid.
/// Norm convention: <psi|psi> = sum_i |psi(p_i)|^2 dp.
struct FVState {
  PhaseGrid grid;
  std::vector<cplx> psi_plus;
  std::vector<cplx> psi_minus;

  FVState() = default;
  explicit FVState(const PhaseGrid& g)
      : grid(g), psi_plus(g.n_p, cplx{0.0, 0.0}), psi_minus(g.n_p, cplx{0.0, 0.0}) {}

  std::vector<cplx>& component(int alpha) { return alpha > 0 ? psi_plus : psi_minus; }
  const std::vector<cplx>& component(int alpha) const { return alpha > 0 ? psi_plus : psi_minus; }

  double norm2(int alpha) const {
    double s = 0.0;
    for (const auto& v : component(alpha)) s += std::norm(v);
    return s * grid.dp();
  }
  double charge_norm() const { return norm2(+1) - norm2(-1); }
};

/// Gaussian packet (2 pi sigma^2)^{-1/4} exp(-(p-p0)^2 / 4 sigma^2 - i p q0 / hbar), unit norm.
inline std::vector<cplx> gaussian_packet(const PhaseGrid& g, double p0, double sigma_p, double q0,
                                         const PhysicalScales& s, cplx amplitude = 1.0) {
  if (!(sigma_p > 0.0)) throw DomainError("gaussian_packet: sigma_p must be > 0");
  std::vector<cplx> out(g.n_p);
  const double norm = std::pow(2.0 * std::numbers::pi * sigma_p * sigma_p, -0.25);
  for (std::size_t i = 0; i < g.n_p; ++i) {
    const double p = g.p(i);
    const double x = (p - p0) / sigma_p;
    out[i] = amplitude * norm * std::exp(-0.25 * x * x) * std::polar(1.0, -p * q0 / s.hbar);
  }
  return out;
}

namespace detail {

inline void validate_state(const FVState& st, const PhysicalScales& s, Diagnostics* diag) {
  if (st.psi_plus.size() != st.grid.n_p || st.psi_minus.size() != st.grid.n_p)
    throw DomainError("FVState: component length differs from n_p");
  if (!is_wigner_compatible(st.grid, s))
    throw DomainError("FVState: grid is not Wigner-compatible (need q_extent = pi hbar n_p / (4 p_extent))");
  double peak = 0.0, edge = 0.0;
  for (const auto* c : {&st.psi_plus, &st.psi_minus}) {
    for (const auto& v : *c) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("FVState: non-finite value");
      peak = std::max(peak, std::abs(v));
    }
    edge = std::max({edge, std::abs(c->front()), std::abs(c->back())});
  }
  if (peak > 0.0 && edge / peak > kBoundaryDecay) {
    std::ostringstream os;
    os << "FVState: boundary magnitude " << edge / peak << " of peak exceeds " << kBoundaryDecay;
    warn(diag, os.str());
  }
}

}  // namespace detail

/// Builds the mixed (p, k) representation of all four components directly from the kernel
/// R(p - hbar k/2, p + hbar k/2) psi_a^*(p - hbar k/2) psi_b(p + hbar k/2); values off the grid are zero.
inline WignerComponents wigner_components_mixed(const FVState& st, const PhysicalScales& s,
                                                Diagnostics* diag = nullptr) {
  detail::validate_state(st, s, diag);
  const auto& g = st.grid;
  const std::size_t np = g.n_p, nq = g.n_q;
  const double pref = g.dp() / (std::numbers::pi * s.hbar);
  std::vector<double> E(np);
  for (std::size_t i = 0; i < np; ++i) E[i] = energy_free(g.p(i), s);

  WignerComponents w(g, Representation::mixed);
  for (std::size_t c = 0; c < nq; ++c) {
    if (2 * c == nq) continue;
    const long sh = signed_index(c, nq);
    for (std::size_t i = 0; i < np; ++i) {
      const long lo = static_cast<long>(i) - sh;
      const long hi = static_cast<long>(i) + sh;
      if (lo < 0 || hi < 0 || lo >= static_cast<long>(np) || hi >= static_cast<long>(np)) continue;
      const auto il = static_cast<std::size_t>(lo), ih = static_cast<std::size_t>(hi);
      const auto ec = epsilon_chi_energies(E[il], E[ih]);
      const cplx pl = st.psi_plus[il], ml = st.psi_minus[il];
      const cplx ph = st.psi_plus[ih], mh = st.psi_minus[ih];
      w.even_plus(i, c) = pref * ec.eps * std::conj(pl) * ph;
      w.even_minus(i, c) = pref * ec.eps * std::conj(ml) * mh;
      w.odd_plus(i, c) = pref * ec.chi * std::conj(pl) * mh;
      w.odd_minus(i, c) = pref * ec.chi * std::conj(ml) * ph;
    }
  }
  return w;
}

inline WignerComponents wigner_components(const FVState& st, const PhysicalScales& s,
                                          Diagnostics* diag = nullptr) {
  WignerComponents w = to_direct(wigner_components_mixed(st, s, diag));
  w.for_each([&](const PhaseField& c) { check_boundary_decay(c, "wigner_components", diag); });
  return w;
}

/// Exact free propagation in the mixed representation. Even components pick up
/// exp(i a (E(p - hbar k/2) - E(p + hbar k/2)) t / hbar), odd components exp(i a (E_- + E_+) t / hbar).
template <class Dispersion>
WignerComponents evolve_free(const WignerComponents& W, double t, const PhysicalScales& s, Dispersion&& energy) {
  const auto& g = W.grid();
  if (!is_wigner_compatible(g, s)) throw DomainError("evolve_free: grid is not Wigner-compatible");
  if (t == 0.0) return W;
  WignerComponents m = to_mixed(W);
  const std::size_t np = g.n_p, nq = g.n_q;
  const double dp = g.dp();
  for (std::size_t c = 0; c < nq; ++c) {
    const double shift = static_cast<double>(signed_index(c, nq)) * dp;
    for (std::size_t i = 0; i < np; ++i) {
      const double em = energy(g.p(i) - shift);
      const double ep = energy(g.p(i) + shift);
      const double even = (em - ep) * t / s.hbar;
      const double odd = (em + ep) * t / s.hbar;
      m.even_plus(i, c) *= std::polar(1.0, even);
      m.even_minus(i, c) *= std::polar(1.0, -even);
      m.odd_plus(i, c) *= std::polar(1.0, odd);
      m.odd_minus(i, c) *= std::polar(1.0, -odd);
    }
  }
  const bool was_direct = W.even_plus.representation() == Representation::direct;
  return was_direct ? to_direct(m) : m;
}

inline WignerComponents evolve_free(const WignerComponents& W, double t, const PhysicalScales& s) {
  return evolve_free(W, t, s, RelativisticDispersion{s});
}

struct MomentResult {
  cplx even_plus{0.0, 0.0};
  cplx even_minus{0.0, 0.0};
  cplx odd_plus{0.0, 0.0};
  cplx odd_minus{0.0, 0.0};
  cplx even() const { return even_plus + even_minus; }
  cplx total() const { return even_plus + even_minus + odd_plus + odd_minus; }
};

inline constexpr int kMaxMomentOrder = 4;

/// int int p^{k_p} q^{k_q} W dp dq for each component. Rejects orders above 4 and moments whose
/// weighted integrand has not decayed at the grid edge.
inline MomentResult moments(const WignerComponents& W, int k_p, int k_q, double decay_limit = 1e-8) {
  if (k_p < 0 || k_q < 0) throw DomainError("moments: orders must be >= 0");
  if (k_p > kMaxMomentOrder || k_q > kMaxMomentOrder) throw DomainError("moments: orders above 4 are not resolved");
  const WignerComponents d = to_direct(W);
  const auto& g = d.grid();
  MomentResult out;
  auto one = [&](const PhaseField& f, cplx& acc) {
    PhaseField weighted = PhaseField::sample(g, [&](double p, double q) {
      return cplx{std::pow(p, k_p) * std::pow(q, k_q), 0.0};
    });
    for (std::size_t k = 0; k < weighted.values().size(); ++k) weighted.values()[k] *= f.values()[k];
    const double r = boundary_ratio(weighted);
    if (r > decay_limit) {
      std::ostringstream os;
      os << "moments: order (" << k_p << "," << k_q << ") integrand reaches " << r << " of its peak at the grid edge";
      throw NumericalError(os.str());
    }
    acc = integrate(weighted);
  };
  one(d.even_plus, out.even_plus);
  one(d.even_minus, out.even_minus);
  one(d.odd_plus, out.odd_plus);
  one(d.odd_minus, out.odd_minus);
  return out;
}

}  // namespace fvw
