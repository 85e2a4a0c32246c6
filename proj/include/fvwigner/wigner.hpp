#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/grid.hpp"

namespace fvw {

/// The four charge components W_a^b (a = bra charge, b = ket charge).
struct WignerComponents {
  PhaseField even_plus;   ///< W_+^+
  PhaseField even_minus;  ///< W_-^-
  PhaseField odd_plus;    ///< W_+^-
  PhaseField odd_minus;   ///< W_-^+

  WignerComponents() = default;
  explicit WignerComponents(const PhaseGrid& g, Representation rep = Representation::direct)
      : even_plus(g, rep), even_minus(g, rep), odd_plus(g, rep), odd_minus(g, rep) {}

  const PhaseGrid& grid() const { return even_plus.grid(); }

  PhaseField& component(int alpha, int beta) {
    if (alpha == beta) return alpha > 0 ? even_plus : even_minus;
    return alpha > 0 ? odd_plus : odd_minus;
  }
  const PhaseField& component(int alpha, int beta) const {
    return const_cast<WignerComponents*>(this)->component(alpha, beta);
  }

  template <class F>
  void for_each(F&& f) {
    f(even_plus);
    f(even_minus);
    f(odd_plus);
    f(odd_minus);
  }
  template <class F>
  void for_each(F&& f) const {
    f(even_plus);
    f(even_minus);
    f(odd_plus);
    f(odd_minus);
  }

  double peak() const {
    double m = 0.0;
    for_each([&](const PhaseField& c) { m = std::max(m, c.max_abs()); });
    return m;
  }
};

inline WignerComponents to_direct(const WignerComponents& w) {
  WignerComponents out = w;
  out.for_each([](PhaseField& c) { c = to_direct(c); });
  return out;
}

inline WignerComponents to_mixed(const WignerComponents& w) {
  WignerComponents out = w;
  out.for_each([](PhaseField& c) { c = to_mixed(c); });
  return out;
}

/// Largest pointwise difference over all four components.
inline double max_abs_diff(const WignerComponents& a, const WignerComponents& b) {
  return std::max({max_abs_diff(a.even_plus, b.even_plus), max_abs_diff(a.even_minus, b.even_minus),
                   max_abs_diff(a.odd_plus, b.odd_plus), max_abs_diff(a.odd_minus, b.odd_minus)});
}

/// Measured reality, antisymmetry and normalization properties of a component set.
struct StructureReport {
  double peak = 0.0;
  double even_imag = 0.0;       ///< max |Im W_a^a| / peak
  double antisymmetry = 0.0;    ///< max |conj(W_+^-) + W_-^+| / peak
  double odd_marginal = 0.0;    ///< max_p |int W_a^-a dq| / peak of the even marginals
  cplx even_integral_plus{0.0, 0.0};
  cplx even_integral_minus{0.0, 0.0};
  double charge_norm = 0.0;     ///< int W_+^+ - int W_-^-

  double worst() const { return std::max({even_imag, antisymmetry, odd_marginal}); }
};

inline StructureReport structure_report(const WignerComponents& w) {
  const WignerComponents d = to_direct(w);
  StructureReport r;
  r.peak = d.peak();
  const double scale = r.peak > 0.0 ? r.peak : 1.0;
  for (const auto* c : {&d.even_plus, &d.even_minus})
    for (const auto& v : c->values()) r.even_imag = std::max(r.even_imag, std::abs(v.imag()) / scale);
  for (std::size_t k = 0; k < d.odd_plus.values().size(); ++k) {
    const double dev = std::abs(std::conj(d.odd_plus.values()[k]) + d.odd_minus.values()[k]);
    r.antisymmetry = std::max(r.antisymmetry, dev / scale);
  }
  double marg_scale = 0.0;
  for (const auto* c : {&d.even_plus, &d.even_minus})
    for (const auto& v : q_marginal(*c)) marg_scale = std::max(marg_scale, std::abs(v));
  if (marg_scale == 0.0) marg_scale = 1.0;
  for (const auto* c : {&d.odd_plus, &d.odd_minus})
    for (const auto& v : q_marginal(*c)) r.odd_marginal = std::max(r.odd_marginal, std::abs(v) / marg_scale);
  r.even_integral_plus = integrate(d.even_plus);
  r.even_integral_minus = integrate(d.even_minus);
  r.charge_norm = r.even_integral_plus.real() - r.even_integral_minus.real();
  return r;
}

}  // namespace fvw
