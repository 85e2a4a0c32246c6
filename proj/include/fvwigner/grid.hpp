#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/fft.hpp"
#include "fvwigner/scales.hpp"
#include "fvwigner/special.hpp"

namespace fvw {

using cplx = std::complex<double>;

/// Uniform periodic (p, q) grid. Point i sits at -p_extent + i*dp, so index n/2 is the origin.
struct PhaseGrid {
  int d = 1;
  std::size_t n_p = 0;
  std::size_t n_q = 0;
  double p_extent = 0.0;
  double q_extent = 0.0;

  double dp() const { return 2.0 * p_extent / static_cast<double>(n_p); }
  double dq() const { return 2.0 * q_extent / static_cast<double>(n_q); }
  double p(std::size_t i) const { return -p_extent + static_cast<double>(i) * dp(); }
  double q(std::size_t j) const { return -q_extent + static_cast<double>(j) * dq(); }

  /// Wavenumber spacing dual to q (period 2 q_extent) and to p.
  double dk() const { return std::numbers::pi / q_extent; }
  double dtheta() const { return std::numbers::pi / p_extent; }
  double k(std::size_t c) const { return static_cast<double>(signed_index(c, n_q)) * dk(); }

  std::size_t size() const { return n_p * n_q; }
  double cell() const { return dp() * dq(); }

  bool operator==(const PhaseGrid& o) const {
    return n_p == o.n_p && n_q == o.n_q && p_extent == o.p_extent && q_extent == o.q_extent;
  }
};

inline PhaseGrid make_grid(std::size_t n_p, std::size_t n_q, double p_extent, double q_extent) {
  std::vector<std::string> bad;
  if (n_p < 8 || n_p % 2 != 0) bad.emplace_back("n_p must be even and >= 8");
  if (n_q < 8 || n_q % 2 != 0) bad.emplace_back("n_q must be even and >= 8");
  if (!(p_extent > 0.0) || !std::isfinite(p_extent)) bad.emplace_back("p_extent must be > 0");
  if (!(q_extent > 0.0) || !std::isfinite(q_extent)) bad.emplace_back("q_extent must be > 0");
  if (!bad.empty()) {
    std::string msg = "make_grid:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw DomainError(msg);
  }
  return PhaseGrid{1, n_p, n_q, p_extent, q_extent};
}

/// Grid on which a half step of the q-dual momentum (hbar dk / 2) equals dp.
/// Momentum-space Wigner kernels then only touch grid points.
inline PhaseGrid make_wigner_grid(std::size_t n_p, std::size_t n_q, double p_extent,
                                  const PhysicalScales& s) {
  const double q_extent = std::numbers::pi * s.hbar * static_cast<double>(n_p) / (4.0 * p_extent);
  return make_grid(n_p, n_q, p_extent, q_extent);
}

/// Square grid with p_extent * q_extent = pi hbar n / 4, so both Moyal half-shifts are one cell.
/// `length` sets the aspect: q_extent = length * X, p_extent = (hbar / length) * X.
inline PhaseGrid make_moyal_grid(std::size_t n, double length, const PhysicalScales& s) {
  const double x = std::sqrt(std::numbers::pi * static_cast<double>(n) / 4.0);
  return make_grid(n, n, s.hbar / length * x, length * x);
}

inline bool is_wigner_compatible(const PhaseGrid& g, const PhysicalScales& s) {
  const double want = std::numbers::pi * s.hbar * static_cast<double>(g.n_p) / (4.0 * g.p_extent);
  return std::abs(g.q_extent / want - 1.0) <= 1e-12;
}

inline bool is_moyal_compatible(const PhaseGrid& g, const PhysicalScales& s) {
  if (g.n_p != g.n_q) return false;
  const double want = std::numbers::pi * s.hbar * static_cast<double>(g.n_p) / 4.0;
  return std::abs(g.p_extent * g.q_extent / want - 1.0) <= 1e-12;
}

enum class Representation { direct, mixed };

/// Complex samples on a PhaseGrid, row-major with p as the slow index.
/// In the mixed representation the q axis holds Fourier coefficients
/// F(p, q) = sum_c Ft_c(p) exp(i k_c q) in FFT slot order.
class PhaseField {
 public:
  PhaseField() = default;
  explicit PhaseField(const PhaseGrid& g, Representation rep = Representation::direct)
      : grid_(g), rep_(rep), values_(g.size(), cplx{0.0, 0.0}) {}

  template <class F>
  static PhaseField sample(const PhaseGrid& g, F&& f) {
    PhaseField out(g);
    for (std::size_t i = 0; i < g.n_p; ++i)
      for (std::size_t j = 0; j < g.n_q; ++j) out(i, j) = f(g.p(i), g.q(j));
    return out;
  }

  const PhaseGrid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  void set_representation(Representation r) { rep_ = r; }

  cplx& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.n_q + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.n_q + j]; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx* row(std::size_t i) { return values_.data() + i * grid_.n_q; }
  const cplx* row(std::size_t i) const { return values_.data() + i * grid_.n_q; }

  PhaseField& operator+=(const PhaseField& o) {
    require_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  PhaseField& operator-=(const PhaseField& o) {
    require_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  PhaseField& operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  /// this += s * o
  PhaseField& axpy(cplx s, const PhaseField& o) {
    require_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
    return *this;
  }

  friend PhaseField operator+(PhaseField a, const PhaseField& b) { return a += b; }
  friend PhaseField operator-(PhaseField a, const PhaseField& b) { return a -= b; }
  friend PhaseField operator*(cplx s, PhaseField a) { return a *= s; }

  PhaseField conj() const {
    PhaseField out = *this;
    for (auto& v : out.values_) v = std::conj(v);
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

 private:
  void require_same(const PhaseField& o) const {
    if (!(grid_ == o.grid_)) throw DomainError("PhaseField: grid mismatch");
    if (rep_ != o.rep_) throw DomainError("PhaseField: representation mismatch");
  }

  PhaseGrid grid_{};
  Representation rep_ = Representation::direct;
  std::vector<cplx> values_;
};

/// Direct (p, q) -> mixed (p, k). Coefficients are normalized Fourier-series coefficients.
inline PhaseField to_mixed(const PhaseField& f) {
  if (f.representation() == Representation::mixed) return f;
  const auto& g = f.grid();
  PhaseField out = f;
  fft::transform(out.values().data(), g.n_q, g.n_p, 1, g.n_q, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(g.n_q);
  for (std::size_t i = 0; i < g.n_p; ++i)
    for (std::size_t c = 0; c < g.n_q; ++c) out(i, c) *= (c % 2 == 0 ? inv : -inv);
  out.set_representation(Representation::mixed);
  return out;
}

inline PhaseField to_direct(const PhaseField& f) {
  if (f.representation() == Representation::direct) return f;
  const auto& g = f.grid();
  PhaseField out = f;
  for (std::size_t i = 0; i < g.n_p; ++i)
    for (std::size_t c = 1; c < g.n_q; c += 2) out(i, c) = -out(i, c);
  fft::transform(out.values().data(), g.n_q, g.n_p, 1, g.n_q, fft::Direction::backward);
  out.set_representation(Representation::direct);
  return out;
}

inline cplx integrate(const PhaseField& f) {
  if (f.representation() != Representation::direct) throw DomainError("integrate: needs direct representation");
  cplx s{0.0, 0.0};
  for (const auto& v : f.values()) s += v;
  return s * f.grid().cell();
}

/// Integral over q at each p.
inline std::vector<cplx> q_marginal(const PhaseField& f) {
  const auto& g = f.grid();
  std::vector<cplx> out(g.n_p, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < g.n_p; ++i) {
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < g.n_q; ++j) s += f(i, j);
    out[i] = s * g.dq();
  }
  return out;
}

/// Largest magnitude on the outermost rows/columns relative to the peak.
inline double boundary_ratio(const PhaseField& f) {
  const auto& g = f.grid();
  const double peak = f.max_abs();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < g.n_p; ++i) {
    edge = std::max({edge, std::abs(f(i, 0)), std::abs(f(i, g.n_q - 1))});
  }
  for (std::size_t j = 0; j < g.n_q; ++j) {
    edge = std::max({edge, std::abs(f(0, j)), std::abs(f(g.n_p - 1, j))});
  }
  return edge / peak;
}

inline constexpr double kBoundaryDecay = 1e-10;

/// Emits a warning with the measured tail when a field is not decayed at the grid edge.
inline bool check_boundary_decay(const PhaseField& f, const char* what, Diagnostics* diag,
                                 double limit = kBoundaryDecay) {
  const double r = boundary_ratio(f);
  if (r <= limit) return true;
  std::ostringstream os;
  os << what << ": boundary magnitude " << r << " of peak exceeds " << limit;
  warn(diag, os.str());
  return false;
}

inline double max_abs_diff(const PhaseField& a, const PhaseField& b) {
  if (!(a.grid() == b.grid())) throw DomainError("max_abs_diff: grid mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

}  // namespace fvw
