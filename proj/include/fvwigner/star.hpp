#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/fock.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/scales.hpp"

namespace fvw {

/// Mixed-representation field stored column-major, data[c * n + i] = F~_c(p_i), on an n x n Moyal grid.
struct MixedColumns {
  std::size_t n = 0;
  std::vector<cplx> data;

  MixedColumns() = default;
  explicit MixedColumns(std::size_t size) : n(size), data(size * size, cplx{0.0, 0.0}) {}

  static MixedColumns from_field(const PhaseField& f) {
    const PhaseField m = to_mixed(f);
    const std::size_t n = m.grid().n_p;
    MixedColumns out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n; ++c) out.data[c * n + i] = m(i, c);
    return out;
  }

  PhaseField to_field(const PhaseGrid& g) const {
    PhaseField out(g, Representation::mixed);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n; ++c) out(i, c) = data[c * n + i];
    return to_direct(out);
  }

  bool is_zero() const {
    for (const auto& v : data)
      if (v != cplx{0.0, 0.0}) return false;
    return true;
  }
};

namespace detail {

/// Columns carrying more than `rel` of the field's largest magnitude; the rest are skipped.
inline std::vector<std::size_t> active_columns(const MixedColumns& F, double rel) {
  const std::size_t n = F.n;
  std::vector<double> colmax(n, 0.0);
  double top = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) colmax[c] = std::max(colmax[c], std::abs(F.data[c * n + i]));
    top = std::max(top, colmax[c]);
  }
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < n; ++c)
    if (colmax[c] > rel * top) out.push_back(c);
  return out;
}

/// o[i] += s * a[(i + sa) mod n] * b[(i + sb) mod n] on interleaved (re, im) arrays.
inline void shifted_mac(const double* __restrict a, std::size_t sa, const double* __restrict b, std::size_t sb,
                        double sr, double si, double* __restrict o, std::size_t n) {
  std::size_t cuts[4] = {0, n - sa, n - sb, n};
  if (cuts[1] > cuts[2]) std::swap(cuts[1], cuts[2]);
  for (int seg = 0; seg < 3; ++seg) {
    const std::size_t lo = cuts[seg], hi = cuts[seg + 1];
    if (lo >= hi) continue;
    const std::size_t ia0 = (lo + sa) % n, ib0 = (lo + sb) % n;
    const double* pa = a + 2 * ia0;
    const double* pb = b + 2 * ib0;
    double* po = o + 2 * lo;
    const std::size_t len = hi - lo;
    for (std::size_t k = 0; k < len; ++k) {
      const double ar = pa[2 * k], ai = pa[2 * k + 1];
      const double br = pb[2 * k], bi = pb[2 * k + 1];
      const double pr = ar * br - ai * bi;
      const double pi = ar * bi + ai * br;
      po[2 * k] += sr * pr - si * pi;
      po[2 * k + 1] += sr * pi + si * pr;
    }
  }
}

}  // namespace detail

/// Fourier columns below this fraction of the largest one are treated as zero by the star kernel.
inline constexpr double kStarColumnCutoff = 1e-16;

/// out += scale * (A * B) in the mixed representation.
/// a(p) e^{i k1 q} * b(p) e^{i k2 q} = a(p + hbar k2/2) b(p - hbar k1/2) e^{i(k1+k2)q}; on a Moyal grid
/// both shifts are whole cells, so the product is an exact finite sum.
inline void star_accumulate(const MixedColumns& A, const MixedColumns& B, cplx scale, MixedColumns& out) {
  const std::size_t n = A.n;
  const auto ca = detail::active_columns(A, kStarColumnCutoff);
  const auto cb = detail::active_columns(B, kStarColumnCutoff);
  const auto* ad = reinterpret_cast<const double*>(A.data.data());
  const auto* bd = reinterpret_cast<const double*>(B.data.data());
  auto* od = reinterpret_cast<double*>(out.data.data());
  for (std::size_t c : ca) {
    const std::size_t shift_b = wrap_index(-signed_index(c, n), n);
    for (std::size_t m : cb) {
      const std::size_t shift_a = wrap_index(signed_index(m, n), n);
      detail::shifted_mac(ad + 2 * c * n, shift_a, bd + 2 * m * n, shift_b, scale.real(), scale.imag(),
                          od + 2 * ((c + m) % n) * n, n);
    }
  }
}

/// Pseudo-spectral Moyal product A * B with the convention q * p = qp + i hbar / 2.
inline PhaseField star_product(const PhaseField& A, const PhaseField& B, const PhysicalScales& s,
                               Diagnostics* diag = nullptr) {
  if (!(A.grid() == B.grid())) throw DomainError("star_product: grid mismatch");
  const auto& g = A.grid();
  if (!is_moyal_compatible(g, s)) {
    throw DomainError("star_product: grid is not Moyal-compatible (need n_p = n_q and p_extent*q_extent = pi hbar n/4)");
  }
  const PhaseField Ad = to_direct(A);
  const PhaseField Bd = to_direct(B);
  check_boundary_decay(Ad, "star_product: left factor", diag);
  check_boundary_decay(Bd, "star_product: right factor", diag);
  MixedColumns out(g.n_p);
  star_accumulate(MixedColumns::from_field(Ad), MixedColumns::from_field(Bd), 1.0, out);
  return out.to_field(g);
}

/// Polynomial symbol sum c_{ij} q^i p^j with the exact (terminating) Moyal product.
/// Polynomials are not periodic, so grid identities for them go through this type.
class PolySymbol {
 public:
  using Key = std::pair<int, int>;

  PolySymbol() = default;
  static PolySymbol constant(cplx c) { return monomial(0, 0, c); }
  static PolySymbol q() { return monomial(1, 0, 1.0); }
  static PolySymbol p() { return monomial(0, 1, 1.0); }
  static PolySymbol monomial(int qi, int pj, cplx c = 1.0) {
    PolySymbol s;
    if (c != cplx{0.0, 0.0}) s.terms_[{qi, pj}] = c;
    return s;
  }

  const std::map<Key, cplx>& terms() const { return terms_; }
  cplx coefficient(int qi, int pj) const {
    auto it = terms_.find({qi, pj});
    return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
  }
  int degree() const {
    int d = 0;
    for (const auto& [k, v] : terms_) d = std::max(d, k.first + k.second);
    return d;
  }

  PolySymbol& operator+=(const PolySymbol& o) {
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
  }
  PolySymbol& operator-=(const PolySymbol& o) {
    for (const auto& [k, v] : o.terms_) add(k, -v);
    return *this;
  }
  friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
  friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
  friend PolySymbol operator*(cplx s, const PolySymbol& a) {
    PolySymbol out;
    for (const auto& [k, v] : a.terms_) out.add(k, s * v);
    return out;
  }
  /// Commutative pointwise product.
  friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
    PolySymbol out;
    for (const auto& [ka, va] : a.terms_)
      for (const auto& [kb, vb] : b.terms_) out.add({ka.first + kb.first, ka.second + kb.second}, va * vb);
    return out;
  }

  /// d^a/dq^a d^b/dp^b
  PolySymbol derivative(int a, int b) const {
    PolySymbol out;
    for (const auto& [k, v] : terms_) {
      if (k.first < a || k.second < b) continue;
      double f = 1.0;
      for (int t = 0; t < a; ++t) f *= k.first - t;
      for (int t = 0; t < b; ++t) f *= k.second - t;
      out.add({k.first - a, k.second - b}, v * f);
    }
    return out;
  }

  cplx operator()(double p, double q) const {
    cplx acc{0.0, 0.0};
    for (const auto& [k, v] : terms_) acc += v * std::pow(q, k.first) * std::pow(p, k.second);
    return acc;
  }

  PhaseField sample(const PhaseGrid& g) const {
    return PhaseField::sample(g, [this](double p, double q) { return (*this)(p, q); });
  }

  bool operator==(const PolySymbol& o) const { return terms_ == o.terms_; }

  double max_coefficient_diff(const PolySymbol& o) const {
    double m = 0.0;
    for (const auto& [k, v] : (*this - o).terms_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  void add(const Key& k, cplx v) {
    auto& slot = terms_[k];
    slot += v;
    if (slot == cplx{0.0, 0.0}) terms_.erase(k);
  }

  std::map<Key, cplx> terms_;
};

/// Exact Moyal product of polynomial symbols: sum_n (i hbar/2)^n / n! sum_k C(n,k) (-1)^k
/// (d_q^{n-k} d_p^k A)(d_p^{n-k} d_q^k B).
inline PolySymbol star_product(const PolySymbol& A, const PolySymbol& B, const PhysicalScales& s) {
  PolySymbol out;
  const int top = std::min(A.degree(), B.degree());
  cplx pref{1.0, 0.0};
  for (int n = 0; n <= top; ++n) {
    if (n > 0) pref *= cplx{0.0, s.hbar / 2.0} / static_cast<double>(n);
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) binom = binom * (n - k + 1) / k;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out += (pref * (sign * binom)) * (A.derivative(n - k, k) * B.derivative(k, n - k));
    }
  }
  return out;
}

struct StarSqrtOptions {
  /// Fock levels used for the expansion; 0 picks the largest count the grid resolves.
  std::size_t levels = 0;
  SymbolWindow window{};
};

struct StarSqrtResult {
  PhaseField root;
  std::vector<double> eigenvalues;       ///< Fock eigenvalues of A (projected)
  std::vector<double> root_eigenvalues;  ///< Fock eigenvalues of the returned root (re-projected)
  std::size_t exact_levels = 0;          ///< levels carried without window damping
  double off_diagonal = 0.0;             ///< largest off-diagonal |<m|A|n>| relative to the diagonal
  double residual = 0.0;                 ///< max |(X X - A)_{mn}| / max |A_{mn}| on the exact block
};

/// Largest N whose Fock functions the grid resolves with the 1.5 a sqrt(2N) extent rule.
inline std::size_t resolvable_levels(const PhaseGrid& g, const PhysicalScales& s) {
  const double a = s.oscillator_length();
  const double reach = std::min(g.q_extent / a, g.p_extent * a / s.hbar) / 1.5;
  return static_cast<std::size_t>(std::floor(reach * reach / 2.0));
}

/// Star square root of a symbol diagonal in the oscillator Fock basis.
/// Projects A on the eigen-symbols T_nn, takes scalar roots of the eigenvalues and resums.
inline StarSqrtResult star_sqrt_detailed(const PhaseField& A, const PhysicalScales& s, double tol,
                                         const StarSqrtOptions& opt = {}) {
  const PhaseField Ad = to_direct(A);
  const auto& g = Ad.grid();
  const std::size_t N = opt.levels != 0 ? opt.levels : resolvable_levels(g, s);
  if (N < 2) throw NumericalError("star_sqrt: grid resolves fewer than 2 Fock levels");
  const Eigen::MatrixXcd M = fock_project(Ad, N, s);

  StarSqrtResult res;
  res.exact_levels = opt.window.exact_levels(N);
  double diag_max = 0.0;
  for (std::size_t n = 0; n < N; ++n) diag_max = std::max(diag_max, std::abs(M(n, n)));
  double off = 0.0;
  for (std::size_t m = 0; m < res.exact_levels; ++m)
    for (std::size_t n = 0; n < res.exact_levels; ++n)
      if (m != n) off = std::max(off, std::abs(M(m, n)));
  res.off_diagonal = diag_max > 0.0 ? off / diag_max : off;
  if (res.off_diagonal > tol) {
    std::ostringstream os;
    os << "star_sqrt: symbol is not diagonal in the Fock basis (off-diagonal ratio " << res.off_diagonal << ")";
    throw DomainError(os.str());
  }

  res.eigenvalues.resize(N);
  std::vector<double> roots(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double v = M(n, n).real();
    res.eigenvalues[n] = v;
    if (v < -tol * diag_max) {
      std::ostringstream os;
      os << "star_sqrt: negative induced eigenvalue " << v << " at level " << n;
      throw DomainError(os.str());
    }
    roots[n] = std::sqrt(std::max(v, 0.0));
  }
  res.root = fock_diagonal_to_symbol(roots, g, s, opt.window, nullptr);

  const Eigen::MatrixXcd X = fock_project(res.root, N, s);
  res.root_eigenvalues.resize(N);
  for (std::size_t n = 0; n < N; ++n) res.root_eigenvalues[n] = X(n, n).real();
  const auto L = static_cast<Eigen::Index>(res.exact_levels);
  const Eigen::MatrixXcd XX = (X * X).topLeftCorner(L, L);
  const Eigen::MatrixXcd AA = M.topLeftCorner(L, L);
  const double scale = AA.cwiseAbs().maxCoeff();
  res.residual = (XX - AA).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
  if (res.residual > tol) {
    std::ostringstream os;
    os << "star_sqrt: expansion did not converge, residual " << res.residual << " over " << res.exact_levels
       << " exact levels exceeds " << tol;
    throw NumericalError(os.str());
  }
  return res;
}

inline PhaseField star_sqrt(const PhaseField& A, const PhysicalScales& s, double tol,
                            const StarSqrtOptions& opt = {}) {
  return star_sqrt_detailed(A, s, tol, opt).root;
}

}  // namespace fvw
