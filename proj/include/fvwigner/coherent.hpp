#pragma once

#include <Eigen/Dense>

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
#include "fvwigner/rotator.hpp"
#include "fvwigner/scales.hpp"

namespace fvw {

/// Index placement of the squared-epsilon factorial [eps^2]!_n.
enum class DeformationConvention {
  adjacent,  ///< prod_{k=1..n} eps_{k,k-1}^2
  shifted,   ///< prod_{k=1..n} eps_{k+1,k+2}^2
};

inline const char* to_string(DeformationConvention c) {
  return c == DeformationConvention::adjacent ? "adjacent" : "shifted";
}

inline DeformationConvention parse_convention(const std::string& s) {
  if (s == "adjacent") return DeformationConvention::adjacent;
  if (s == "shifted") return DeformationConvention::shifted;
  throw DomainError("unknown deformation convention '" + s + "' (expected adjacent or shifted)");
}

struct NonlinearCoherentSpec {
  double R_bar = 0.0;
  std::size_t N = 32;
  DeformationConvention convention = DeformationConvention::adjacent;
};

/// Extra epsilon-matrix rows the deformation factors need beyond the state truncation.
inline constexpr std::size_t kDeformationMargin = 2;

/// log [eps^2]!_n for n = 0..count-1.
inline std::vector<double> log_deformed_factorial(const EpsilonChiMatrix& em, std::size_t count,
                                                  DeformationConvention conv) {
  const std::size_t need = conv == DeformationConvention::adjacent ? count : count + 2;
  if (em.N < need) {
    std::ostringstream os;
    os << "deformed factorial: epsilon matrix of size " << em.N << " is too small, need " << need;
    throw DomainError(os.str());
  }
  std::vector<double> out(count, 0.0);
  for (std::size_t n = 1; n < count; ++n) {
    const auto k = static_cast<Eigen::Index>(n);
    const double e = conv == DeformationConvention::adjacent ? em.eps(k, k - 1) : em.eps(k + 1, k + 2);
    out[n] = out[n - 1] + 2.0 * std::log(e);
  }
  return out;
}

/// Epsilon matrix sized for a coherent spec at field strength b.
inline EpsilonChiMatrix coherent_eps_chi(const NonlinearCoherentSpec& spec, double b, const PhysicalScales& s) {
  return eps_chi_matrix(landau_spectrum(spec.N + kDeformationMargin, b, s));
}

/// Smallest truncation with Poisson tail below tol; the deformed weights decay at least as fast.
inline std::size_t suggested_truncation(double lambda2, double tol = kTailTolerance) {
  double logw = -lambda2;
  for (std::size_t n = 0; n < 100000; ++n) {
    if (n > lambda2 && logw < std::log(tol)) return n + 2;
    logw += std::log(lambda2) - std::log(static_cast<double>(n + 1));
  }
  return 100000;
}

/// Normalized C_n = C_0 lambda^n / sqrt(n! [eps^2]!_n), lambda = R_bar / (sqrt(2) a), single positive charge.
inline EnergyRepState nlcs_coefficients(const NonlinearCoherentSpec& spec, const EpsilonChiMatrix& em,
                                        const PhysicalScales& s, double* C0_out = nullptr) {
  if (!(spec.R_bar >= 0.0) || !std::isfinite(spec.R_bar)) throw DomainError("nlcs: R_bar must be >= 0");
  if (spec.N < 2) throw DomainError("nlcs: N must be >= 2");
  const std::size_t N = spec.N;
  EnergyRepState st(N);
  if (spec.R_bar == 0.0) {
    st.C_plus(0) = 1.0;
    if (C0_out != nullptr) *C0_out = 1.0;
    return st;
  }
  const double lambda = spec.R_bar / (std::numbers::sqrt2 * s.oscillator_length());
  const auto logF = log_deformed_factorial(em, N, spec.convention);
  std::vector<double> logw(N);
  double top = -INFINITY;
  for (std::size_t n = 0; n < N; ++n) {
    logw[n] = 2.0 * n * std::log(lambda) - log_factorial(n) - logF[n];
    top = std::max(top, logw[n]);
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) sum += std::exp(logw[n] - top);
  for (std::size_t n = 0; n < N; ++n) st.C_plus(static_cast<Eigen::Index>(n)) = std::sqrt(std::exp(logw[n] - top) / sum);
  if (C0_out != nullptr) *C0_out = std::sqrt(std::exp(-top) / sum);
  if (st.tail_fraction() > kTailTolerance) {
    std::ostringstream os;
    os << "nlcs: truncation N = " << N << " leaves tail mass " << st.tail_fraction() << "; use N >= "
       << suggested_truncation(lambda * lambda);
    throw NumericalError(os.str());
  }
  return st;
}

/// a^2 - R^2 [1 - |C_0|^2 sum_n lambda^{2n} / (n! [eps^2]!_{n+1})], summed over the levels the state carries.
inline double deltaR2_closed_form(const NonlinearCoherentSpec& spec, const EpsilonChiMatrix& em,
                                  const PhysicalScales& s) {
  const double a2 = s.oscillator_length2();
  if (spec.R_bar == 0.0) return a2;
  double C0 = 0.0;
  nlcs_coefficients(spec, em, s, &C0);
  const double lambda = spec.R_bar / (std::numbers::sqrt2 * s.oscillator_length());
  const auto logF = log_deformed_factorial(em, spec.N, spec.convention);
  double sum = 0.0, last = 0.0;
  for (std::size_t n = 0; n + 1 < spec.N; ++n) {
    last = std::exp(2.0 * n * std::log(lambda) - log_factorial(n) - logF[n + 1] + 2.0 * std::log(C0));
    sum += last;
  }
  if (last > kTailTolerance * std::max(sum, 1.0)) {
    std::ostringstream os;
    os << "deltaR2_closed_form: series tail " << last << " has not converged";
    throw NumericalError(os.str());
  }
  return a2 - spec.R_bar * spec.R_bar * (1.0 - sum);
}

struct DeltaR2 {
  double dispersion = 0.0;  ///< <R^2> - R_bar^2
  double variance = 0.0;    ///< <R^2> - <R>^2, R from the spectral root of R^2
  double mean_R2 = 0.0;
  double mean_R = 0.0;
};

/// Dense route: R^2 = q^2 + p^2/(m omega_c)^2 assembled from ladder matrices on 2N levels.
inline DeltaR2 deltaR2_direct(const EnergyRepState& st, double R_bar, const PhysicalScales& s) {
  const std::size_t N = st.size();
  if (st.tail_fraction() > kTailTolerance) {
    std::ostringstream os;
    os << "deltaR2_direct: tail mass " << st.tail_fraction() << " exceeds " << kTailTolerance;
    throw NumericalError(os.str());
  }
  const std::size_t Nd = 2 * N;
  const Eigen::MatrixXcd X = position_matrix(Nd, s);
  const Eigen::MatrixXcd P = momentum_matrix(Nd, s);
  const double mw = s.mass * s.omega_c;
  const Eigen::MatrixXcd R2 = X * X + P * P / (mw * mw);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R2);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd R = eig.eigenvectors() * root.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();

  DeltaR2 out;
  for (int alpha : {+1, -1}) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(Nd));
    v.head(static_cast<Eigen::Index>(N)) = st.component(alpha);
    out.mean_R2 += v.dot(R2 * v).real();
    out.mean_R += v.dot(R * v).real();
  }
  out.dispersion = out.mean_R2 - R_bar * R_bar;
  out.variance = out.mean_R2 - out.mean_R * out.mean_R;
  return out;
}

/// Scales for a run at field strength b: omega_c = b mc^2 / hbar for b > 0. At b = 0 the spectrum is
/// degenerate (c -> infinity) and the oscillator length comes from the omega_c already in `base`.
inline PhysicalScales scales_for_b(double b, const PhysicalScales& base) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("omega_c must be >= 0 (b must be >= 0)");
  PhysicalScales s = base;
  if (b > 0.0) s.omega_c = b * base.rest_energy() / base.hbar;
  if (!(s.omega_c > 0.0)) throw DomainError("b = 0 needs a positive omega_c in the base scales");
  return s;
}

struct AuditRow {
  double R_bar = 0.0;
  double deltaR2_closed = 0.0;
  double deltaR2_direct = 0.0;
  double variance_R = 0.0;
  double benchmark = 0.0;      ///< a^2, the undeformed coherent-state value
  double dq_dp = 0.0;          ///< standard Delta q Delta p
  double dq_dp_even = 0.0;     ///< same from the epsilon-weighted even-part moments
  bool flag = false;           ///< deltaR2 below the benchmark
};

struct AuditReport {
  double b = 0.0;
  DeformationConvention convention = DeformationConvention::adjacent;
  std::vector<AuditRow> rows;
  std::size_t flag_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const AuditRow& r) { return r.flag; }));
  }
};

inline constexpr double kAuditFlagMargin = 1e-10;

namespace detail {

inline double uncertainty_product(const EnergyRepState& st, const EpsilonChiMatrix* em, const PhysicalScales& s) {
  const std::size_t N = st.size();
  const std::size_t Nd = 2 * N;
  const Eigen::MatrixXcd X = position_matrix(Nd, s);
  const Eigen::MatrixXcd P = momentum_matrix(Nd, s);
  auto expect = [&](const Eigen::MatrixXcd& A) {
    double acc = 0.0;
    for (int alpha : {+1, -1}) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(Nd));
      v.head(static_cast<Eigen::Index>(N)) = st.component(alpha);
      acc += v.dot(A * v).real();
    }
    return acc;
  };
  if (em != nullptr) {
    const Eigen::MatrixXcd X2 = (X * X).topLeftCorner(N, N);
    const Eigen::MatrixXcd P2 = (P * P).topLeftCorner(N, N);
    const double mq = even_expectation(st, *em, X.topLeftCorner(N, N)).real();
    const double mp = even_expectation(st, *em, P.topLeftCorner(N, N)).real();
    const double vq = even_expectation(st, *em, X2).real() - mq * mq;
    const double vp = even_expectation(st, *em, P2).real() - mp * mp;
    return std::sqrt(std::max(vq, 0.0) * std::max(vp, 0.0));
  }
  const double mq = expect(X), mp = expect(P);
  const double vq = expect(X * X) - mq * mq;
  const double vp = expect(P * P) - mp * mp;
  return std::sqrt(std::max(vq, 0.0) * std::max(vp, 0.0));
}

}  // namespace detail

/// Sweeps R_bar = r * a over `R_over_a` at field strength b and flags dispersions below a^2.
inline AuditReport uncertainty_audit(double b, const std::vector<double>& R_over_a, std::size_t N,
                                     DeformationConvention conv, const PhysicalScales& base) {
  const PhysicalScales s = scales_for_b(b, base);
  const double a = s.oscillator_length();
  AuditReport rep;
  rep.b = b;
  rep.convention = conv;
  for (double r : R_over_a) {
    NonlinearCoherentSpec spec{r * a, N, conv};
    const auto em = coherent_eps_chi(spec, b, s);
    const auto st = nlcs_coefficients(spec, em, s);
    const auto em_state = eps_chi_matrix(landau_spectrum(N, b, s));
    AuditRow row;
    row.R_bar = spec.R_bar;
    row.deltaR2_closed = deltaR2_closed_form(spec, em, s);
    const auto d = deltaR2_direct(st, spec.R_bar, s);
    row.deltaR2_direct = d.dispersion;
    row.variance_R = d.variance;
    row.benchmark = s.oscillator_length2();
    row.dq_dp = detail::uncertainty_product(st, nullptr, s);
    row.dq_dp_even = detail::uncertainty_product(st, &em_state, s);
    row.flag = row.deltaR2_direct < row.benchmark * (1.0 - kAuditFlagMargin);
    rep.rows.push_back(row);
  }
  return rep;
}

struct ModulationSample {
  double t = 0.0;
  double mean_R2 = 0.0;
  double mean_q = 0.0;
  double mean_p = 0.0;
  double orbit_radius2 = 0.0;
  double charge_norm = 0.0;
};

struct ModulationResult {
  std::vector<ModulationSample> series;
  double b = 0.0;
  double omega_c = 0.0;
  double carrier = 0.0;          ///< dominant frequency of <q>(t)
  double omega_est = 0.0;        ///< envelope peak below omega_c / 4 (0 when the envelope is flat)
  double omega_pred = 0.0;       ///< hbar omega_c^2 / mc^2 (1 + (2 n_bar + 1) b)^{-3/2}
  double n_bar = 0.0;            ///< beat-weighted level center
  double envelope_depth = 0.0;   ///< (max - min) / mean of the orbit radius^2
  double mean_R2_drift = 0.0;    ///< max |<R^2>(t) - <R^2>(0)| / <R^2>(0)
  std::size_t N = 0;
};

inline constexpr double kFlatEnvelope = 1e-9;

namespace detail {

/// |sum_k w_k x_k exp(-i omega t_k)| with a Hann window.
inline double windowed_dft(const std::vector<double>& x, double dt, double omega) {
  const std::size_t n = x.size();
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / static_cast<double>(n - 1));
    acc += w * x[k] * std::polar(1.0, -omega * dt * static_cast<double>(k));
  }
  return std::abs(acc);
}

/// Peak of the windowed spectrum in (lo, hi): FFT scan with zero padding, then golden-section refinement.
inline double spectral_peak(const std::vector<double>& x, double dt, double lo, double hi) {
  const std::size_t n = x.size();
  std::size_t len = 1;
  while (len < 8 * n) len <<= 1;
  std::vector<cplx> buf(len, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / static_cast<double>(n - 1));
    buf[k] = w * x[k];
  }
  fft::transform(buf.data(), len, fft::Direction::forward);
  const double dw = 2.0 * std::numbers::pi / (dt * static_cast<double>(len));
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t j = 1; j < len / 2; ++j) {
    const double w = j * dw;
    if (w <= lo || w >= hi) continue;
    if (std::abs(buf[j]) > best_mag) {
      best_mag = std::abs(buf[j]);
      best = j;
    }
  }
  if (best == 0) return 0.0;
  double a = (best - 1) * dw, c = (best + 1) * dw;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = c - g * (c - a), x2 = a + g * (c - a);
  double f1 = windowed_dft(x, dt, x1), f2 = windowed_dft(x, dt, x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 > f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - g * (c - a);
      f1 = windowed_dft(x, dt, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (c - a);
      f2 = windowed_dft(x, dt, x2);
    }
  }
  return 0.5 * (a + c);
}

}  // namespace detail

/// Beat-weighted level center n_bar = sum n |A_{n-1} A_n| / sum |A_{n-1} A_n|, A_n = eps_{n,n+1} sqrt(n+1) C_n^* C_{n+1}.
inline double beat_center(const EnergyRepState& st, const EpsilonChiMatrix& em) {
  const std::size_t N = st.size();
  std::vector<double> A(N - 1, 0.0);
  for (std::size_t n = 0; n + 1 < N; ++n) {
    const auto k = static_cast<Eigen::Index>(n);
    for (int alpha : {+1, -1}) {
      const auto& C = st.component(alpha);
      A[n] += std::abs(em.eps(k, k + 1) * std::sqrt(n + 1.0) * std::conj(C(k)) * C(k + 1));
    }
  }
  double num = 0.0, den = 0.0;
  for (std::size_t n = 1; n + 1 < N; ++n) {
    const double w = A[n - 1] * A[n];
    num += n * w;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

/// Orbit observables of an NLCS packet sampled over [0, T); Omega from the envelope of the mean orbit radius.
inline ModulationResult modulation_experiment(double b, double R_bar, double T, std::size_t samples,
                                              const PhysicalScales& base,
                                              DeformationConvention conv = DeformationConvention::adjacent,
                                              std::size_t N = 0) {
  const PhysicalScales s = scales_for_b(b, base);
  const double a = s.oscillator_length();
  const double lambda2 = R_bar * R_bar / (2.0 * a * a);
  if (N == 0) N = std::max<std::size_t>(16, suggested_truncation(lambda2, 1e-14));

  ModulationResult res;
  res.b = b;
  res.omega_c = s.omega_c;
  res.N = N;
  NonlinearCoherentSpec spec{R_bar, N, conv};
  const auto em_wide = coherent_eps_chi(spec, b, s);
  const auto st0 = nlcs_coefficients(spec, em_wide, s);
  const auto sp = landau_spectrum(N, b, s);
  const auto em = eps_chi_matrix(sp);
  res.n_bar = beat_center(st0, em);
  res.omega_pred = s.modulation_frequency() * std::pow(1.0 + (2.0 * res.n_bar + 1.0) * b, -1.5);

  const double min_samples = std::ceil(T * s.omega_c / std::numbers::pi) + 1.0;
  std::vector<std::string> bad;
  if (!(T > 0.0)) bad.emplace_back("duration must be > 0");
  if (static_cast<double>(samples) < min_samples) {
    std::ostringstream os;
    os << "samples " << samples << " below the omega_c Nyquist minimum " << min_samples;
    bad.push_back(os.str());
  }
  if (b > 0.0 && res.omega_pred > 0.0) {
    const double min_T = 5.0 * 2.0 * std::numbers::pi / res.omega_pred;
    if (T < min_T) {
      std::ostringstream os;
      os << "duration " << T << " covers fewer than 5 envelope periods, need T >= " << min_T;
      bad.push_back(os.str());
    }
  }
  if (!bad.empty()) {
    std::string msg = "modulation_experiment:";
    for (const auto& m : bad) msg += " " + m + ";";
    throw DomainError(msg);
  }

  const double dt = T / static_cast<double>(samples);
  res.series.reserve(samples);
  std::vector<double> q(samples), env(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = dt * static_cast<double>(k);
    const auto st = evolve_energy_rep(st0, sp, t, s);
    const auto o = orbit_observables(st, em, s);
    res.series.push_back({t, o.mean_R2, o.mean_q, o.mean_p, o.orbit_radius2, o.charge_norm});
    q[k] = o.mean_q;
    env[k] = o.orbit_radius2;
  }
  const double R20 = res.series.front().mean_R2;
  for (const auto& smp : res.series) res.mean_R2_drift = std::max(res.mean_R2_drift, std::abs(smp.mean_R2 - R20) / R20);

  res.carrier = detail::spectral_peak(q, dt, 0.25 * s.omega_c, std::numbers::pi / dt);
  const auto [mn, mx] = std::minmax_element(env.begin(), env.end());
  double mean = 0.0;
  for (double v : env) mean += v;
  mean /= static_cast<double>(samples);
  res.envelope_depth = mean > 0.0 ? (*mx - *mn) / mean : 0.0;
  if (res.envelope_depth > kFlatEnvelope) {
    for (double& v : env) v -= mean;
    res.omega_est = detail::spectral_peak(env, dt, 0.0, 0.25 * s.omega_c);
  }
  return res;
}

}  // namespace fvw
