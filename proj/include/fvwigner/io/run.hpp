#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "fvwigner/coherent.hpp"
#include "fvwigner/errors.hpp"
#include "fvwigner/free_particle.hpp"
#include "fvwigner/io/checks.hpp"
#include "fvwigner/io/config.hpp"
#include "fvwigner/io/gridfile.hpp"
#include "fvwigner/io/selftest.hpp"
#include "fvwigner/oracle.hpp"
#include "fvwigner/rotator.hpp"
#include "fvwigner/star.hpp"
#include "fvwigner/version.hpp"

namespace fvw::io {

using ojson = nlohmann::ordered_json;

enum ExitCode : int { kExitPass = 0, kExitConfig = 2, kExitNumerical = 3 };

inline constexpr double kStructureTolerance = 1e-10;
inline constexpr double kChargeTolerance = 1e-10;

/// Fixed-format CSV writer; "%.17g" keeps repeated runs byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(const std::vector<double>& values) {
    if (values.size() != header_.size()) throw std::logic_error("CsvWriter: row width differs from header");
    rows_.push_back(values);
  }

  std::string str() const {
    std::string out;
    for (std::size_t k = 0; k < header_.size(); ++k) out += (k ? "," : "") + header_[k];
    out += '\n';
    char buf[40];
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", r[k]);
        if (k) out += ',';
        out += buf;
      }
      out += '\n';
    }
    return out;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct RunOutcome {
  int exit_code = kExitPass;
  ojson manifest;
};

namespace detail {

struct RunContext {
  const RunConfig& cfg;
  std::filesystem::path out;
  CheckList checks;
  Diagnostics diag;
  ojson results = ojson::object();
  std::vector<std::string> files;

  void save_csv(const std::string& name, const CsvWriter& csv) {
    if (!cfg.output.csv) return;
    csv.save(out / name);
    files.push_back(name);
  }
  void save_grid(const std::string& name, const WignerComponents& w) {
    if (!cfg.output.grids) return;
    write_grid_file((out / name).string(), w);
    files.push_back(name);
  }
};

inline std::vector<double> sample_times(const TimeSpec& ts, double default_end, std::size_t default_samples) {
  const double t_end = ts.t_end >= 0.0 ? ts.t_end : default_end;
  const std::size_t n = ts.samples != 0 ? ts.samples : default_samples;
  std::vector<double> t(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) t[k] = t_end * static_cast<double>(k) / static_cast<double>(n - 1);
  if (n == 1) t[0] = t_end;
  return t;
}

inline std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%03zu.fvwg", k);
  return buf;
}

/// The vanishing odd q-marginal is a free-particle identity; the field runs do not have it.
inline void record_structure(RunContext& ctx, const WignerComponents& w, double charge0, const std::string& prefix,
                             bool odd_marginal = false) {
  const auto r = structure_report(w);
  ctx.checks.track_max(prefix + "even_imaginary", r.even_imag, kStructureTolerance);
  ctx.checks.track_max(prefix + "odd_antisymmetry", r.antisymmetry, kStructureTolerance);
  if (odd_marginal) ctx.checks.track_max(prefix + "odd_q_marginal", r.odd_marginal, kStructureTolerance);
  ctx.checks.track_max(prefix + "charge_norm_drift", std::abs(r.charge_norm - charge0), kChargeTolerance);
}

inline FVState build_packets(const RunConfig& cfg, const PhaseGrid& g) {
  FVState st(g);
  for (const auto& pk : cfg.state.packets) {
    const auto psi = gaussian_packet(g, pk.p0, pk.sigma_p, pk.q0, cfg.scales, std::polar(pk.weight, pk.phase));
    auto& dst = st.component(pk.charge);
    for (std::size_t i = 0; i < g.n_p; ++i) dst[i] += psi[i];
  }
  const double total = st.norm2(+1) + st.norm2(-1);
  if (!(total > 0.0)) throw DomainError("state has zero norm");
  const double f = 1.0 / std::sqrt(total);
  for (auto* c : {&st.psi_plus, &st.psi_minus})
    for (auto& v : *c) v *= f;
  return st;
}

inline EnergyRepState build_fock(const RunConfig& cfg, std::size_t N) {
  EnergyRepState st(N);
  for (const auto& t : cfg.state.terms) st.component(t.charge)(static_cast<Eigen::Index>(t.n)) += cplx{t.re, t.im};
  const double total = st.total_norm();
  if (!(total > 0.0)) throw DomainError("state has zero norm");
  st.C_plus /= std::sqrt(total);
  st.C_minus /= std::sqrt(total);
  return st;
}

inline void run_free(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& s = cfg.scales;
  const double p_ext = cfg.grid.p_extent > 0.0 ? cfg.grid.p_extent : 0.6 * s.mass * s.c;
  const auto g = make_wigner_grid(cfg.grid.n, cfg.grid.n_q ? cfg.grid.n_q : cfg.grid.n, p_ext, s);
  const FVState st = build_packets(cfg, g);
  const WignerComponents W0 = wigner_components(st, s, &ctx.diag);
  const auto times = sample_times(cfg.time, 10.0 * s.hbar / s.rest_energy(), 11);
  const double charge0 = st.charge_norm();

  double marg = 0.0;
  {
    const auto d = to_direct(W0);
    for (int alpha : {+1, -1}) {
      const auto m = q_marginal(d.component(alpha, alpha));
      const auto& psi = st.component(alpha);
      for (std::size_t i = 0; i < g.n_p; ++i) marg = std::max(marg, std::abs(m[i] - std::norm(psi[i])));
    }
  }
  ctx.checks.expect_le("free.even_q_marginal", marg, 1e-10);

  CsvWriter csv({"t", "norm_plus", "norm_minus", "charge_norm", "mean_p", "mean_q", "var_q", "odd_peak",
                 "oracle_deviation"});
  std::vector<double> snaps = cfg.output.snapshots;
  std::size_t snap_index = 0;
  for (double t : times) {
    const WignerComponents W = evolve_free(W0, t, s);
    const WignerComponents ref = wigner_components(oracle::wavefunction_evolution_free(st, t, s), s);
    const double dev = max_abs_diff(W, ref);
    ctx.checks.track_max("free.commuting_square", dev, 1e-10);
    record_structure(ctx, W, charge0, "free.", true);
    const auto m0 = moments(W, 0, 0), mp = moments(W, 1, 0), mq = moments(W, 0, 1), mq2 = moments(W, 0, 2);
    const double norm = m0.even().real();
    const double mean_q = mq.even().real() / norm;
    const double odd_peak = std::max(W.odd_plus.max_abs(), W.odd_minus.max_abs());
    csv.row({t, m0.even_plus.real(), m0.even_minus.real(), m0.even_plus.real() - m0.even_minus.real(),
             mp.even().real() / norm, mean_q, mq2.even().real() / norm - mean_q * mean_q, odd_peak, dev});
  }
  for (double t : snaps) ctx.save_grid(snapshot_name(snap_index++), evolve_free(W0, t, s));
  ctx.save_csv("free_evolve.csv", csv);
  ctx.results["grid"] = {{"n_p", g.n_p}, {"n_q", g.n_q}, {"p_extent", g.p_extent}, {"q_extent", g.q_extent}};
  ctx.results["charge_norm"] = charge0;
}

inline EnergyRepState build_rotator_state(const RunConfig& cfg, const PhysicalScales& s, std::size_t N) {
  if (cfg.state.kind == StateSpec::Kind::nlcs) {
    NonlinearCoherentSpec spec{cfg.state.R_over_a * s.oscillator_length(), N, cfg.state.convention};
    return nlcs_coefficients(spec, coherent_eps_chi(spec, cfg.b, s), s);
  }
  return build_fock(cfg, N);
}

inline void run_rotator(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& s = cfg.scales;
  const std::size_t N = cfg.truncation;
  const double a = s.oscillator_length();
  const auto g = make_moyal_grid(cfg.grid.n, a, s);
  const auto sp = landau_spectrum(N, cfg.b, s);
  const auto em = eps_chi_matrix(sp);
  const EnergyRepState st0 = build_rotator_state(cfg, s, N);
  const WignerComponents W0 = wigner_energy_rep(st0, em, g, s, &ctx.diag);
  const double period = 2.0 * std::numbers::pi / s.omega_c;
  const auto times = sample_times(cfg.time, period, 17);
  const double charge0 = st0.charge_norm();
  const auto r0 = structure_report(W0);
  const double even0 = r0.even_integral_plus.real() + r0.even_integral_minus.real();

  CsvWriter csv({"t", "mean_R2", "mean_R2_phase_space", "mean_q", "mean_p", "orbit_radius2", "charge_norm",
                 "odd_peak"});
  for (double t : times) {
    const auto st = evolve_energy_rep(st0, sp, t, s);
    const auto dense = oracle::dense_evolution(st0, sp, t, s);
    ctx.checks.track_max("rotator.dense_evolution",
                         std::max((st.C_plus - dense.C_plus).cwiseAbs().maxCoeff(),
                                  (st.C_minus - dense.C_minus).cwiseAbs().maxCoeff()),
                         1e-13);
    const WignerComponents W = wigner_energy_rep(st, em, g, s);
    record_structure(ctx, W, charge0, "rotator.");
    const auto r = structure_report(W);
    ctx.checks.track_max("rotator.even_integral_drift",
                         std::abs(r.even_integral_plus.real() + r.even_integral_minus.real() - even0), 1e-9);
    const auto o = orbit_observables(st, em, s);
    const double R2_ps = radius_observable(W, s);
    ctx.checks.track_max("rotator.R2_phase_space_vs_fock", std::abs(R2_ps - o.mean_R2) / o.mean_R2, 1e-9);
    csv.row({t, o.mean_R2, R2_ps, o.mean_q, o.mean_p, o.orbit_radius2, o.charge_norm,
             std::max(W.odd_plus.max_abs(), W.odd_minus.max_abs())});
  }
  ctx.save_csv("rotator_evolve.csv", csv);
  std::size_t snap_index = 0;
  for (double t : cfg.output.snapshots)
    ctx.save_grid(snapshot_name(snap_index++), wigner_energy_rep(evolve_energy_rep(st0, sp, t, s), em, g, s));

  ctx.results["grid"] = {{"n", g.n_p}, {"q_extent", g.q_extent}, {"p_extent", g.p_extent}};
  ctx.results["b"] = cfg.b;
  ctx.results["truncation"] = N;
  ctx.results["tail_fraction"] = st0.tail_fraction();

  if (cfg.moyal.steps > 0) {
    const double t_end = times.back();
    const auto spE = landau_spectrum(cfg.moyal.symbol_levels, cfg.b, s);
    const PhaseField E = rotator_energy_symbol(spE, g, s, {SymbolWindow::Kind::smooth, cfg.moyal.exact_fraction}, &ctx.diag);
    const auto exact = wigner_energy_rep(evolve_energy_rep(st0, sp, t_end, s), em, g, s);
    const auto mv = evolve_moyal_rotator(W0, E, t_end, cfg.moyal.steps, s);
    const double dev = max_abs_diff(mv.W, exact);
    ctx.checks.expect_le("rotator.moyal_path_deviation", dev, cfg.moyal.tolerance);
    record_structure(ctx, mv.W, charge0, "rotator.moyal.");
    ctx.results["moyal"] = {{"steps", cfg.moyal.steps},
                            {"t_end", t_end},
                            {"deviation", dev},
                            {"stability", mv.stability},
                            {"error_estimate", mv.error_estimate}};
  }
}

inline void run_nlcs_scan(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto rep = uncertainty_audit(cfg.b, cfg.audit.R_over_a, cfg.truncation, cfg.state.convention, cfg.scales);
  const PhysicalScales s = scales_for_b(cfg.b, cfg.scales);
  const double a2 = s.oscillator_length2();
  CsvWriter csv({"R_over_a", "R_bar", "deltaR2_closed", "deltaR2_direct", "variance_R", "benchmark", "dq_dp",
                 "dq_dp_even", "flag"});
  auto flagged = ojson::array();
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    const double rel = std::abs(r.deltaR2_closed - r.deltaR2_direct) / std::abs(r.deltaR2_direct);
    ctx.checks.track_max("nlcs.closed_vs_direct", rel, cfg.audit.tolerance);
    if (cfg.b == 0.0) {
      ctx.checks.track_max("nlcs.glauber_limit", std::abs(r.deltaR2_direct - a2) / a2, 1e-10);
      ctx.checks.track_max("nlcs.glauber_limit_closed", std::abs(r.deltaR2_closed - a2) / a2, 1e-10);
    }
    if (r.flag) flagged.push_back(cfg.audit.R_over_a[k]);
    csv.row({cfg.audit.R_over_a[k], r.R_bar, r.deltaR2_closed, r.deltaR2_direct, r.variance_R, r.benchmark, r.dq_dp,
             r.dq_dp_even, r.flag ? 1.0 : 0.0});
  }
  if (cfg.b == 0.0) ctx.checks.expect_le("nlcs.no_flags_at_b0", static_cast<double>(rep.flag_count()), 0.0);
  ctx.save_csv("nlcs_scan.csv", csv);
  ctx.results["b"] = cfg.b;
  ctx.results["convention"] = to_string(cfg.state.convention);
  ctx.results["truncation"] = cfg.truncation;
  ctx.results["flag_count"] = rep.flag_count();
  ctx.results["flagged_R_over_a"] = flagged;
  if (!flagged.empty())
    ctx.results["flag_window"] = {flagged.front(), flagged.back()};
}

struct ModulationRun {
  ModulationResult result;
  double duration = 0.0;
  std::size_t samples = 0;
};

inline ModulationRun modulation_run(const RunConfig& cfg, const PhysicalScales& base, double b, bool own_samples) {
  const PhysicalScales s = scales_for_b(b, base);
  const double R_bar = cfg.modulation.R_over_a * s.oscillator_length();
  const std::size_t N = cfg.truncation;
  NonlinearCoherentSpec spec{R_bar, N, cfg.state.convention};
  const auto st = nlcs_coefficients(spec, coherent_eps_chi(spec, b, s), s);
  const double n_bar = beat_center(st, eps_chi_matrix(landau_spectrum(N, b, s)));
  const double pred = s.modulation_frequency() * std::pow(1.0 + (2.0 * n_bar + 1.0) * b, -1.5);
  ModulationRun run;
  // at b = 0 there is no envelope; the window still spans the nominal periods at the reference omega_c
  const double env = pred > 0.0 && b > 0.0 ? pred : s.modulation_frequency();
  run.duration = cfg.modulation.periods * 2.0 * std::numbers::pi / env;
  const double min_samples = std::ceil(run.duration * s.omega_c / std::numbers::pi) + 1.0;
  run.samples = own_samples && cfg.modulation.samples != 0 ? cfg.modulation.samples : static_cast<std::size_t>(4.0 * min_samples);
  run.result = modulation_experiment(b, R_bar, run.duration, run.samples, base, cfg.state.convention, N);
  return run;
}

inline void run_modulation(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto main = modulation_run(cfg, cfg.scales, cfg.b, true);
  const auto& r = main.result;
  CsvWriter csv({"t", "mean_R2", "mean_q", "mean_p", "orbit_radius2", "charge_norm"});
  double charge_drift = 0.0;
  for (const auto& smp : r.series) {
    csv.row({smp.t, smp.mean_R2, smp.mean_q, smp.mean_p, smp.orbit_radius2, smp.charge_norm});
    charge_drift = std::max(charge_drift, std::abs(smp.charge_norm - r.series.front().charge_norm));
  }
  ctx.save_csv("modulation.csv", csv);
  ctx.checks.expect_le("modulation.charge_norm_drift", charge_drift, kChargeTolerance);
  ctx.checks.expect_le("modulation.mean_R2_drift", r.mean_R2_drift, 1e-10);
  ctx.results["b"] = cfg.b;
  ctx.results["omega_c"] = r.omega_c;
  ctx.results["duration"] = main.duration;
  ctx.results["samples"] = main.samples;
  ctx.results["truncation"] = r.N;
  ctx.results["carrier"] = r.carrier;
  ctx.results["n_bar"] = r.n_bar;
  ctx.results["envelope_depth"] = r.envelope_depth;
  ctx.results["Omega_est"] = r.omega_est;
  ctx.results["Omega_pred"] = r.omega_pred;
  ctx.results["Omega_bare"] = scales_for_b(cfg.b, cfg.scales).modulation_frequency();
  ctx.checks.expect_le("modulation.carrier_vs_omega_c", std::abs(r.carrier / r.omega_c - 1.0), 0.25);
  if (cfg.b == 0.0) {
    ctx.checks.expect_le("modulation.flat_envelope_at_b0", r.omega_est, 0.0);
    return;
  }
  const double rel = std::abs(r.omega_est / r.omega_pred - 1.0);
  ctx.results["Omega_rel_error"] = rel;
  ctx.checks.expect_le("modulation.Omega_vs_prediction", rel, cfg.modulation.tolerance);

  if (cfg.modulation.omega_scale > 0.0) {
    const double k = cfg.modulation.omega_scale;
    const auto other = modulation_run(cfg, cfg.scales, cfg.b * k, false);
    const auto& o = other.result;
    const double raw = o.omega_est / r.omega_est;
    // remove the (1 + (2 n_bar + 1) b)^{-3/2} level dependence before comparing with omega_c^2
    const double bare_main = r.omega_est * std::pow(1.0 + (2.0 * r.n_bar + 1.0) * r.b, 1.5);
    const double bare_other = o.omega_est * std::pow(1.0 + (2.0 * o.n_bar + 1.0) * o.b, 1.5);
    const double corrected = bare_other / bare_main;
    ctx.results["scaling"] = {{"omega_scale", k},           {"b_other", o.b},
                              {"Omega_est_other", o.omega_est}, {"Omega_pred_other", o.omega_pred},
                              {"n_bar_other", o.n_bar},     {"ratio_raw", raw},
                              {"ratio_level_corrected", corrected}, {"expected", k * k}};
    ctx.checks.expect_le("modulation.Omega_scaling", std::abs(corrected / (k * k) - 1.0), cfg.modulation.tolerance);
  }
}

inline void run_spectrum(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& s = cfg.scales;
  const double mc2 = s.rest_energy();
  const double a = s.oscillator_length();
  const auto g = make_moyal_grid(cfg.spectrum.grid, a, s);
  const auto A = PhaseField::sample(g, [&](double p, double q) {
    return cplx{1.0 + (p * p / s.mass + s.mass * s.omega_c * s.omega_c * q * q) / mc2, 0.0};
  });
  StarSqrtOptions opt;
  opt.levels = cfg.spectrum.star_levels;
  opt.window = SymbolWindow{SymbolWindow::Kind::smooth, cfg.spectrum.exact_fraction};
  const auto res = star_sqrt_detailed(A, s, 1e-10, opt);
  const auto sp = landau_spectrum(cfg.spectrum.star_levels, cfg.b, s);
  const double Om = s.modulation_frequency();
  CsvWriter csv({"n", "E_closed", "E_star", "rel_error", "second_difference", "second_difference_pred"});
  double worst = 0.0;
  for (std::size_t n = 0; n < cfg.spectrum.check_levels; ++n) {
    const double closed = sp.E[n] / mc2;
    const double star = res.root_eigenvalues[n];
    const double rel = std::abs(star - closed) / closed;
    worst = std::max(worst, rel);
    double d2 = 0.0, d2p = 0.0;
    if (n > 0 && n + 1 < sp.N) {
      d2 = sp.E[n + 1] - 2.0 * sp.E[n] + sp.E[n - 1];
      d2p = -s.hbar * Om * std::pow(1.0 + (2.0 * n + 1.0) * cfg.b, -1.5);
    }
    csv.row({static_cast<double>(n), closed, star, rel, d2, d2p});
  }
  ctx.save_csv("spectrum.csv", csv);
  ctx.checks.expect_le("spectrum.star_sqrt_vs_closed_form", worst, cfg.spectrum.tolerance);
  ctx.checks.expect_le("spectrum.star_sqrt_residual", res.residual, 1e-10);
  ctx.checks.expect_le("spectrum.input_off_diagonal", res.off_diagonal, 1e-10);
  ctx.results["b"] = cfg.b;
  ctx.results["exact_levels"] = res.exact_levels;
  ctx.results["residual"] = res.residual;
}

inline ojson scales_json(const RunConfig& cfg) {
  return {{"hbar", cfg.scales.hbar}, {"mass", cfg.scales.mass}, {"c", cfg.scales.c},
          {"omega_c", cfg.scales.omega_c}, {"b", cfg.b}};
}

inline void write_manifest(const std::filesystem::path& dir, const ojson& m) {
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  if (!os) throw std::runtime_error("cannot write manifest in " + dir.string());
  os << m.dump(2) << '\n';
}

}  // namespace detail

/// Runs one validated configuration, writing outputs and manifest.json into `out_dir`.
inline RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  detail::RunContext ctx{cfg, out_dir, {}, {}, ojson::object(), {}};
  RunOutcome res;
  std::string error;
  try {
    switch (cfg.experiment) {
      case Experiment::free_evolve: detail::run_free(ctx); break;
      case Experiment::rotator_evolve: detail::run_rotator(ctx); break;
      case Experiment::nlcs_scan: detail::run_nlcs_scan(ctx); break;
      case Experiment::modulation: detail::run_modulation(ctx); break;
      case Experiment::spectrum: detail::run_spectrum(ctx); break;
      case Experiment::kernels_selftest: kernels_selftest(ctx.checks); break;
      case Experiment::oracle_verify: oracle_verify(ctx.checks); break;
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  const bool pass = error.empty() && ctx.checks.all_pass();
  res.exit_code = pass ? kExitPass : kExitNumerical;

  ojson& m = res.manifest;
  m["name"] = cfg.name;
  m["experiment"] = to_string(cfg.experiment);
  m["library"] = {{"name", "fvwigner"}, {"version", kVersion}};
  m["status"] = pass ? "pass" : (error.empty() ? "fail" : "error");
  if (!error.empty()) m["error"] = error;
  m["config"] = cfg.source;
  m["scales"] = detail::scales_json(cfg);
  m["checks"] = ctx.checks.to_json();
  m["results"] = ctx.results;
  m["warnings"] = ctx.diag.warnings;
  m["outputs"] = ctx.files;
  detail::write_manifest(out_dir, m);
  return res;
}

/// Runs every child of a configuration set. Sweep children go to child_NNN/ subdirectories and may run
/// on several threads; the top-level manifest lists them in sweep order.
inline RunOutcome run_all(const ConfigSet& set, const std::filesystem::path& out_dir, unsigned threads = 1) {
  if (!set.swept) return run(set.children.front(), out_dir);
  std::filesystem::create_directories(out_dir);
  const std::size_t n = set.children.size();
  std::vector<RunOutcome> outcomes(n);
  auto child_dir = [&](std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "child_%03zu", k);
    return out_dir / buf;
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) outcomes[k] = run(set.children[k], child_dir(k));
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunOutcome res;
  auto children = ojson::array();
  bool pass = true;
  for (std::size_t k = 0; k < n; ++k) {
    pass = pass && outcomes[k].exit_code == kExitPass;
    children.push_back({{"label", set.labels[k]},
                        {"directory", child_dir(k).filename().string()},
                        {"status", outcomes[k].manifest["status"]},
                        {"exit_code", outcomes[k].exit_code}});
  }
  res.exit_code = pass ? kExitPass : kExitNumerical;
  res.manifest["library"] = {{"name", "fvwigner"}, {"version", kVersion}};
  res.manifest["status"] = pass ? "pass" : "fail";
  res.manifest["children"] = children;
  detail::write_manifest(out_dir, res.manifest);
  return res;
}

/// Writes a manifest for a configuration that failed validation.
inline RunOutcome config_failure(const ConfigError& e, const std::filesystem::path& out_dir) {
  RunOutcome res;
  res.exit_code = kExitConfig;
  res.manifest["library"] = {{"name", "fvwigner"}, {"version", kVersion}};
  res.manifest["status"] = "config_error";
  res.manifest["violations"] = e.violations();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!ec) detail::write_manifest(out_dir, res.manifest);
  return res;
}

}  // namespace fvw::io
