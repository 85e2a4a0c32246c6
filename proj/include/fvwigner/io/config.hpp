#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fvwigner/coherent.hpp"
#include "fvwigner/scales.hpp"

namespace fvw::io {

using json = nlohmann::json;

/// Every violated constraint of a configuration document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

enum class Experiment { free_evolve, rotator_evolve, nlcs_scan, modulation, spectrum, kernels_selftest, oracle_verify };

inline const std::map<std::string, Experiment>& experiment_names() {
  static const std::map<std::string, Experiment> m{
      {"free-evolve", Experiment::free_evolve},       {"rotator-evolve", Experiment::rotator_evolve},
      {"nlcs-scan", Experiment::nlcs_scan},           {"modulation", Experiment::modulation},
      {"spectrum", Experiment::spectrum},             {"kernels-selftest", Experiment::kernels_selftest},
      {"oracle-verify", Experiment::oracle_verify}};
  return m;
}

inline std::string to_string(Experiment e) {
  for (const auto& [name, v] : experiment_names())
    if (v == e) return name;
  return "?";
}

struct PacketSpec {
  double p0 = 0.0;
  double sigma_p = 0.04;
  double q0 = 0.0;
  int charge = +1;
  double weight = 1.0;
  double phase = 0.0;
};

struct FockTerm {
  std::size_t n = 0;
  int charge = +1;
  double re = 1.0;
  double im = 0.0;
};

struct StateSpec {
  enum class Kind { packets, fock, nlcs };
  Kind kind = Kind::packets;
  std::vector<PacketSpec> packets{PacketSpec{}};
  std::vector<FockTerm> terms{FockTerm{0, +1, 1.0, 0.0}, FockTerm{1, +1, 1.0, 0.0}};
  double R_over_a = 1.0;
  DeformationConvention convention = DeformationConvention::adjacent;
};

struct GridSpec {
  std::size_t n = 128;
  std::size_t n_q = 0;    ///< 0: same as n
  double p_extent = 0.0;  ///< 0: 0.6 mc
};

struct TimeSpec {
  double t_end = -1.0;      ///< < 0: experiment default
  std::size_t samples = 0;  ///< 0: experiment default
};

struct MoyalSpec {
  std::size_t steps = 0;  ///< 0 skips the Moyal cross-check
  std::size_t symbol_levels = 16;
  double exact_fraction = 0.5;
  double tolerance = 1e-6;
};

struct SpectrumSpec {
  std::size_t check_levels = 17;
  std::size_t grid = 256;
  std::size_t star_levels = 44;
  double exact_fraction = 0.4;
  double tolerance = 1e-8;
};

struct AuditSpec {
  std::vector<double> R_over_a{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
  double tolerance = 1e-8;
};

struct ModulationSpec {
  double R_over_a = 1.0;
  double periods = 10.0;  ///< duration in predicted envelope periods
  std::size_t samples = 0;
  double omega_scale = 0.5;  ///< second run at omega_scale * omega_c; 0 disables the scaling check
  double tolerance = 0.05;
};

struct OutputSpec {
  bool csv = true;
  bool grids = true;
  std::vector<double> snapshots;  ///< times at which GridFileV1 snapshots are written
};

struct RunConfig {
  std::string name;
  Experiment experiment = Experiment::free_evolve;
  PhysicalScales scales{};
  double b = 0.0;
  GridSpec grid{};
  std::size_t truncation = 0;  ///< 0: experiment default
  StateSpec state{};
  TimeSpec time{};
  MoyalSpec moyal{};
  SpectrumSpec spectrum{};
  AuditSpec audit{};
  ModulationSpec modulation{};
  OutputSpec output{};
  json source;  ///< the (sweep-expanded) document this config was read from
};

struct ConfigSet {
  std::vector<RunConfig> children;
  std::vector<std::string> labels;  ///< one per child, e.g. "modulation.R_over_a=0.5"
  bool swept = false;
};

namespace detail {

/// Strict reader over one JSON object: unknown keys and type errors are collected, not thrown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) errors_.push_back(where("") + " must be an object");
  }

  ~ObjectReader() = default;
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  const json* get(const std::string& key) { return has(key) ? &obj_.at(key) : nullptr; }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (v->is_number()) out = v->get<double>();
      else errors_.push_back(where(key) + " must be a number");
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = get(key)) {
      if (v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0)) out = v->get<std::size_t>();
      else errors_.push_back(where(key) + " must be a non-negative integer");
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else errors_.push_back(where(key) + " must be true or false");
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (v->is_string()) out = v->get<std::string>();
      else errors_.push_back(where(key) + " must be a string");
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) {
        errors_.push_back(where(key) + " must be an array of numbers");
        return;
      }
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) {
          errors_.push_back(where(key) + " must contain only numbers");
          return;
        }
        out.push_back(x.get<double>());
      }
    }
  }

  void charge(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (v->is_number_integer() && (v->get<int>() == 1 || v->get<int>() == -1)) out = v->get<int>();
      else errors_.push_back(where(key) + " must be +1 or -1");
    }
  }

  /// Reports keys that were never asked for.
  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) errors_.push_back("unknown key " + where(key));
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "document" : "'" + path_ + "'";
    return "'" + (path_.empty() ? key : path_ + "." + key) + "'";
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

inline json* resolve_path(json& doc, const std::string& dotted) {
  json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) return nullptr;
    if (cur->is_null()) *cur = json::object();
    if (!cur->is_object()) return nullptr;
    cur = &(*cur)[key];
    if (dot == std::string::npos) return cur;
    start = dot + 1;
  }
}

inline void read_scales(const json& doc, RunConfig& cfg, std::vector<std::string>& err, bool b_given) {
  if (doc.contains("scales")) {
    ObjectReader r(doc.at("scales"), "scales", err);
    r.number("hbar", cfg.scales.hbar);
    r.number("mass", cfg.scales.mass);
    r.number("c", cfg.scales.c);
    r.number("omega_c", cfg.scales.omega_c);
    r.finish();
  }
  const bool has_omega = doc.contains("scales") && doc.at("scales").is_object() && doc.at("scales").contains("omega_c");
  if (!(cfg.scales.hbar > 0.0)) err.emplace_back("hbar must be > 0");
  if (!(cfg.scales.mass > 0.0)) err.emplace_back("mass must be > 0");
  if (!(cfg.scales.c > 0.0)) err.emplace_back("c must be > 0");
  if (b_given) {
    // at b = 0 an explicit omega_c is kept: it only fixes the oscillator length
    if (has_omega && cfg.b != 0.0) err.emplace_back("give either 'b' or 'scales.omega_c', not both");
    if (!(cfg.b >= 0.0)) err.emplace_back("omega_c must be >= 0 (b = " + std::to_string(cfg.b) + ")");
    else if (cfg.b > 0.0 && cfg.scales.hbar > 0.0 && cfg.scales.mass > 0.0 && cfg.scales.c > 0.0)
      cfg.scales.omega_c = cfg.b * cfg.scales.rest_energy() / cfg.scales.hbar;
  } else {
    if (!(cfg.scales.omega_c >= 0.0)) err.emplace_back("omega_c must be >= 0");
    else if (cfg.scales.hbar > 0.0 && cfg.scales.mass > 0.0 && cfg.scales.c > 0.0) cfg.b = cfg.scales.b();
  }
}

/// Field experiments default to b = 0.1 (0.05 for modulation); rotator runs default to a Fock state.
inline bool apply_experiment_defaults(const json& doc, RunConfig& cfg) {
  const auto e = cfg.experiment;
  if (e == Experiment::rotator_evolve) cfg.state.kind = StateSpec::Kind::fock;
  const bool field = e == Experiment::rotator_evolve || e == Experiment::nlcs_scan || e == Experiment::modulation ||
                     e == Experiment::spectrum;
  const bool has_omega = doc.contains("scales") && doc.at("scales").is_object() && doc.at("scales").contains("omega_c");
  if (field && !doc.contains("b") && !has_omega) {
    cfg.b = e == Experiment::modulation ? 0.05 : 0.1;
    return true;
  }
  return doc.contains("b");
}

inline void read_state(const json& node, StateSpec& st, std::vector<std::string>& err) {
  ObjectReader r(node, "state", err);
  std::string kind = st.kind == StateSpec::Kind::packets ? "packets" : st.kind == StateSpec::Kind::fock ? "fock" : "nlcs";
  r.text("kind", kind);
  if (kind == "packets") st.kind = StateSpec::Kind::packets;
  else if (kind == "fock") st.kind = StateSpec::Kind::fock;
  else if (kind == "nlcs") st.kind = StateSpec::Kind::nlcs;
  else err.push_back("'state.kind' must be packets, fock or nlcs (got '" + kind + "')");

  if (const json* list = r.get("packets")) {
    st.packets.clear();
    if (!list->is_array() || list->empty()) err.emplace_back("'state.packets' must be a non-empty array");
    else
      for (std::size_t k = 0; k < list->size(); ++k) {
        PacketSpec p;
        ObjectReader pr((*list)[k], "state.packets[" + std::to_string(k) + "]", err);
        pr.number("p0", p.p0);
        pr.number("sigma_p", p.sigma_p);
        pr.number("q0", p.q0);
        pr.charge("charge", p.charge);
        pr.number("weight", p.weight);
        pr.number("phase", p.phase);
        pr.finish();
        if (!(p.sigma_p > 0.0)) err.push_back(pr.where("sigma_p") + " must be > 0");
        st.packets.push_back(p);
      }
  }
  if (const json* list = r.get("terms")) {
    st.terms.clear();
    if (!list->is_array() || list->empty()) err.emplace_back("'state.terms' must be a non-empty array");
    else
      for (std::size_t k = 0; k < list->size(); ++k) {
        FockTerm t;
        ObjectReader tr((*list)[k], "state.terms[" + std::to_string(k) + "]", err);
        tr.count("n", t.n);
        tr.charge("charge", t.charge);
        tr.number("re", t.re);
        tr.number("im", t.im);
        tr.finish();
        st.terms.push_back(t);
      }
  }
  r.number("R_over_a", st.R_over_a);
  std::string conv = to_string(st.convention);
  r.text("convention", conv);
  if (conv == "adjacent" || conv == "shifted") st.convention = parse_convention(conv);
  else err.push_back("'state.convention' must be adjacent or shifted (got '" + conv + "')");
  r.finish();
  if (!(st.R_over_a >= 0.0)) err.emplace_back("'state.R_over_a' must be >= 0");
}

/// Default truncations, and the coherent-state tail requirement for explicit ones.
inline void resolve_truncation(RunConfig& c, std::vector<std::string>& err) {
  double r_max = -1.0;
  if (c.experiment == Experiment::nlcs_scan)
    for (double r : c.audit.R_over_a) r_max = std::max(r_max, r);
  if (c.experiment == Experiment::modulation) r_max = c.modulation.R_over_a;
  if (c.experiment == Experiment::rotator_evolve && c.state.kind == StateSpec::Kind::nlcs) r_max = c.state.R_over_a;
  if (r_max < 0.0) {
    if (c.truncation == 0) c.truncation = 16;
    return;
  }
  const std::size_t need = std::max<std::size_t>(16, suggested_truncation(0.5 * r_max * r_max, 1e-16));
  if (c.truncation == 0) {
    c.truncation = need;
  } else if (c.truncation < suggested_truncation(0.5 * r_max * r_max, kTailTolerance)) {
    err.push_back("'truncation' = " + std::to_string(c.truncation) + " leaves a coherent-state tail above " +
                  "1e-12 for R_over_a = " + std::to_string(r_max) + "; use truncation >= " + std::to_string(need));
  }
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Cross-field guards: everything that can be checked before any computation starts.
inline void validate(RunConfig& c, std::vector<std::string>& err) {
  const auto& s = c.scales;
  const bool scales_ok = s.hbar > 0.0 && s.mass > 0.0 && s.c > 0.0 && s.omega_c >= 0.0;
  if (c.grid.n < 8 || !is_pow2(c.grid.n)) err.emplace_back("'grid.n' must be a power of two >= 8");
  if (c.grid.n_q != 0 && (c.grid.n_q < 8 || !is_pow2(c.grid.n_q)))
    err.emplace_back("'grid.n_q' must be a power of two >= 8");
  if (c.grid.p_extent < 0.0) err.emplace_back("'grid.p_extent' must be > 0");
  if (c.grid.p_extent == 0.0 && scales_ok) c.grid.p_extent = 0.6 * s.mass * s.c;
  resolve_truncation(c, err);
  if (c.truncation < 2) err.emplace_back("'truncation' must be >= 2");
  if (c.time.t_end != -1.0 && !(c.time.t_end >= 0.0)) err.emplace_back("'time.t_end' must be >= 0");
  for (double t : c.output.snapshots)
    if (!(t >= 0.0)) err.emplace_back("'output.snapshots' times must be >= 0");

  const bool needs_field = c.experiment == Experiment::rotator_evolve || c.experiment == Experiment::nlcs_scan ||
                           c.experiment == Experiment::modulation || c.experiment == Experiment::spectrum;
  if (needs_field && scales_ok && !(s.omega_c > 0.0) &&
      (c.experiment == Experiment::rotator_evolve || c.experiment == Experiment::spectrum))
    err.emplace_back("omega_c must be > 0 for " + to_string(c.experiment));
  if (c.experiment == Experiment::nlcs_scan || c.experiment == Experiment::modulation) {
    if (scales_ok && c.b == 0.0 && !(s.omega_c > 0.0))
      err.emplace_back("b = 0 runs need 'scales.omega_c' > 0 to fix the oscillator length");
  }

  if (c.experiment == Experiment::free_evolve) {
    if (c.state.kind != StateSpec::Kind::packets) err.emplace_back("free-evolve needs state.kind = packets");
    const double p_ext = c.grid.p_extent > 0.0 ? c.grid.p_extent : 0.6 * s.mass * s.c;
    for (std::size_t k = 0; k < c.state.packets.size(); ++k) {
      const auto& p = c.state.packets[k];
      if (std::abs(p.p0) + 12.0 * p.sigma_p > p_ext) {
        std::ostringstream os;
        os << "packet " << k << " (|p0| + 12 sigma_p = " << std::abs(p.p0) + 12.0 * p.sigma_p
           << ") does not decay inside grid.p_extent = " << p_ext;
        err.push_back(os.str());
      }
    }
  }
  if (c.experiment == Experiment::rotator_evolve) {
    if (c.state.kind == StateSpec::Kind::packets) err.emplace_back("rotator-evolve needs state.kind = fock or nlcs");
    if (c.state.kind == StateSpec::Kind::fock)
      for (const auto& t : c.state.terms)
        if (t.n >= c.truncation) err.push_back("Fock term n = " + std::to_string(t.n) + " is not below truncation");
    // Moyal grid q half-width is a sqrt(pi n / 4); resolving N levels needs 1.5 a sqrt(2N).
    const double have = std::sqrt(std::numbers::pi * static_cast<double>(c.grid.n) / 4.0);
    const double need = 1.5 * std::sqrt(2.0 * static_cast<double>(c.truncation));
    if (have < need) {
      std::ostringstream os;
      os << "grid.n = " << c.grid.n << " resolves only " << std::floor(have * have / 4.5)
         << " Fock levels, truncation is " << c.truncation << " (need grid.n >= "
         << std::ceil(18.0 * static_cast<double>(c.truncation) / std::numbers::pi) << ")";
      err.push_back(os.str());
    }
    if (c.moyal.steps > 0 && (c.moyal.symbol_levels < 2 || !(c.moyal.exact_fraction > 0.0) ||
                              !(c.moyal.exact_fraction <= 1.0)))
      err.emplace_back("'moyal.symbol_levels' must be >= 2 and 'moyal.exact_fraction' in (0, 1]");
  }
  if (c.experiment == Experiment::spectrum) {
    if (c.spectrum.grid < 8 || !is_pow2(c.spectrum.grid)) err.emplace_back("'spectrum.grid' must be a power of two");
    if (c.spectrum.star_levels < c.spectrum.check_levels)
      err.emplace_back("'spectrum.star_levels' must be >= 'spectrum.check_levels'");
    const double reach = std::sqrt(std::numbers::pi * static_cast<double>(c.spectrum.grid) / 4.0) / 1.5;
    if (static_cast<double>(c.spectrum.star_levels) > std::floor(reach * reach / 2.0))
      err.push_back("'spectrum.grid' = " + std::to_string(c.spectrum.grid) + " resolves only " +
                    std::to_string(static_cast<int>(std::floor(reach * reach / 2.0))) + " levels");
  }
  if (c.experiment == Experiment::nlcs_scan) {
    if (c.audit.R_over_a.empty()) err.emplace_back("'audit.R_over_a' must not be empty");
    for (double r : c.audit.R_over_a)
      if (!(r >= 0.0)) err.emplace_back("'audit.R_over_a' entries must be >= 0");
  }
  if (c.experiment == Experiment::modulation) {
    if (!(c.modulation.R_over_a > 0.0)) err.emplace_back("'modulation.R_over_a' must be > 0");
    if (!(c.modulation.periods >= 5.0)) err.emplace_back("'modulation.periods' must cover >= 5 envelope periods");
    if (!(c.modulation.omega_scale >= 0.0) || c.modulation.omega_scale == 1.0)
      err.emplace_back("'modulation.omega_scale' must be 0 (off) or a positive factor other than 1");
    if (scales_ok && s.omega_c > 0.0 && c.b > 0.0 && c.modulation.samples != 0) {
      const double T = c.modulation.periods * 2.0 * std::numbers::pi / s.modulation_frequency();
      const double min_samples = std::ceil(T * s.omega_c / std::numbers::pi) + 1.0;
      if (static_cast<double>(c.modulation.samples) < min_samples)
        err.push_back("'modulation.samples' = " + std::to_string(c.modulation.samples) +
                      " is below the Nyquist minimum " + std::to_string(static_cast<long>(min_samples)));
    }
  }
}

inline RunConfig parse_one(const json& doc) {
  std::vector<std::string> err;
  RunConfig cfg;
  cfg.source = doc;
  ObjectReader r(doc, "", err);
  if (!doc.is_object()) throw ConfigError(err);

  std::string kind;
  if (!r.has("experiment")) err.emplace_back("missing required key 'experiment'");
  r.text("experiment", kind);
  if (!kind.empty()) {
    const auto& names = experiment_names();
    if (auto it = names.find(kind); it != names.end()) cfg.experiment = it->second;
    else err.push_back("unknown experiment '" + kind + "'");
  }
  r.text("name", cfg.name);
  r.number("b", cfg.b);
  r.has("scales");
  const bool b_given = apply_experiment_defaults(doc, cfg);
  read_scales(doc, cfg, err, b_given);
  r.count("truncation", cfg.truncation);

  if (const json* g = r.get("grid")) {
    ObjectReader gr(*g, "grid", err);
    gr.count("n", cfg.grid.n);
    gr.count("n_q", cfg.grid.n_q);
    gr.number("p_extent", cfg.grid.p_extent);
    gr.finish();
  }
  if (const json* st = r.get("state")) read_state(*st, cfg.state, err);
  if (const json* t = r.get("time")) {
    ObjectReader tr(*t, "time", err);
    tr.number("t_end", cfg.time.t_end);
    tr.count("samples", cfg.time.samples);
    tr.finish();
  }
  if (const json* m = r.get("moyal")) {
    ObjectReader mr(*m, "moyal", err);
    mr.count("steps", cfg.moyal.steps);
    mr.count("symbol_levels", cfg.moyal.symbol_levels);
    mr.number("exact_fraction", cfg.moyal.exact_fraction);
    mr.number("tolerance", cfg.moyal.tolerance);
    mr.finish();
  }
  if (const json* m = r.get("spectrum")) {
    ObjectReader sr(*m, "spectrum", err);
    sr.count("check_levels", cfg.spectrum.check_levels);
    sr.count("grid", cfg.spectrum.grid);
    sr.count("star_levels", cfg.spectrum.star_levels);
    sr.number("exact_fraction", cfg.spectrum.exact_fraction);
    sr.number("tolerance", cfg.spectrum.tolerance);
    sr.finish();
  }
  if (const json* a = r.get("audit")) {
    ObjectReader ar(*a, "audit", err);
    ar.numbers("R_over_a", cfg.audit.R_over_a);
    ar.number("tolerance", cfg.audit.tolerance);
    ar.finish();
  }
  if (const json* m = r.get("modulation")) {
    ObjectReader mr(*m, "modulation", err);
    mr.number("R_over_a", cfg.modulation.R_over_a);
    mr.number("periods", cfg.modulation.periods);
    mr.count("samples", cfg.modulation.samples);
    mr.number("omega_scale", cfg.modulation.omega_scale);
    mr.number("tolerance", cfg.modulation.tolerance);
    mr.finish();
  }
  if (const json* o = r.get("output")) {
    ObjectReader orr(*o, "output", err);
    orr.boolean("csv", cfg.output.csv);
    orr.boolean("grids", cfg.output.grids);
    orr.numbers("snapshots", cfg.output.snapshots);
    orr.finish();
  }
  r.has("sweep");
  r.finish();
  validate(cfg, err);
  if (!err.empty()) throw ConfigError(err);
  return cfg;
}

inline std::string value_label(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
  }
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace detail

/// Parses a JSON configuration document. A top-level "sweep" object maps dotted key paths to value
/// lists; the document expands to the Cartesian product of those lists, in key order.
inline ConfigSet parse_config_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError({"document must be a JSON object"});
  ConfigSet out;
  if (!doc.contains("sweep")) {
    out.children.push_back(detail::parse_one(doc));
    out.labels.emplace_back();
    return out;
  }
  std::vector<std::string> err;
  const json& sweep = doc.at("sweep");
  if (!sweep.is_object() || sweep.empty()) throw ConfigError({"'sweep' must be a non-empty object of arrays"});
  std::vector<std::pair<std::string, json>> axes;
  for (const auto& [path, values] : sweep.items()) {
    if (path == "sweep" || path.rfind("sweep.", 0) == 0) err.push_back("sweep axis '" + path + "' may not target sweep");
    else if (!values.is_array() || values.empty()) err.push_back("sweep axis '" + path + "' must be a non-empty array");
    else axes.emplace_back(path, values);
  }
  if (!err.empty()) throw ConfigError(err);

  json base = doc;
  base.erase("sweep");
  std::vector<std::size_t> idx(axes.size(), 0);
  out.swept = true;
  while (true) {
    json child = base;
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      json* slot = detail::resolve_path(child, axes[a].first);
      if (slot == nullptr) throw ConfigError({"sweep axis '" + axes[a].first + "' is not a valid key path"});
      *slot = axes[a].second[idx[a]];
      if (!label.empty()) label += ",";
      label += axes[a].first + "=" + detail::value_label(*slot);
    }
    try {
      out.children.push_back(detail::parse_one(child));
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations()) err.push_back("[" + label + "] " + v);
    }
    out.labels.push_back(label);
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) {
        a = axes.size() + 1;
        break;
      }
    }
    if (a == axes.size() + 1) break;
  }
  if (!err.empty()) throw ConfigError(err);
  return out;
}

inline ConfigSet parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  return parse_config_json(doc);
}

}  // namespace fvw::io
