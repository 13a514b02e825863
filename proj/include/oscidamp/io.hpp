#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscidamp/control.hpp"
#include "oscidamp/metrics.hpp"
#include "oscidamp/model.hpp"
#include "oscidamp/sim.hpp"

namespace oscidamp {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kConfigSchema = "oscidamp-config/1";

struct ControllerSpec {
  ControllerMode mode = ControllerMode::SF;
  std::optional<double> kd;          // FD gain; absent -> grid search
  std::vector<double> q_diag;        // 2N entries
  std::vector<double> r_diag;        // N entries
};

struct OutputSpec {
  std::size_t decimation = 10;
};

struct Config {
  PowerSystem system;
  ControllerSpec controller;
  Scenario scenario;
  OutputSpec output;
};

namespace iodetail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) fail(path + "." + it.key(), "unknown key");
  }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required key");
  return *it;
}

inline double num(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

inline std::size_t index1(const json& v, const std::string& path, std::size_t n) {
  if (!v.is_number_integer()) fail(path, "expected an integer area index");
  const long long raw = v.get<long long>();
  if (raw < 1 || static_cast<std::size_t>(raw) > n)
    fail(path, "area index out of range 1.." + std::to_string(n));
  return static_cast<std::size_t>(raw) - 1;
}

inline std::string str(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

inline PowerSystem parse_system(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown(j, path, {"f_nom_hz", "areas", "ties", "stiffness_eps"});
  PowerSystem sys;
  sys.f_nom_hz = num(require(j, path, "f_nom_hz"), path + ".f_nom_hz");
  if (sys.f_nom_hz <= 0) fail(path + ".f_nom_hz", "must be > 0");

  const json& areas = require(j, path, "areas");
  if (!areas.is_array() || areas.empty()) fail(path + ".areas", "expected a non-empty array");
  for (std::size_t k = 0; k < areas.size(); ++k) {
    const std::string ap = path + ".areas[" + std::to_string(k) + "]";
    reject_unknown(areas[k], ap, {"inertia_s", "damping_pu"});
    AreaParams a;
    a.inertia_s = num(require(areas[k], ap, "inertia_s"), ap + ".inertia_s");
    a.damping_pu = num(require(areas[k], ap, "damping_pu"), ap + ".damping_pu");
    if (a.inertia_s <= 0) fail(ap + ".inertia_s", "must be > 0");
    if (a.damping_pu < 0) fail(ap + ".damping_pu", "must be >= 0");
    sys.areas.push_back(a);
  }
  const std::size_t n = sys.areas.size();
  sys.network.n_areas = n;

  const json& ties = require(j, path, "ties");
  if (!ties.is_array()) fail(path + ".ties", "expected an array");
  for (std::size_t k = 0; k < ties.size(); ++k) {
    const std::string tp = path + ".ties[" + std::to_string(k) + "]";
    reject_unknown(ties[k], tp, {"i", "j", "t_pu"});
    TieCoeff t;
    t.i = index1(require(ties[k], tp, "i"), tp + ".i", n);
    t.j = index1(require(ties[k], tp, "j"), tp + ".j", n);
    t.torque_pu = num(require(ties[k], tp, "t_pu"), tp + ".t_pu");
    if (t.i == t.j) fail(tp, "self-loop tie not allowed");
    if (t.torque_pu <= 0) fail(tp + ".t_pu", "must be > 0");
    for (const auto& prev : sys.network.ties)
      if ((prev.i == t.i && prev.j == t.j) || (prev.i == t.j && prev.j == t.i))
        fail(tp, "duplicate tie between areas");
    sys.network.ties.push_back(t);
  }
  if (!tie_graph_connected(sys.network)) fail(path + ".ties", "tie-line graph is not connected");

  const json& eps = require(j, path, "stiffness_eps");
  if (!eps.is_array() || eps.size() != n)
    fail(path + ".stiffness_eps", "expected an array of length " + std::to_string(n));
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double e = num(eps[k], path + ".stiffness_eps[" + std::to_string(k) + "]");
    if (e < 0) fail(path + ".stiffness_eps[" + std::to_string(k) + "]", "must be >= 0");
    sys.network.stiffness_eps.push_back(e);
  }
  return sys;
}

inline ControllerMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "fd") return ControllerMode::FD;
  if (s == "sf") return ControllerMode::SF;
  if (s == "sdf_exact") return ControllerMode::SdfExact;
  if (s == "sdf_measured") return ControllerMode::SdfMeasured;
  fail(path, "expected one of fd|sf|sdf_exact|sdf_measured");
}

inline ControllerSpec parse_controller(const json& j, const std::string& path,
                                       std::size_t n) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown(j, path, {"mode", "kd", "lqr"});
  ControllerSpec c;
  c.mode = parse_mode(str(require(j, path, "mode"), path + ".mode"), path + ".mode");
  if (j.contains("kd") && !j["kd"].is_null()) {
    c.kd = num(j["kd"], path + ".kd");
    if (*c.kd <= 0) fail(path + ".kd", "must be > 0");
  }
  const LqrWeights defaults = default_lqr_weights(n);
  for (std::size_t i = 0; i < 2 * n; ++i) c.q_diag.push_back(defaults.q(i, i));
  for (std::size_t i = 0; i < n; ++i) c.r_diag.push_back(defaults.r(i, i));
  if (j.contains("lqr")) {
    const std::string lp = path + ".lqr";
    reject_unknown(j["lqr"], lp, {"q_diag", "r_diag"});
    if (j["lqr"].contains("q_diag")) {
      const json& qd = j["lqr"]["q_diag"];
      if (!qd.is_array() || qd.size() != 2 * n)
        fail(lp + ".q_diag", "expected an array of length " + std::to_string(2 * n));
      for (std::size_t i = 0; i < qd.size(); ++i) {
        c.q_diag[i] = num(qd[i], lp + ".q_diag[" + std::to_string(i) + "]");
        if (c.q_diag[i] < 0) fail(lp + ".q_diag[" + std::to_string(i) + "]", "must be >= 0");
      }
    }
    if (j["lqr"].contains("r_diag")) {
      const json& rd = j["lqr"]["r_diag"];
      if (!rd.is_array() || rd.size() != n)
        fail(lp + ".r_diag", "expected an array of length " + std::to_string(n));
      for (std::size_t i = 0; i < rd.size(); ++i) {
        c.r_diag[i] = num(rd[i], lp + ".r_diag[" + std::to_string(i) + "]");
        if (c.r_diag[i] <= 0) fail(lp + ".r_diag[" + std::to_string(i) + "]", "must be > 0");
      }
    }
  }
  return c;
}

inline DisturbanceProfile parse_disturbance(const json& j, const std::string& path,
                                            std::size_t n) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string type = str(require(j, path, "type"), path + ".type");
  if (type == "none") {
    reject_unknown(j, path, {"type"});
    return std::monostate{};
  }
  if (type == "step_load") {
    reject_unknown(j, path, {"type", "area", "magnitude_pu", "t_on_s", "t_off_s"});
    StepLoad s;
    s.area = index1(require(j, path, "area"), path + ".area", n);
    s.magnitude_pu = num(require(j, path, "magnitude_pu"), path + ".magnitude_pu");
    s.t_on_s = num(require(j, path, "t_on_s"), path + ".t_on_s");
    s.t_off_s = num(require(j, path, "t_off_s"), path + ".t_off_s");
    if (s.t_off_s <= s.t_on_s) fail(path + ".t_off_s", "must exceed t_on_s");
    return s;
  }
  if (type == "fault_pulse") {
    reject_unknown(j, path, {"type", "area", "magnitude_pu", "t_on_s", "duration_s"});
    FaultPulse f;
    f.area = index1(require(j, path, "area"), path + ".area", n);
    f.magnitude_pu = num(require(j, path, "magnitude_pu"), path + ".magnitude_pu");
    f.t_on_s = num(require(j, path, "t_on_s"), path + ".t_on_s");
    f.duration_s = num(require(j, path, "duration_s"), path + ".duration_s");
    if (f.duration_s <= 0) fail(path + ".duration_s", "must be > 0");
    return f;
  }
  if (type == "burst_load") {
    reject_unknown(j, path, {"type", "area", "low_pu", "high_pu", "period_s", "duty",
                             "t_start_s", "t_end_s"});
    BurstLoad b;
    b.area = index1(require(j, path, "area"), path + ".area", n);
    b.low_pu = num(require(j, path, "low_pu"), path + ".low_pu");
    b.high_pu = num(require(j, path, "high_pu"), path + ".high_pu");
    b.period_s = num(require(j, path, "period_s"), path + ".period_s");
    b.duty = num(require(j, path, "duty"), path + ".duty");
    b.t_start_s = num(require(j, path, "t_start_s"), path + ".t_start_s");
    b.t_end_s = num(require(j, path, "t_end_s"), path + ".t_end_s");
    if (b.high_pu <= b.low_pu) fail(path + ".high_pu", "must exceed low_pu");
    if (b.period_s <= 0) fail(path + ".period_s", "must be > 0");
    if (b.duty <= 0 || b.duty >= 1) fail(path + ".duty", "must be in (0, 1)");
    if (b.t_end_s <= b.t_start_s) fail(path + ".t_end_s", "must exceed t_start_s");
    return b;
  }
  fail(path + ".type", "expected one of none|step_load|fault_pulse|burst_load");
}

inline NoiseSpec parse_noise(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown(j, path, {"enabled", "sigma_f_hz", "sigma_delta_rad", "sigma_rocof_hz_s",
                           "pmu_rate_hz", "seed"});
  NoiseSpec ns;
  if (j.contains("enabled")) {
    if (!j["enabled"].is_boolean()) fail(path + ".enabled", "expected a boolean");
    ns.enabled = j["enabled"].get<bool>();
  }
  if (j.contains("sigma_f_hz")) ns.sigma_f_hz = num(j["sigma_f_hz"], path + ".sigma_f_hz");
  if (j.contains("sigma_delta_rad"))
    ns.sigma_delta_rad = num(j["sigma_delta_rad"], path + ".sigma_delta_rad");
  if (j.contains("sigma_rocof_hz_s"))
    ns.sigma_rocof_hz_s = num(j["sigma_rocof_hz_s"], path + ".sigma_rocof_hz_s");
  if (j.contains("pmu_rate_hz")) ns.pmu_rate_hz = num(j["pmu_rate_hz"], path + ".pmu_rate_hz");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail(path + ".seed", "expected an integer");
    ns.seed = j["seed"].get<std::uint64_t>();
  }
  if (ns.sigma_f_hz < 0) fail(path + ".sigma_f_hz", "must be >= 0");
  if (ns.sigma_delta_rad < 0) fail(path + ".sigma_delta_rad", "must be >= 0");
  if (ns.sigma_rocof_hz_s < 0) fail(path + ".sigma_rocof_hz_s", "must be >= 0");
  if (ns.pmu_rate_hz <= 0) fail(path + ".pmu_rate_hz", "must be > 0");
  return ns;
}

inline Scenario parse_scenario(const json& j, const std::string& path, std::size_t n) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown(j, path,
                 {"disturbance", "noise", "horizon_s", "dt_s", "feedforward"});
  Scenario sc;
  sc.disturbance = parse_disturbance(require(j, path, "disturbance"),
                                     path + ".disturbance", n);
  if (j.contains("noise")) sc.noise = parse_noise(j["noise"], path + ".noise");
  sc.horizon_s = num(require(j, path, "horizon_s"), path + ".horizon_s");
  if (sc.horizon_s <= 0) fail(path + ".horizon_s", "must be > 0");
  if (j.contains("dt_s")) sc.dt_s = num(j["dt_s"], path + ".dt_s");
  if (sc.dt_s <= 0) fail(path + ".dt_s", "must be > 0");
  if (sc.noise.enabled && sc.dt_s > 1.0 / (2.0 * sc.noise.pmu_rate_hz))
    fail(path + ".dt_s", "must be <= 1/(2*pmu_rate_hz) when noise is enabled");
  if (j.contains("feedforward")) {
    const std::string fp = path + ".feedforward";
    reject_unknown(j["feedforward"], fp, {"mode", "lag_s"});
    const std::string fm = str(require(j["feedforward"], fp, "mode"), fp + ".mode");
    if (fm == "true_value") sc.feedforward = FeedforwardMode::TrueValue;
    else if (fm == "delayed") sc.feedforward = FeedforwardMode::Delayed;
    else if (fm == "off") sc.feedforward = FeedforwardMode::Off;
    else fail(fp + ".mode", "expected one of true_value|delayed|off");
    if (j["feedforward"].contains("lag_s")) {
      sc.feedforward_lag_s = num(j["feedforward"]["lag_s"], fp + ".lag_s");
      if (sc.feedforward_lag_s < 0) fail(fp + ".lag_s", "must be >= 0");
    }
  }
  return sc;
}

}  // namespace iodetail

inline Config parse_config(const nlohmann::json& j) {
  using namespace iodetail;
  if (!j.is_object()) fail("$", "top level must be an object");
  reject_unknown(j, "$", {"schema", "system", "controller", "scenario", "output"});
  const std::string schema = str(require(j, "$", "schema"), "$.schema");
  if (schema != kConfigSchema)
    fail("$.schema", std::string("expected \"") + kConfigSchema + "\"");
  Config cfg;
  cfg.system = parse_system(require(j, "$", "system"), "$.system");
  const std::size_t n = cfg.system.areas.size();
  cfg.controller = parse_controller(require(j, "$", "controller"), "$.controller", n);
  cfg.scenario = parse_scenario(require(j, "$", "scenario"), "$.scenario", n);
  cfg.scenario.controller = cfg.controller.mode;
  if (cfg.controller.kd) cfg.scenario.kd = *cfg.controller.kd;
  if (j.contains("output")) {
    reject_unknown(j["output"], "$.output", {"decimation"});
    if (j["output"].contains("decimation")) {
      const auto& d = j["output"]["decimation"];
      if (!d.is_number_integer() || d.get<long long>() < 1)
        fail("$.output.decimation", "must be an integer >= 1");
      cfg.output.decimation = d.get<std::size_t>();
    }
  }
  // env override for the noise seed
  if (const char* env = std::getenv("OSCIDAMP_SEED"))
    cfg.scenario.noise.seed = std::strtoull(env, nullptr, 10);
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json serialize_config(const Config& cfg) {
  nlohmann::json j;
  j["schema"] = kConfigSchema;
  auto& sys = j["system"];
  sys["f_nom_hz"] = cfg.system.f_nom_hz;
  sys["areas"] = nlohmann::json::array();
  for (const auto& a : cfg.system.areas)
    sys["areas"].push_back({{"inertia_s", a.inertia_s}, {"damping_pu", a.damping_pu}});
  sys["ties"] = nlohmann::json::array();
  for (const auto& t : cfg.system.network.ties)
    sys["ties"].push_back({{"i", t.i + 1}, {"j", t.j + 1}, {"t_pu", t.torque_pu}});
  sys["stiffness_eps"] = cfg.system.network.stiffness_eps;

  auto& ctl = j["controller"];
  switch (cfg.controller.mode) {
    case ControllerMode::FD: ctl["mode"] = "fd"; break;
    case ControllerMode::SF: ctl["mode"] = "sf"; break;
    case ControllerMode::SdfExact: ctl["mode"] = "sdf_exact"; break;
    case ControllerMode::SdfMeasured: ctl["mode"] = "sdf_measured"; break;
  }
  if (cfg.controller.kd) ctl["kd"] = *cfg.controller.kd;
  ctl["lqr"] = {{"q_diag", cfg.controller.q_diag}, {"r_diag", cfg.controller.r_diag}};

  auto& sc = j["scenario"];
  auto& d = sc["disturbance"];
  if (std::holds_alternative<std::monostate>(cfg.scenario.disturbance)) {
    d["type"] = "none";
  } else if (const auto* s = std::get_if<StepLoad>(&cfg.scenario.disturbance)) {
    d = {{"type", "step_load"}, {"area", s->area + 1}, {"magnitude_pu", s->magnitude_pu},
         {"t_on_s", s->t_on_s}, {"t_off_s", s->t_off_s}};
  } else if (const auto* f = std::get_if<FaultPulse>(&cfg.scenario.disturbance)) {
    d = {{"type", "fault_pulse"}, {"area", f->area + 1},
         {"magnitude_pu", f->magnitude_pu}, {"t_on_s", f->t_on_s},
         {"duration_s", f->duration_s}};
  } else if (const auto* b = std::get_if<BurstLoad>(&cfg.scenario.disturbance)) {
    d = {{"type", "burst_load"}, {"area", b->area + 1}, {"low_pu", b->low_pu},
         {"high_pu", b->high_pu}, {"period_s", b->period_s}, {"duty", b->duty},
         {"t_start_s", b->t_start_s}, {"t_end_s", b->t_end_s}};
  }
  sc["noise"] = {{"enabled", cfg.scenario.noise.enabled},
                 {"sigma_f_hz", cfg.scenario.noise.sigma_f_hz},
                 {"sigma_delta_rad", cfg.scenario.noise.sigma_delta_rad},
                 {"sigma_rocof_hz_s", cfg.scenario.noise.sigma_rocof_hz_s},
                 {"pmu_rate_hz", cfg.scenario.noise.pmu_rate_hz},
                 {"seed", cfg.scenario.noise.seed}};
  sc["horizon_s"] = cfg.scenario.horizon_s;
  sc["dt_s"] = cfg.scenario.dt_s;
  const char* fm = cfg.scenario.feedforward == FeedforwardMode::TrueValue ? "true_value"
                   : cfg.scenario.feedforward == FeedforwardMode::Delayed ? "delayed"
                                                                          : "off";
  sc["feedforward"] = {{"mode", fm}, {"lag_s", cfg.scenario.feedforward_lag_s}};
  j["output"] = {{"decimation", cfg.output.decimation}};
  return j;
}

/// FNV-1a 64-bit over the canonical (sorted-key) config serialization.
inline std::uint64_t config_hash(const Config& cfg) {
  const std::string s = serialize_config(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvFingerprint {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double dt_s = 0.0;
};

inline void emit_csv(const Trajectory& traj, const std::string& path,
                     std::size_t decimation, const CsvFingerprint& fp) {
  if (decimation < 1) throw std::invalid_argument("emit_csv: decimation must be >= 1");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                static_cast<unsigned long long>(fp.config_hash));
  out << "# " << kConfigSchema << " trajectory\n";
  out << "# config_hash=" << hash_buf << "\n";
  out << "# seed=" << fp.seed << "\n";
  out << "# dt_s=" << format_double(fp.dt_s) << "\n";
  const std::size_t n = traj.n_areas;
  out << "t_s";
  for (std::size_t i = 0; i < n; ++i) out << ",delta_" << i + 1 << "_rad";
  for (std::size_t i = 0; i < n; ++i) out << ",f_" << i + 1 << "_hz";
  for (std::size_t i = 0; i < n; ++i) out << ",u_" << i + 1 << "_pu";
  for (std::size_t i = 0; i < n; ++i) out << ",dp_" << i + 1 << "_pu";
  out << "\n";
  for (std::size_t k = 0; k < traj.times.size(); k += decimation) {
    out << format_double(traj.times[k]);
    for (std::size_t i = 0; i < n; ++i) out << "," << format_double(traj.states[k][i]);
    for (std::size_t i = 0; i < n; ++i)
      out << "," << format_double(traj.f_nom_hz * traj.states[k][n + i]);
    for (std::size_t i = 0; i < n; ++i) out << "," << format_double(traj.controls[k][i]);
    for (std::size_t i = 0; i < n; ++i) out << "," << format_double(traj.dp[k][i]);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace iodetail {

struct ReferenceRow {
  const char* signal;
  double peak_fd, peak_sdf, t_fd, t_sdf, improvement;
};

// Published two-area benchmark comparison (FD vs SDF), kept for side-by-side
// reference in rendered tables. Not reproduced exactly here: the benchmark's
// FD gain and settling-band definition are not public.
inline constexpr ReferenceRow kTwoAreaReference[] = {
    {"delta_1 (rad)", 0.0043, 0.0026, 48.06, 23.53, 51.04},
    {"delta_2 (rad)", 0.0047, 0.0023, 47.76, 18.76, 60.72},
    {"f_1 (Hz)", 0.1093, 0.0840, 39.04, 24.27, 37.83},
    {"f_2 (Hz)", 0.0983, 0.0561, 39.69, 24.70, 37.77},
    {"f_21 (Hz)", 0.1011, 0.0929, 30.15, 25.02, 17.02},
};

inline std::string fmt_cell(double v, int prec = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace iodetail

struct RenderedTable {
  std::string text;
  std::string csv;
};

inline RenderedTable render_table(const ComparisonTable& cmp) {
  using iodetail::fmt_cell;
  std::ostringstream text, csv;
  const std::string pb = "Peak(" + cmp.base_name + ")";
  const std::string pt = "Peak(" + cmp.test_name + ")";
  const std::string tb = "T(" + cmp.base_name + ")";
  const std::string tt = "T(" + cmp.test_name + ")";

  csv << "signal,peak_" << cmp.base_name << ",peak_" << cmp.test_name << ",t_"
      << cmp.base_name << "_s,t_" << cmp.test_name << "_s,improvement_pct\n";

  char line[256];
  std::snprintf(line, sizeof line, "%-16s %12s %12s %10s %10s %14s\n", "Signal",
                pb.c_str(), pt.c_str(), tb.c_str(), tt.c_str(), "Improvement %");
  text << line;
  for (const auto& row : cmp.rows) {
    const std::string label = row.id.label();
    const std::string t_base = row.base.transient.settled
                                   ? fmt_cell(row.base.transient.time_s, 2)
                                   : fmt_cell(row.base.transient.time_s, 2) + "*";
    const std::string t_test = row.test.transient.settled
                                   ? fmt_cell(row.test.transient.time_s, 2)
                                   : fmt_cell(row.test.transient.time_s, 2) + "*";
    std::snprintf(line, sizeof line, "%-16s %12s %12s %10s %10s %14s\n", label.c_str(),
                  fmt_cell(row.base.peak).c_str(), fmt_cell(row.test.peak).c_str(),
                  t_base.c_str(), t_test.c_str(), fmt_cell(row.improvement_pct, 2).c_str());
    text << line;
    csv << label << "," << format_double(row.base.peak) << ","
        << format_double(row.test.peak) << "," << format_double(row.base.transient.time_s)
        << "," << format_double(row.test.transient.time_s) << ","
        << format_double(row.improvement_pct) << "\n";
  }

  // side-by-side reference block for the canonical two-area FD-vs-SDF layout
  if (cmp.base_name == "FD" && (cmp.test_name == "SDF" || cmp.test_name == "SDF_EXACT") &&
      cmp.rows.size() == 5) {
    text << "\nPublished two-area benchmark values (reference only; gain and "
            "settling band differ):\n";
    std::snprintf(line, sizeof line, "%-16s %12s %12s %10s %10s %14s\n", "Signal",
                  "Peak(FD)", "Peak(SDF)", "T(FD)", "T(SDF)", "Improvement %");
    text << line;
    for (const auto& ref : iodetail::kTwoAreaReference) {
      std::snprintf(line, sizeof line, "%-16s %12s %12s %10s %10s %14s\n", ref.signal,
                    fmt_cell(ref.peak_fd).c_str(), fmt_cell(ref.peak_sdf).c_str(),
                    fmt_cell(ref.t_fd, 2).c_str(), fmt_cell(ref.t_sdf, 2).c_str(),
                    fmt_cell(ref.improvement, 2).c_str());
      text << line;
    }
  }
  return {text.str(), csv.str()};
}

}  // namespace oscidamp
