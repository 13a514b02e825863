#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oscidamp/io.hpp"

namespace oscidamp {

struct DesignResult {
  GainSet gains;
  AssumptionReport assumptions;
  RegularityReport regularity;
  double kd = 0.0;  // FD gain actually used (tuned when not configured)
  StateSpace ss;
};

inline LqrWeights weights_from_spec(const ControllerSpec& c) {
  return {Mat::diagonal(c.q_diag), Mat::diagonal(c.r_diag)};
}

inline const char* controller_name(ControllerMode m) {
  switch (m) {
    case ControllerMode::FD: return "FD";
    case ControllerMode::SF: return "SF";
    case ControllerMode::SdfExact: return "SDF";
    case ControllerMode::SdfMeasured: return "SDF_MEASURED";
  }
  return "?";
}

/// Onset time of the configured disturbance; metrics windows start here.
inline double disturbance_onset(const DisturbanceProfile& d) {
  if (const auto* s = std::get_if<StepLoad>(&d)) return s->t_on_s;
  if (const auto* f = std::get_if<FaultPulse>(&d)) return f->t_on_s;
  if (const auto* b = std::get_if<BurstLoad>(&d)) return b->t_start_s;
  return 0.0;
}

/// Two-area FD baseline gain. The published benchmark table fixes the FD
/// baseline this library compares against, but not the gain that produced
/// it, so the gain is identified instead: grid-search kd over [0.1, 20]
/// minimizing the squared relative mismatch between the simulated FD peak
/// frequency deviations (per-area and pairwise difference) and the
/// benchmark's FD peaks. A linear refinement pass around the best grid
/// point sharpens the estimate.
inline double calibrate_fd_gain(const StateSpace& ss,
                                const std::vector<TieCoeff>& ties, Scenario sc,
                                double f_nom_hz,
                                std::size_t grid_points = 32) {
  sc.controller = ControllerMode::FD;
  sc.noise.enabled = false;
  const double onset = disturbance_onset(sc.disturbance);
  // peaks occur within a few oscillation periods of the onset; a short
  // window keeps the search cheap without moving the argmin
  sc.horizon_s = std::min(sc.horizon_s, onset + 15.0);
  const SignalId targets[] = {{SignalKind::FreqHz, 0, 0},
                              {SignalKind::FreqHz, 1, 0},
                              {SignalKind::FreqDiffHz, 1, 0}};
  const double ref_peaks[] = {iodetail::kTwoAreaReference[2].peak_fd,
                              iodetail::kTwoAreaReference[3].peak_fd,
                              iodetail::kTwoAreaReference[4].peak_fd};
  const auto mismatch = [&](double kd) {
    GainSet g;
    g.ks = fd_gain(2, ties, kd);
    g.ns = Mat::identity(2);
    g.mode = ControlMode::FD;
    const Trajectory t = simulate_closed_loop(ss, g, sc, f_nom_hz);
    double j = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      const double rel =
          peak_deviation(t.times, extract_signal(t, targets[s]), onset) /
              ref_peaks[s] -
          1.0;
      j += rel * rel;
    }
    return j;
  };
  const double lo = 0.1, hi = 20.0;
  double best_kd = lo, best_j = mismatch(lo);
  for (std::size_t k = 1; k < grid_points; ++k) {
    const double kd =
        lo * std::pow(hi / lo, static_cast<double>(k) / (grid_points - 1));
    const double j = mismatch(kd);
    if (j < best_j) {
      best_j = j;
      best_kd = kd;
    }
  }
  const double span = best_kd * 0.15;
  for (int k = -6; k <= 6; ++k) {
    const double kd = best_kd + span * k / 6.0;
    if (kd < lo || kd > hi || k == 0) continue;
    const double j = mismatch(kd);
    if (j < best_j) {
      best_j = j;
      best_kd = kd;
    }
  }
  return best_kd;
}

/// Build the gain set for the configured controller mode. FD without an
/// explicit kd is calibrated against the two-area benchmark when the system
/// has two areas, and otherwise grid-searched against the configured
/// scenario's quadratic cost.
inline DesignResult design_controller(const Config& cfg,
                                      std::optional<ControllerMode> override_mode = {}) {
  DesignResult res;
  res.ss = assemble_state_space(cfg.system);
  res.regularity = check_regularity(res.ss, cfg.system.network);
  const ControllerMode mode = override_mode.value_or(cfg.controller.mode);
  const std::size_t n = res.ss.n_areas;

  if ((mode == ControllerMode::SdfExact || mode == ControllerMode::SdfMeasured) &&
      res.regularity.a_singular) {
    std::string msg = "derivative feedback needs a nonsingular state matrix";
    if (res.regularity.suggested_eps)
      msg += "; smallest regularizing stiffness eps = " +
             std::to_string(*res.regularity.suggested_eps);
    throw SingularA(msg);
  }

  if (mode == ControllerMode::FD) {
    if (cfg.controller.kd) {
      res.kd = *cfg.controller.kd;
    } else if (n == 2) {
      res.kd = calibrate_fd_gain(res.ss, cfg.system.network.ties, cfg.scenario,
                                 cfg.system.f_nom_hz);
    } else {
      res.kd = tune_fd_gain(res.ss, cfg.system.network.ties, cfg.scenario,
                            weights_from_spec(cfg.controller));
    }
    res.gains.ks = fd_gain(n, cfg.system.network.ties, res.kd);
    res.gains.ns = Mat::identity(n);
    res.gains.mode = ControlMode::FD;
  } else {
    const Mat ks = lqr_gain(res.ss, weights_from_spec(cfg.controller));
    if (mode == ControllerMode::SF) {
      res.gains.ks = ks;
      res.gains.ns = Mat::identity(n);
      res.gains.mode = ControlMode::SF;
    } else {
      res.gains = sdf_from_sf(res.ss, ks, Mat::identity(n));
    }
  }
  res.assumptions = validate_assumptions(res.ss, res.gains.ks);
  return res;
}

inline Trajectory run_scenario(const Config& cfg,
                               std::optional<ControllerMode> override_mode = {}) {
  const DesignResult d = design_controller(cfg, override_mode);
  Scenario sc = cfg.scenario;
  sc.controller = override_mode.value_or(cfg.controller.mode);
  sc.kd = d.kd;
  return simulate_closed_loop(d.ss, d.gains, sc, cfg.system.f_nom_hz);
}

inline std::string describe_mat(const std::string& name, const Mat& m) {
  std::ostringstream os;
  os << name << " (" << m.rows() << "x" << m.cols() << "):\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << "  [";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "% .6f", m(i, j));
      os << buf << (j + 1 < m.cols() ? ", " : "");
    }
    os << "]\n";
  }
  return os.str();
}

inline std::string describe_design(const DesignResult& d, ControllerMode mode) {
  std::ostringstream os;
  os << "controller: " << controller_name(mode) << "\n";
  if (mode == ControllerMode::FD) os << "kd: " << format_double(d.kd) << "\n";
  os << describe_mat("Ks", d.gains.ks);
  if (d.gains.mode == ControlMode::SDF) {
    os << describe_mat("Ns", d.gains.ns);
    os << describe_mat("Kn", d.gains.kn);
    os << describe_mat("Nn", d.gains.nn);
  }
  os << "assumptions: A nonsingular=" << (d.assumptions.a_nonsingular ? "yes" : "no")
     << ", A-B*Ks nonsingular=" << (d.assumptions.closed_loop_nonsingular ? "yes" : "no")
     << ", B full column rank=" << (d.assumptions.b_full_rank ? "yes" : "no") << "\n";
  if (d.regularity.t_singular && d.regularity.suggested_eps)
    os << "hint: system is singular; smallest regularizing stiffness eps = "
       << *d.regularity.suggested_eps << "\n";
  return os.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

/// `simulate` command body: one trajectory CSV plus per-signal metrics.
inline void run_simulate(const Config& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Trajectory traj = run_scenario(cfg);
  const CsvFingerprint fp{config_hash(cfg), cfg.scenario.noise.seed, cfg.scenario.dt_s};
  emit_csv(traj, out_dir + "/trajectory.csv",  cfg.output.decimation, fp);

  const double onset = disturbance_onset(cfg.scenario.disturbance);

  std::ostringstream os;
  os << "signal,peak,transient_time_s,settled\n";
  for (const auto& id : table_signals(traj.n_areas, cfg.system.network.ties)) {
    const SignalMetrics m = signal_metrics(traj, id, onset);
    os << id.label() << "," << format_double(m.peak) << ","
       << format_double(m.transient.time_s) << "," << (m.transient.settled ? 1 : 0)
       << "\n";
  }
  write_text(out_dir + "/metrics.csv", os.str());
}

struct CompareResult {
  ComparisonTable table;
  RenderedTable rendered;
  Trajectory base_traj;
  Trajectory test_traj;
  double base_kd = 0.0;
};

/// `compare` command body: run two controllers on the same scenario and
/// produce the peak/transient comparison table.
inline CompareResult run_compare(const Config& cfg, ControllerMode base,
                                 ControllerMode test) {
  CompareResult res;
  const DesignResult db = design_controller(cfg, base);
  const DesignResult dt = design_controller(cfg, test);
  res.base_kd = db.kd;
  Scenario sc = cfg.scenario;
  sc.controller = base;
  sc.kd = db.kd;
  res.base_traj = simulate_closed_loop(db.ss, db.gains, sc, cfg.system.f_nom_hz);
  sc.controller = test;
  sc.kd = dt.kd;
  res.test_traj = simulate_closed_loop(dt.ss, dt.gains, sc, cfg.system.f_nom_hz);

  const double onset = disturbance_onset(cfg.scenario.disturbance);

  res.table = compare_trajectories(
      res.base_traj, res.test_traj,
      table_signals(res.base_traj.n_areas, cfg.system.network.ties), onset,
      controller_name(base), controller_name(test));
  res.rendered = render_table(res.table);
  return res;
}

/// Built-in two-area benchmark system: M = 6 s, D = 1.2, T12 = 3.132,
/// eps = 0.05, 60 Hz.
inline Config two_area_config() {
  Config cfg;
  cfg.system.areas = {{6.0, 1.2}, {6.0, 1.2}};
  cfg.system.network.n_areas = 2;
  cfg.system.network.ties = {{0, 1, 3.132}};
  cfg.system.network.stiffness_eps = {0.05, 0.05};
  cfg.system.f_nom_hz = 60.0;
  cfg.controller.mode = ControllerMode::SdfExact;
  const LqrWeights w = default_lqr_weights(2);
  for (std::size_t i = 0; i < 4; ++i) cfg.controller.q_diag.push_back(w.q(i, i));
  for (std::size_t i = 0; i < 2; ++i) cfg.controller.r_diag.push_back(w.r(i, i));
  cfg.scenario.disturbance = StepLoad{0, -0.01, 5.0, 7.0};
  cfg.scenario.horizon_s = 80.0;
  cfg.scenario.dt_s = 1e-3;
  cfg.scenario.controller = ControllerMode::SdfExact;
  return cfg;
}

/// Symmetric three-area stand-in (ring of identical areas). The published
/// three-area parameters live in an external reference; these defaults are
/// editable placeholders, not ground truth.
inline Config three_area_config() {
  Config cfg;
  cfg.system.areas = {{6.0, 1.2}, {6.0, 1.2}, {6.0, 1.2}};
  cfg.system.network.n_areas = 3;
  cfg.system.network.ties = {{0, 1, 3.132}, {1, 2, 3.132}, {0, 2, 3.132}};
  cfg.system.network.stiffness_eps = {0.05, 0.05, 0.05};
  cfg.system.f_nom_hz = 60.0;
  cfg.controller.mode = ControllerMode::SdfExact;
  const LqrWeights w = default_lqr_weights(3);
  for (std::size_t i = 0; i < 6; ++i) cfg.controller.q_diag.push_back(w.q(i, i));
  for (std::size_t i = 0; i < 3; ++i) cfg.controller.r_diag.push_back(w.r(i, i));
  cfg.scenario.disturbance = BurstLoad{0, 0.03, 0.18, 4.0, 0.5, 0.0, 40.0};
  cfg.scenario.horizon_s = 80.0;
  cfg.scenario.dt_s = 1e-3;
  cfg.scenario.controller = ControllerMode::SdfExact;
  return cfg;
}

/// Experiment presets: a = small load step, b = short fault pulse (both on
/// the two-area system), c = data-center burst load on the three-area system.
inline Config experiment_config(char experiment) {
  switch (experiment) {
    case 'a':
      return two_area_config();
    case 'b': {
      Config cfg = two_area_config();
      cfg.scenario.disturbance = FaultPulse{0, -0.02, 5.0, 0.1};
      return cfg;
    }
    case 'c':
      return three_area_config();
    default:
      throw ValidationError("experiment must be one of a|b|c");
  }
}

/// `reproduce` command body: run FD, SF, and SDF on the preset scenario and
/// write one CSV per controller plus the FD-vs-SDF comparison table.
inline void run_reproduce(char experiment, const std::string& out_dir) {
  const Config cfg = experiment_config(experiment);
  std::filesystem::create_directories(out_dir);
  const CsvFingerprint fp{config_hash(cfg), cfg.scenario.noise.seed, cfg.scenario.dt_s};

  const CompareResult cmp = run_compare(cfg, ControllerMode::FD, ControllerMode::SdfExact);
  const Trajectory sf = run_scenario(cfg, ControllerMode::SF);

  const std::string prefix = out_dir + "/experiment_" + experiment;
  emit_csv(cmp.base_traj, prefix + "_fd.csv", cfg.output.decimation, fp);
  emit_csv(sf, prefix + "_sf.csv", cfg.output.decimation, fp);
  emit_csv(cmp.test_traj, prefix + "_sdf.csv", cfg.output.decimation, fp);
  write_text(prefix + "_table.txt", cmp.rendered.text);
  write_text(prefix + "_table.csv", cmp.rendered.csv);
}

struct VerifyReport {
  bool passed = true;
  std::string log;
};

/// `verify` command body: the library's invariants run against a loaded
/// config — regularity equivalence, CARE residual, Hurwitz closed loop,
/// gain round trip, SF/SDF trajectory equivalence, determinism.
inline VerifyReport run_verify(const Config& cfg) {
  VerifyReport rep;
  std::ostringstream log;
  auto check = [&](const std::string& name, bool ok) {
    log << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    rep.passed = rep.passed && ok;
  };

  const StateSpace ss = assemble_state_space(cfg.system);
  const std::size_t n = ss.n_areas;

  // regularity equivalence on the configured system and randomized variants
  bool prop_ok = true;
  try {
    check_regularity(ss, cfg.system.network);
  } catch (const InconsistentRegularity&) {
    prop_ok = false;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> um(2.0, 10.0), ud(0.3, 3.0), ut(1.0, 5.0),
      ue(0.03, 0.10);
  for (int trial = 0; trial < 50 && prop_ok; ++trial) {
    PowerSystem sys = cfg.system;
    for (auto& a : sys.areas) {
      a.inertia_s = um(rng);
      a.damping_pu = ud(rng);
    }
    for (auto& t : sys.network.ties) t.torque_pu = ut(rng);
    for (auto& e : sys.network.stiffness_eps) e = (trial % 5 == 0) ? 0.0 : ue(rng);
    try {
      check_regularity(assemble_state_space(sys), sys.network);
    } catch (const InconsistentRegularity&) {
      prop_ok = false;
    }
  }
  check("regularity: A and T singularity agree (randomized)", prop_ok);

  const LqrWeights w = weights_from_spec(cfg.controller);
  const Mat ks = lqr_gain(ss, w);
  const Mat p = lyapunov_solve(ss.a - ss.b * ks, w.q + ks.transpose() * (w.r * ks));
  check("care: residual <= 1e-8 * |Q|_inf",
        care_residual(ss, w, p).norm_inf() <= 1e-8 * w.q.norm_inf());
  check("care: closed loop Hurwitz", is_hurwitz(ss.a - ss.b * ks));

  const GainSet g = sdf_from_sf(ss, ks, Mat::identity(n));
  const Mat k_eff = effective_sdf_gain(ss, g.kn);
  check("gain round trip: |K_eff - Ks| <= 1e-9 * |Ks|",
        (k_eff - ks).norm_inf() <= 1e-9 * ks.norm_inf());

  Scenario sc = cfg.scenario;
  sc.noise.enabled = false;
  GainSet sf_gains;
  sf_gains.ks = ks;
  sf_gains.ns = Mat::identity(n);
  sf_gains.mode = ControlMode::SF;
  sc.controller = ControllerMode::SF;
  const Trajectory tr_sf = simulate_closed_loop(ss, sf_gains, sc, cfg.system.f_nom_hz);
  sc.controller = ControllerMode::SdfExact;
  const Trajectory tr_sdf = simulate_closed_loop(ss, g, sc, cfg.system.f_nom_hz);
  const TrajectoryDistance dist = trajectory_distance(tr_sf, tr_sdf);
  check("equivalence: SF vs SDF state distance <= 1e-8", dist.state_inf <= 1e-8);
  check("equivalence: SF vs SDF control distance <= 1e-8", dist.control_inf <= 1e-8);

  Scenario sc_noise = cfg.scenario;
  sc_noise.noise.enabled = true;
  sc_noise.controller = ControllerMode::SdfMeasured;
  const Trajectory na = simulate_closed_loop(ss, g, sc_noise, cfg.system.f_nom_hz);
  const Trajectory nb = simulate_closed_loop(ss, g, sc_noise, cfg.system.f_nom_hz);
  check("determinism: identical seed reproduces the trajectory",
        trajectory_distance(na, nb).state_inf == 0.0);

  rep.log = log.str();
  return rep;
}

}  // namespace oscidamp
