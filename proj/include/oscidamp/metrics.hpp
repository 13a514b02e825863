#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "oscidamp/sim.hpp"

namespace oscidamp {

struct EmptySeries : NumericError {
  using NumericError::NumericError;
};

struct GridMismatch : NumericError {
  using NumericError::NumericError;
};

/// max |value| over t >= t_from.
inline double peak_deviation(const std::vector<double>& times,
                             const std::vector<double>& values, double t_from) {
  double peak = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= t_from) peak = std::max(peak, std::abs(values[k]));
  return peak;
}

struct TransientResult {
  double time_s = 0.0;
  bool settled = true;
};

/// Settling time: smallest t* >= onset with |value(t) - final| within
/// max(band * peak, floor) for all t >= t*. The final value is the mean over
/// the trailing 5% of the horizon; the comparison tables use band = 2%.
inline TransientResult transient_time(const std::vector<double>& times,
                                      const std::vector<double>& values, double onset,
                                      double band = 0.02, double floor_abs = 0.0) {
  if (times.empty() || times.size() != values.size())
    throw EmptySeries("transient_time: empty or mismatched series");
  const double horizon = times.back();
  double final_sum = 0.0;
  std::size_t final_count = 0;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= horizon - 0.05 * (horizon - times.front())) {
      final_sum += values[k];
      ++final_count;
    }
  const double final_value = final_sum / static_cast<double>(final_count);
  const double peak = peak_deviation(times, values, onset);
  const double tol = std::max(band * peak, floor_abs);

  // scan backwards to the last sample violating the band
  std::size_t first_ok = 0;
  for (std::size_t k = times.size(); k-- > 0;) {
    if (times[k] < onset) break;
    if (std::abs(values[k] - final_value) > tol) {
      first_ok = k + 1;
      break;
    }
  }
  if (first_ok >= times.size()) return {horizon, false};
  return {std::max(times[first_ok], onset) - onset, true};
}

inline double improvement_pct(double t_base, double t_test) {
  return (t_base - t_test) / t_base * 100.0;
}

struct TrajectoryDistance {
  double state_inf = 0.0;
  double control_inf = 0.0;
};

inline TrajectoryDistance trajectory_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size())
    throw GridMismatch("trajectory_distance: time grids differ");
  for (std::size_t k = 0; k < a.times.size(); ++k)
    if (a.times[k] != b.times[k])
      throw GridMismatch("trajectory_distance: time grids differ");
  TrajectoryDistance d;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    for (std::size_t i = 0; i < a.states[k].size(); ++i)
      d.state_inf = std::max(d.state_inf, std::abs(a.states[k][i] - b.states[k][i]));
    for (std::size_t i = 0; i < a.controls[k].size(); ++i)
      d.control_inf =
          std::max(d.control_inf, std::abs(a.controls[k][i] - b.controls[k][i]));
  }
  return d;
}

enum class SignalKind { AngleRad, FreqHz, FreqDiffHz };

struct SignalId {
  SignalKind kind = SignalKind::AngleRad;
  std::size_t i = 0;  // area index (0-based)
  std::size_t j = 0;  // second area for FreqDiffHz (signal is f_i - f_j)

  std::string label() const {
    switch (kind) {
      case SignalKind::AngleRad:
        return "delta_" + std::to_string(i + 1) + " (rad)";
      case SignalKind::FreqHz:
        return "f_" + std::to_string(i + 1) + " (Hz)";
      case SignalKind::FreqDiffHz:
      default:
        return "f_" + std::to_string(i + 1) + std::to_string(j + 1) + " (Hz)";
    }
  }

  double floor_abs() const {
    return 1e-4;  // 1e-4 rad for angles, 1e-4 Hz for frequencies
  }
};

/// Extract one scalar signal from a trajectory. Frequency signals are
/// reported in Hz via Δf = f_nom · Δω; difference signals are formed
/// post-hoc from stored states.
inline std::vector<double> extract_signal(const Trajectory& traj, const SignalId& id) {
  std::vector<double> out;
  out.reserve(traj.times.size());
  const std::size_t n = traj.n_areas;
  for (const auto& x : traj.states) {
    switch (id.kind) {
      case SignalKind::AngleRad:
        out.push_back(x[id.i]);
        break;
      case SignalKind::FreqHz:
        out.push_back(traj.f_nom_hz * x[n + id.i]);
        break;
      case SignalKind::FreqDiffHz:
        out.push_back(traj.f_nom_hz * (x[n + id.i] - x[n + id.j]));
        break;
    }
  }
  return out;
}

struct SignalMetrics {
  SignalId id;
  double peak = 0.0;
  TransientResult transient;
};

inline SignalMetrics signal_metrics(const Trajectory& traj, const SignalId& id,
                                    double onset, double band = 0.02) {
  const std::vector<double> v = extract_signal(traj, id);
  SignalMetrics m;
  m.id = id;
  m.peak = peak_deviation(traj.times, v, onset);
  m.transient = transient_time(traj.times, v, onset, band, id.floor_abs());
  return m;
}

/// Canonical comparison signals: all angles, all frequencies, then tie-line
/// frequency differences f_j - f_i per tie (two-area: Δδ1, Δδ2, Δf1, Δf2, Δf21).
inline std::vector<SignalId> table_signals(std::size_t n_areas,
                                           const std::vector<TieCoeff>& ties) {
  std::vector<SignalId> ids;
  for (std::size_t i = 0; i < n_areas; ++i) ids.push_back({SignalKind::AngleRad, i, 0});
  for (std::size_t i = 0; i < n_areas; ++i) ids.push_back({SignalKind::FreqHz, i, 0});
  for (const auto& t : ties) {
    const std::size_t lo = std::min(t.i, t.j), hi = std::max(t.i, t.j);
    ids.push_back({SignalKind::FreqDiffHz, hi, lo});
  }
  return ids;
}

struct ComparisonRow {
  SignalId id;
  SignalMetrics base;
  SignalMetrics test;
  double improvement_pct = 0.0;  // on transient time, base relative
};

struct ComparisonTable {
  std::string base_name;
  std::string test_name;
  std::vector<ComparisonRow> rows;
};

inline ComparisonTable compare_trajectories(const Trajectory& base, const Trajectory& test,
                                            const std::vector<SignalId>& signals,
                                            double onset, std::string base_name,
                                            std::string test_name, double band = 0.02) {
  ComparisonTable table;
  table.base_name = std::move(base_name);
  table.test_name = std::move(test_name);
  for (const auto& id : signals) {
    ComparisonRow row;
    row.id = id;
    row.base = signal_metrics(base, id, onset, band);
    row.test = signal_metrics(test, id, onset, band);
    row.improvement_pct =
        improvement_pct(row.base.transient.time_s, row.test.transient.time_s);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace oscidamp
