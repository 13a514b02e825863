#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "oscidamp/control.hpp"
#include "oscidamp/matkit.hpp"
#include "oscidamp/model.hpp"

namespace oscidamp {

struct Diverged : NumericError {
  using NumericError::NumericError;
};

inline constexpr double kPi = 3.14159265358979323846;

struct StepLoad {
  std::size_t area = 0;
  double magnitude_pu = 0.0;
  double t_on_s = 0.0;
  double t_off_s = 0.0;
};

struct FaultPulse {
  std::size_t area = 0;
  double magnitude_pu = 0.0;
  double t_on_s = 0.0;
  double duration_s = 0.0;
};

struct BurstLoad {
  std::size_t area = 0;
  double low_pu = 0.0;
  double high_pu = 0.0;
  double period_s = 0.0;
  double duty = 0.5;  // fraction of each period spent at the high level
  double t_start_s = 0.0;
  double t_end_s = 0.0;
};

using DisturbanceProfile = std::variant<std::monostate, StepLoad, FaultPulse, BurstLoad>;

inline std::vector<double> eval_disturbance(const DisturbanceProfile& p, double t,
                                            std::size_t n_areas) {
  std::vector<double> dp(n_areas, 0.0);
  if (const auto* s = std::get_if<StepLoad>(&p)) {
    if (t >= s->t_on_s && t < s->t_off_s) dp[s->area] = s->magnitude_pu;
  } else if (const auto* f = std::get_if<FaultPulse>(&p)) {
    if (t >= f->t_on_s && t < f->t_on_s + f->duration_s) dp[f->area] = f->magnitude_pu;
  } else if (const auto* b = std::get_if<BurstLoad>(&p)) {
    if (t >= b->t_start_s && t <= b->t_end_s) {
      const double phase = std::fmod(t - b->t_start_s, b->period_s);
      dp[b->area] = phase < b->duty * b->period_s ? b->high_pu : b->low_pu;
    }
  }
  return dp;
}

/// Allocation-free variant for the simulation hot loop.
inline void eval_disturbance_into(const DisturbanceProfile& p, double t,
                                  std::vector<double>& dp) {
  std::fill(dp.begin(), dp.end(), 0.0);
  if (const auto* s = std::get_if<StepLoad>(&p)) {
    if (t >= s->t_on_s && t < s->t_off_s) dp[s->area] = s->magnitude_pu;
  } else if (const auto* f = std::get_if<FaultPulse>(&p)) {
    if (t >= f->t_on_s && t < f->t_on_s + f->duration_s) dp[f->area] = f->magnitude_pu;
  } else if (const auto* b = std::get_if<BurstLoad>(&p)) {
    if (t >= b->t_start_s && t <= b->t_end_s) {
      const double phase = std::fmod(t - b->t_start_s, b->period_s);
      dp[b->area] = phase < b->duty * b->period_s ? b->high_pu : b->low_pu;
    }
  }
}

/// PMU noise model: fresh Gaussian draws at frame instants, sample-and-hold
/// between frames. Sigmas follow steady-state PMU accuracy limits
/// (3σ_f <= 0.005 Hz, 3σ_δ <= 0.573°); frequency-domain sigmas convert to
/// per-unit speed by dividing by the nominal frequency.
struct NoiseSpec {
  bool enabled = false;
  double sigma_f_hz = 0.005 / 3.0;
  double sigma_delta_rad = 0.573 * kPi / 180.0 / 3.0;
  // first difference of two frequency frames, unless configured otherwise
  double sigma_rocof_hz_s = (0.005 / 3.0) * 60.0 * std::sqrt(2.0);
  double pmu_rate_hz = 60.0;
  std::uint64_t seed = 0;
};

enum class ControllerMode { FD, SF, SdfExact, SdfMeasured };

enum class FeedforwardMode { TrueValue, Delayed, Off };

struct Scenario {
  DisturbanceProfile disturbance;
  NoiseSpec noise;
  double horizon_s = 80.0;
  double dt_s = 1e-3;
  ControllerMode controller = ControllerMode::SF;
  double kd = 1.0;  // only used by ControllerMode::FD
  FeedforwardMode feedforward = FeedforwardMode::TrueValue;
  double feedforward_lag_s = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;    // (Δδ rad..., Δω p.u....)
  std::vector<std::vector<double>> controls;  // u p.u.
  std::vector<std::vector<double>> measured;  // feedback signal fed to the law
  std::vector<std::vector<double>> dp;        // applied ΔP p.u.
  std::size_t n_areas = 0;
  double f_nom_hz = 60.0;
};

namespace simdetail {

/// d = A·s + B·v, written into a caller-owned buffer.
inline void deriv_into(const StateSpace& ss, const std::vector<double>& s,
                       const std::vector<double>& v, std::vector<double>& d) {
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += ss.a(i, j) * s[j];
    for (std::size_t j = 0; j < v.size(); ++j) acc += ss.b(i, j) * v[j];
    d[i] = acc;
  }
}

/// Scratch buffers so the integrator allocates nothing per step.
struct Rk4Work {
  std::vector<double> k1, k2, k3, k4, stage;
  explicit Rk4Work(std::size_t dim) : k1(dim), k2(dim), k3(dim), k4(dim), stage(dim) {}
};

/// In-place classical RK4 update; `next` may not alias `x`.
inline void rk4_step_into(const StateSpace& ss, const std::vector<double>& x,
                          const std::vector<double>& u_plus_dp, double dt,
                          Rk4Work& w, std::vector<double>& next) {
  const std::size_t n = x.size();
  deriv_into(ss, x, u_plus_dp, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + dt / 2 * w.k1[i];
  deriv_into(ss, w.stage, u_plus_dp, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + dt / 2 * w.k2[i];
  deriv_into(ss, w.stage, u_plus_dp, w.k3);
  for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + dt * w.k3[i];
  deriv_into(ss, w.stage, u_plus_dp, w.k4);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = x[i] + dt / 6.0 * (w.k1[i] + 2 * w.k2[i] + 2 * w.k3[i] + w.k4[i]);
    if (std::abs(next[i]) > 1e6) throw Diverged("rk4_step: state magnitude exceeds 1e6");
  }
}

}  // namespace simdetail

/// Classical RK4 update of ẋ = Ax + B·v with v held constant over the step.
inline std::vector<double> rk4_step(const StateSpace& ss, const std::vector<double>& x,
                                    const std::vector<double>& u_plus_dp, double dt) {
  simdetail::Rk4Work w(x.size());
  std::vector<double> next(x.size());
  simdetail::rk4_step_into(ss, x, u_plus_dp, dt, w, next);
  return next;
}

/// Sample-and-hold PMU measurement channel for states and their derivatives.
class PmuSampler {
 public:
  PmuSampler(const NoiseSpec& spec, std::size_t n_areas, double f_nom_hz)
      : spec_(spec), n_(n_areas), f_nom_(f_nom_hz), rng_(spec.seed) {}

  void measure(const std::vector<double>& x_true, const std::vector<double>& xdot_true,
               double t, std::vector<double>& x_meas, std::vector<double>& xdot_meas) {
    if (!spec_.enabled) {
      x_meas = x_true;
      xdot_meas = xdot_true;
      return;
    }
    const double frame_dt = 1.0 / spec_.pmu_rate_hz;
    if (t + 1e-12 >= next_frame_ * frame_dt) {
      const double sig_w = spec_.sigma_f_hz / f_nom_;          // speed, p.u.
      const double sig_wd = spec_.sigma_rocof_hz_s / f_nom_;   // acceleration, p.u./s
      held_x_ = x_true;
      held_xdot_ = xdot_true;
      for (std::size_t i = 0; i < n_; ++i) {
        held_x_[i] += spec_.sigma_delta_rad * gauss_(rng_);
        held_x_[n_ + i] += sig_w * gauss_(rng_);
        held_xdot_[i] += sig_w * gauss_(rng_);      // Δδ̇ = Δω, frequency-grade
        held_xdot_[n_ + i] += sig_wd * gauss_(rng_);
      }
      while (t + 1e-12 >= next_frame_ * frame_dt) ++next_frame_;
    }
    x_meas = held_x_;
    xdot_meas = held_xdot_;
  }

 private:
  NoiseSpec spec_;
  std::size_t n_;
  double f_nom_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  long next_frame_ = 0;
  std::vector<double> held_x_;
  std::vector<double> held_xdot_;
};

inline Trajectory simulate_closed_loop(const StateSpace& ss, const GainSet& gains,
                                       const Scenario& sc, double f_nom_hz = 60.0) {
  const std::size_t n = ss.n_areas;
  const std::size_t dim = 2 * n;
  const std::size_t n_steps = static_cast<std::size_t>(std::floor(sc.horizon_s / sc.dt_s));

  // SdfExact resolves the algebraic loop once, up front; the disturbance
  // cancels exactly in the loop-resolved form.
  Mat fb = gains.ks;
  if (sc.controller == ControllerMode::SdfExact) fb = effective_sdf_gain(ss, gains.kn);
  const Mat& kn = gains.kn;
  const Mat kn_b = sc.controller == ControllerMode::SdfMeasured ? kn * ss.b : Mat();

  Trajectory traj;
  traj.n_areas = n;
  traj.f_nom_hz = f_nom_hz;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.controls.reserve(n_steps + 1);
  traj.measured.reserve(n_steps + 1);
  traj.dp.reserve(n_steps + 1);

  PmuSampler sampler(sc.noise, n, f_nom_hz);
  std::vector<double> x(dim, 0.0), x_next(dim);
  std::vector<double> x_meas(dim), xdot_meas(dim);
  std::vector<double> dp(n), dph(n), u(n), v(n);
  std::vector<double> last_xdot(dim);  // held derivative for the RoCoF path
  simdetail::Rk4Work work(dim);

  auto dp_estimate_into = [&](double t, std::vector<double>& out) {
    switch (sc.feedforward) {
      case FeedforwardMode::TrueValue:
        eval_disturbance_into(sc.disturbance, t, out);
        break;
      case FeedforwardMode::Delayed: {
        const double tl = t - sc.feedforward_lag_s;
        if (tl >= 0.0)
          eval_disturbance_into(sc.disturbance, tl, out);
        else
          std::fill(out.begin(), out.end(), 0.0);
        break;
      }
      case FeedforwardMode::Off:
      default:
        std::fill(out.begin(), out.end(), 0.0);
        break;
    }
  };

  eval_disturbance_into(sc.disturbance, 0.0, dp);
  simdetail::deriv_into(ss, x, dp, last_xdot);

  for (std::size_t step = 0; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * sc.dt_s;
    eval_disturbance_into(sc.disturbance, t, dp);
    sampler.measure(x, last_xdot, t, x_meas, xdot_meas);

    if (sc.controller == ControllerMode::SdfMeasured) {
      // u = -Kn·ẋ_meas + Kn·B·ΔP̂, with ẋ_meas held from the previous frame
      dp_estimate_into(t, dph);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc -= kn(i, j) * xdot_meas[j];
        for (std::size_t j = 0; j < n; ++j) acc += kn_b(i, j) * dph[j];
        u[i] = acc;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc -= fb(i, j) * x_meas[j];
        u[i] = acc;
      }
    }

    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.controls.push_back(u);
    traj.measured.push_back(sc.controller == ControllerMode::SdfMeasured ? xdot_meas
                                                                         : x_meas);
    traj.dp.push_back(dp);

    if (step == n_steps) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] + dp[i];
    simdetail::deriv_into(ss, x, v, last_xdot);
    simdetail::rk4_step_into(ss, x, v, sc.dt_s, work, x_next);
    x.swap(x_next);
  }
  return traj;
}

/// Grid search for the FD gain over kd in [0.1, 20]: minimizes the same
/// quadratic cost ∫(xᵀQx + uᵀRu)dt used by the LQR design, evaluated on the
/// given scenario. Penalty-free objectives (integrated squared frequency
/// difference, or state norm alone) are monotone in kd and saturate at the
/// grid edge; the control penalty gives an interior optimum and makes the
/// FD baseline the best gain of its structure under the comparison metric.
inline double tune_fd_gain(const StateSpace& ss, const std::vector<TieCoeff>& ties,
                           Scenario sc, const LqrWeights& w,
                           std::size_t grid_points = 64) {
  sc.controller = ControllerMode::FD;
  sc.noise.enabled = false;
  // cost is dominated by the first few oscillation periods; a 40 s window
  // keeps the search cheap without changing the argmin
  sc.horizon_s = std::min(sc.horizon_s, 40.0);
  double best_kd = 0.1;
  double best_cost = std::numeric_limits<double>::infinity();
  const double lo = std::log(0.1), hi = std::log(20.0);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double kd = std::exp(lo + (hi - lo) * static_cast<double>(g) /
                                        static_cast<double>(grid_points - 1));
    GainSet gains;
    gains.ks = fd_gain(ss.n_areas, ties, kd);
    gains.ns = Mat::identity(ss.n_areas);
    gains.mode = ControlMode::FD;
    double cost = 0.0;
    try {
      const Trajectory traj = simulate_closed_loop(ss, gains, sc);
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& x = traj.states[k];
        const auto& u = traj.controls[k];
        double q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) q += w.q(i, i) * x[i] * x[i];
        for (std::size_t i = 0; i < u.size(); ++i) q += w.r(i, i) * u[i] * u[i];
        cost += q * sc.dt_s;
      }
    } catch (const Diverged&) {
      continue;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_kd = kd;
    }
  }
  return best_kd;
}

}  // namespace oscidamp
