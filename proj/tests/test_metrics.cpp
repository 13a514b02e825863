#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "oscidamp/metrics.hpp"

using namespace oscidamp;

namespace {

std::vector<double> sample_times(double horizon, double dt) {
  std::vector<double> t;
  for (double x = 0.0; x <= horizon + 1e-12; x += dt) t.push_back(x);
  return t;
}

}  // namespace

TEST_CASE("peak_deviation basics") {
  const auto t = sample_times(1.0, 0.001);
  CHECK(peak_deviation(t, std::vector<double>(t.size(), 0.0), 0.0) == 0.0);

  // e^{-t} sin(2 pi t): stationary point at tan(2 pi t) = 2 pi, i.e.
  // t = atan(2 pi)/(2 pi) ~ 0.2248 s, peak e^{-t} sin(2 pi t) ~ 0.78873
  std::vector<double> v;
  for (double x : t) v.push_back(std::exp(-x) * std::sin(2 * kPi * x));
  CHECK(peak_deviation(t, v, 0.0) == Catch::Approx(0.78873).margin(5e-4));

  // sign flip leaves the peak unchanged
  std::vector<double> w;
  for (double x : v) w.push_back(-x);
  CHECK(peak_deviation(t, w, 0.0) == peak_deviation(t, v, 0.0));

  // onset cut excludes earlier extrema
  CHECK(peak_deviation(t, v, 0.5) < peak_deviation(t, v, 0.0));
}

TEST_CASE("transient_time on exponential decay matches ln(50)") {
  const auto t = sample_times(20.0, 0.001);
  std::vector<double> v;
  for (double x : t) v.push_back(std::exp(-x));
  const TransientResult r = transient_time(t, v, 0.0, 0.02, 0.0);
  CHECK(r.settled);
  CHECK(r.time_s == Catch::Approx(std::log(50.0)).margin(2e-3));
}

TEST_CASE("transient_time trivial cases") {
  const auto t = sample_times(5.0, 0.01);
  const TransientResult zero = transient_time(t, std::vector<double>(t.size(), 0.0), 0.0);
  CHECK(zero.settled);
  CHECK(zero.time_s == 0.0);

  CHECK_THROWS_AS(transient_time({}, {}, 0.0), EmptySeries);
}

TEST_CASE("transient_time flags a never-settling signal") {
  const auto t = sample_times(10.0, 0.001);
  std::vector<double> v;
  for (double x : t) v.push_back(std::sin(2 * kPi * x));
  const TransientResult r = transient_time(t, v, 0.0, 0.02, 0.0);
  CHECK_FALSE(r.settled);
}

TEST_CASE("property: transient_time is monotone in the band") {
  const auto t = sample_times(20.0, 0.001);
  std::vector<double> v;
  for (double x : t) v.push_back(std::exp(-0.4 * x) * std::cos(3.0 * x));
  double prev = 1e18;
  for (double band : {0.01, 0.02, 0.05, 0.10, 0.20}) {
    const TransientResult r = transient_time(t, v, 0.0, band, 0.0);
    CHECK(r.time_s <= prev);
    prev = r.time_s;
  }
}

TEST_CASE("improvement_pct") {
  CHECK(improvement_pct(48.06, 23.53) == Catch::Approx(51.04).margin(0.01));
  CHECK(improvement_pct(39.69, 24.70) == Catch::Approx(37.77).margin(0.01));
  CHECK(improvement_pct(10.0, 10.0) == 0.0);
}

TEST_CASE("property: improvement antisymmetry up to the base factor") {
  for (double a : {5.0, 12.5, 48.06})
    for (double b : {3.0, 24.7, 60.0}) {
      const double fwd = improvement_pct(a, b);
      const double rev = improvement_pct(b, a);
      CHECK(fwd == Catch::Approx(-rev * (b / a)).margin(1e-9));
    }
}

TEST_CASE("trajectory_distance") {
  Trajectory a;
  a.n_areas = 1;
  a.times = {0.0, 0.1, 0.2};
  a.states = {{0, 0}, {1, 2}, {3, 4}};
  a.controls = {{0}, {0.5}, {0.25}};
  Trajectory b = a;
  CHECK(trajectory_distance(a, b).state_inf == 0.0);
  b.states[2][1] = 4.5;
  b.controls[1][0] = 0.75;
  const TrajectoryDistance d = trajectory_distance(a, b);
  CHECK(d.state_inf == Catch::Approx(0.5));
  CHECK(d.control_inf == Catch::Approx(0.25));

  Trajectory c = a;
  c.times[1] = 0.15;
  CHECK_THROWS_AS(trajectory_distance(a, c), GridMismatch);
  c.times = {0.0, 0.1};
  CHECK_THROWS_AS(trajectory_distance(a, c), GridMismatch);
}

TEST_CASE("extract_signal converts speeds to Hz and forms differences") {
  Trajectory traj;
  traj.n_areas = 2;
  traj.f_nom_hz = 60.0;
  traj.times = {0.0, 0.1};
  traj.states = {{0.1, 0.2, 0.001, 0.003}, {0.0, 0.0, 0.002, 0.001}};
  const auto delta1 = extract_signal(traj, {SignalKind::AngleRad, 0, 0});
  CHECK(delta1[0] == Catch::Approx(0.1));
  const auto f2 = extract_signal(traj, {SignalKind::FreqHz, 1, 0});
  CHECK(f2[0] == Catch::Approx(0.18));
  const auto f21 = extract_signal(traj, {SignalKind::FreqDiffHz, 1, 0});
  CHECK(f21[0] == Catch::Approx(0.12));
  CHECK(f21[1] == Catch::Approx(-0.06));
}

TEST_CASE("table_signals ordering matches the two-area benchmark layout") {
  const auto ids = table_signals(2, {{0, 1, 3.132}});
  REQUIRE(ids.size() == 5);
  CHECK(ids[0].label() == "delta_1 (rad)");
  CHECK(ids[1].label() == "delta_2 (rad)");
  CHECK(ids[2].label() == "f_1 (Hz)");
  CHECK(ids[3].label() == "f_2 (Hz)");
  CHECK(ids[4].label() == "f_21 (Hz)");
}
