#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "oscidamp/control.hpp"
#include "oscidamp/model.hpp"

using namespace oscidamp;

namespace {

PowerSystem two_area(double eps) {
  PowerSystem sys;
  sys.areas = {{6.0, 1.2}, {6.0, 1.2}};
  sys.network = {2, {{0, 1, 3.132}}, {eps, eps}};
  return sys;
}

StateSpace scalar_plant(double a, double b) {
  StateSpace ss;
  ss.a = Mat{{a}};
  ss.b = Mat{{b}};
  ss.n_areas = 1;
  return ss;
}

PowerSystem random_regular_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> um(2.0, 10.0), ud(0.3, 3.0), ut(0.5, 5.0),
      ue(0.03, 0.10);
  const std::size_t n = 2 + static_cast<std::size_t>(rng() % 2);
  PowerSystem sys;
  for (std::size_t i = 0; i < n; ++i) sys.areas.push_back({um(rng), ud(rng)});
  sys.network.n_areas = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sys.network.ties.push_back({i, j, ut(rng)});
  for (std::size_t i = 0; i < n; ++i) sys.network.stiffness_eps.push_back(ue(rng));
  return sys;
}

}  // namespace

TEST_CASE("fd_gain recovers the two-area frequency-difference law") {
  const Mat ks = fd_gain(2, {{0, 1, 3.132}}, 1.7);
  CHECK(ks(0, 0) == 0.0);
  CHECK(ks(0, 1) == 0.0);
  CHECK(ks(0, 2) == Catch::Approx(1.7));
  CHECK(ks(0, 3) == Catch::Approx(-1.7));
  CHECK(ks(1, 2) == Catch::Approx(-1.7));
  CHECK(ks(1, 3) == Catch::Approx(1.7));
}

TEST_CASE("fd_gain scales linearly in kd") {
  const Mat a = fd_gain(2, {{0, 1, 1.0}}, 0.5);
  CHECK(a(0, 2) == Catch::Approx(0.5));
  CHECK(a(0, 3) == Catch::Approx(-0.5));
}

TEST_CASE("fd_gain on a three-area ring is the ring Laplacian") {
  const Mat ks = fd_gain(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, 1.0);
  const double expect[3][3] = {{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(ks(i, 3 + j) == Catch::Approx(expect[i][j]));
}

TEST_CASE("fd_gain rows annihilate uniform speed offsets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.5, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 3);
    std::vector<TieCoeff> ties;
    for (std::size_t i = 0; i + 1 < n; ++i) ties.push_back({i, i + 1, ut(rng)});
    const Mat ks = fd_gain(n, ties, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += ks(i, n + j);
      CHECK(std::abs(row) < 1e-12);
    }
  }
}

TEST_CASE("lqr_gain matches the scalar closed form") {
  // a=-1, b=1, q=1, r=1: P solves P^2 + 2P - 1 = 0, Ks = sqrt(2) - 1
  const Mat ks = lqr_gain(scalar_plant(-1.0, 1.0), {Mat{{1}}, Mat{{1}}});
  CHECK(ks(0, 0) == Catch::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-10));
}

TEST_CASE("lqr_gain with zero state cost is zero") {
  const Mat ks = lqr_gain(scalar_plant(-2.0, 1.0), {Mat{{0}}, Mat{{1}}});
  CHECK(std::abs(ks(0, 0)) < 1e-12);
}

TEST_CASE("lqr_gain on the two-area benchmark satisfies the CARE") {
  const StateSpace ss = assemble_state_space(two_area(0.05));
  const LqrWeights w = default_lqr_weights(2);
  const Mat ks = lqr_gain(ss, w);
  const Mat p = lyapunov_solve(ss.a - ss.b * ks, w.q + ks.transpose() * (w.r * ks));
  CHECK(care_residual(ss, w, p).norm_inf() <= 1e-8 * w.q.norm_inf());
  CHECK(is_hurwitz(ss.a - ss.b * ks));
}

TEST_CASE("lqr_gain rejects an unstabilized seed on an unstable plant") {
  CHECK_THROWS_AS(lqr_gain(scalar_plant(1.0, 1.0), {Mat{{1}}, Mat{{1}}}), NotStabilizable);
}

TEST_CASE("lqr_gain accepts a caller-supplied stabilizing seed") {
  const Mat k0{{2.0}};  // a - b k0 = -1
  const Mat ks = lqr_gain(scalar_plant(1.0, 1.0), {Mat{{1}}, Mat{{1}}}, &k0);
  // P solves P^2 - 2P - 1 = 0, Ks = 1 + sqrt(2)
  CHECK(ks(0, 0) == Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("sdf_from_sf trivial and scalar oracles") {
  const StateSpace ss = assemble_state_space(two_area(0.05));
  const GainSet zero = sdf_from_sf(ss, Mat(2, 4), Mat::identity(2));
  CHECK(zero.kn.norm_inf() == 0.0);
  CHECK((zero.nn - Mat::identity(2)).norm_inf() == 0.0);

  // scalar: kn = k/(a - b k), nn = 1 + kn b
  const double k = std::sqrt(2.0) - 1.0;
  const GainSet g = sdf_from_sf(scalar_plant(-1.0, 1.0), Mat{{k}}, Mat{{1}});
  CHECK(g.kn(0, 0) == Catch::Approx(-0.292893).margin(1e-6));
  CHECK(g.nn(0, 0) == Catch::Approx(0.707107).margin(1e-6));
}

TEST_CASE("sdf_from_sf requires a nonsingular state matrix") {
  const StateSpace ss = assemble_state_space(two_area(0.0));
  CHECK_THROWS_AS(sdf_from_sf(ss, Mat(2, 4), Mat::identity(2)), SingularA);
}

TEST_CASE("validate_assumptions") {
  const StateSpace ss = assemble_state_space(two_area(0.05));
  const Mat ks = lqr_gain(ss, default_lqr_weights(2));
  const AssumptionReport ok = validate_assumptions(ss, ks);
  CHECK(ok.a_nonsingular);
  CHECK(ok.closed_loop_nonsingular);
  CHECK(ok.b_full_rank);

  const AssumptionReport singular_a =
      validate_assumptions(assemble_state_space(two_area(0.0)), Mat(2, 4));
  CHECK_FALSE(singular_a.a_nonsingular);
  CHECK(singular_a.b_full_rank);

  // degenerate input matrix with a zero column
  StateSpace bad = ss;
  for (std::size_t i = 0; i < 4; ++i) bad.b(i, 1) = 0.0;
  CHECK_FALSE(validate_assumptions(bad, ks).b_full_rank);
}

TEST_CASE("effective_sdf_gain scalar oracle and trivial case") {
  const StateSpace ss = scalar_plant(-1.0, 1.0);
  CHECK(effective_sdf_gain(ss, Mat{{0}}).norm_inf() == 0.0);
  CHECK(effective_sdf_gain(ss, Mat{{-0.292893}})(0, 0) ==
        Catch::Approx(0.414214).margin(1e-6));
}

TEST_CASE("effective_sdf_gain inverts the two-area SDF transform") {
  const StateSpace ss = assemble_state_space(two_area(0.05));
  const Mat ks = lqr_gain(ss, default_lqr_weights(2));
  const GainSet g = sdf_from_sf(ss, ks, Mat::identity(2));
  const Mat k_eff = effective_sdf_gain(ss, g.kn);
  CHECK((k_eff - ks).norm_inf() <= 1e-9 * ks.norm_inf());
}

TEST_CASE("property: gain round trip on randomized regular systems") {
  std::mt19937_64 rng(8675309);
  std::uniform_real_distribution<double> uq(0.1, 20.0), ur(0.5, 5.0);
  int done = 0;
  while (done < 100) {
    const PowerSystem sys = random_regular_system(rng);
    const StateSpace ss = assemble_state_space(sys);
    const std::size_t n = ss.n_areas;
    std::vector<double> qd(2 * n), rd(n);
    for (auto& v : qd) v = uq(rng);
    for (auto& v : rd) v = ur(rng);
    const Mat ks = lqr_gain(ss, {Mat::diagonal(qd), Mat::diagonal(rd)});
    const GainSet g = sdf_from_sf(ss, ks, Mat::identity(n));
    const Mat k_eff = effective_sdf_gain(ss, g.kn);
    CHECK((k_eff - ks).norm_inf() <= 1e-9 * ks.norm_inf());
    ++done;
  }
}

TEST_CASE("fd gains are a special case of state feedback for the SDF transform") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const PowerSystem sys = random_regular_system(rng);
    const StateSpace ss = assemble_state_space(sys);
    const Mat ks = fd_gain(ss.n_areas, sys.network.ties, 1.0 + (trial % 5));
    CHECK_NOTHROW(sdf_from_sf(ss, ks, Mat::identity(ss.n_areas)));
  }
}

TEST_CASE("is_hurwitz") {
  CHECK(is_hurwitz(Mat{{-1, 0}, {0, -2}}));
  CHECK_FALSE(is_hurwitz(Mat{{1}}));
  CHECK_FALSE(is_hurwitz(Mat{{0, 1}, {0, 0}}));  // double integrator, not Hurwitz
}
