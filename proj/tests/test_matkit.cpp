#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "oscidamp/matkit.hpp"

using namespace oscidamp;

namespace {

// two-area system matrix with zero self-stiffness: columns 0 and 1 are
// negatives of each other, so it is exactly singular
const Mat kTwoAreaSingularA{{0, 0, 1, 0},
                            {0, 0, 0, 1},
                            {-0.522, 0.522, -0.2, 0},
                            {0.522, -0.522, 0, -0.2}};

Mat random_well_conditioned(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = u(rng);
      row_sum += std::abs(a(i, j));
    }
    a(i, i) += (a(i, i) >= 0 ? 1 : -1) * (row_sum + 1.0);  // diagonal dominance
  }
  return a;
}

}  // namespace

TEST_CASE("lu_solve identity returns rhs") {
  const Mat b{{1.5}, {-2.0}, {7.25}};
  const Mat x = lu_solve(Mat::identity(3), b);
  for (std::size_t i = 0; i < 3; ++i) CHECK(x(i, 0) == b(i, 0));
}

TEST_CASE("lu_solve diagonal system") {
  const Mat x = lu_solve(Mat{{2, 0}, {0, 4}}, Mat{{2}, {8}});
  CHECK(x(0, 0) == Catch::Approx(1.0));
  CHECK(x(1, 0) == Catch::Approx(2.0));
}

TEST_CASE("lu_solve rejects the singular two-area matrix") {
  CHECK_THROWS_AS(lu_solve(kTwoAreaSingularA, Mat{{1}, {0}, {0}, {0}}), SingularMatrix);
}

TEST_CASE("lu_solve needs a pivoted elimination") {
  // leading zero pivot, still well conditioned
  const Mat a{{0, 1}, {1, 0}};
  const Mat x = lu_solve(a, Mat{{3}, {5}});
  CHECK(x(0, 0) == Catch::Approx(5.0));
  CHECK(x(1, 0) == Catch::Approx(3.0));
}

TEST_CASE("inverse of identity and diagonal") {
  const Mat i4 = inverse(Mat::identity(4));
  CHECK((i4 - Mat::identity(4)).norm_inf() == 0.0);
  const Mat d = inverse(Mat{{2, 0}, {0, 0.5}});
  CHECK(d(0, 0) == Catch::Approx(0.5));
  CHECK(d(1, 1) == Catch::Approx(2.0));
}

TEST_CASE("inverse of an upper-triangular 2x2") {
  const Mat inv = inverse(Mat{{1, 1}, {0, 1}});
  CHECK(inv(0, 0) == Catch::Approx(1.0));
  CHECK(inv(0, 1) == Catch::Approx(-1.0));
  CHECK(inv(1, 0) == Catch::Approx(0.0));
  CHECK(inv(1, 1) == Catch::Approx(1.0));
}

TEST_CASE("inverse residual bound on random well-conditioned matrices") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 9);
    const Mat a = random_well_conditioned(rng, n);
    const Mat r = a * inverse(a) - Mat::identity(n);
    CHECK(r.norm_inf() <= 1e-9);
  }
}

TEST_CASE("rank_deficient flags the singular cases") {
  CHECK(rank_deficient(kTwoAreaSingularA));
  CHECK(rank_deficient(Mat(3, 3)));  // zero matrix
  // self-stiffness eps = 0.05 makes the two-area matrix regular
  Mat regular = kTwoAreaSingularA;
  regular(2, 0) = -0.5481;
  regular(3, 1) = -0.5481;
  CHECK_FALSE(rank_deficient(regular));
}

TEST_CASE("rank_deficient false implies lu_solve succeeds") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 6);
    Mat a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
    if (rank_deficient(a)) continue;
    Mat b(n, 1);
    for (std::size_t i = 0; i < n; ++i) b(i, 0) = u(rng);
    CHECK_NOTHROW(lu_solve(a, b));
  }
}

TEST_CASE("lyapunov_solve scalar and diagonal oracles") {
  // 2aP = -q with a = -2, q = 4  =>  P = 1
  CHECK(lyapunov_solve(Mat{{-2}}, Mat{{4}})(0, 0) == Catch::Approx(1.0));
  const Mat p = lyapunov_solve(-1.0 * Mat::identity(2), Mat::identity(2));
  CHECK(p(0, 0) == Catch::Approx(0.5));
  CHECK(p(1, 1) == Catch::Approx(0.5));
  CHECK(p(0, 1) == Catch::Approx(0.0));
  CHECK(lyapunov_solve(Mat{{-1}}, Mat{{0}})(0, 0) == 0.0);
}

TEST_CASE("lyapunov_solve residual and symmetry on random stable systems") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_real_distribution<double> up(0.2, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 7);
    Mat f(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) f(i, j) = u(rng) / static_cast<double>(n);
      f(i, i) = -up(rng) - 1.0;  // strongly diagonally dominant, Hurwitz
    }
    Mat q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) q(i, j) = q(j, i) = u(rng);
    const Mat p = lyapunov_solve(f, q);
    CHECK((p - p.transpose()).norm_inf() == 0.0);
    const Mat residual = f.transpose() * p + p * f + q;
    CHECK(residual.norm_inf() <= 1e-9 * std::max(q.norm_inf(), 1.0));
  }
}

TEST_CASE("lyapunov_solve rejects resonant spectra") {
  // eigenvalues +1 and -1 sum to zero
  CHECK_THROWS_AS(lyapunov_solve(Mat{{1, 0}, {0, -1}}, Mat::identity(2)), SingularMatrix);
}

TEST_CASE("is_positive_definite") {
  CHECK(is_positive_definite(Mat::identity(3)));
  CHECK_FALSE(is_positive_definite(Mat{{1, 0}, {0, -1}}));
  CHECK(is_positive_definite(Mat{{2, 1}, {1, 2}}));  // eigenvalues 1 and 3
  CHECK_THROWS_AS(is_positive_definite(Mat{{1, 0.5}, {0, 1}}), NotSymmetric);
}
