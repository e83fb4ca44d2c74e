// Copyright 2026 The zodp Authors.
// SPDX-License-Identifier: Apache-2.0

#include "zodp/sampling.h"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "zodp/rng.h"

namespace zodp {
namespace {

TEST_SUITE_BEGIN("sampling");

TEST_CASE("sphere samples have squared norm d") {
  RngStream r(5);
  for (int d : {1, 2, 8, 257, 1024}) {
    for (int k = 0; k < 10; ++k) {
      const Direction u = sample_sphere(d, r);
      REQUIRE(u.dim() == d);
      CHECK(std::abs(u.vec().squaredNorm() - d) <= 1e-9 * d);
      CHECK(u.norm() == doctest::Approx(std::sqrt(double(d))).epsilon(1e-12));
    }
  }
}

TEST_CASE("sphere sampling is reproducible with golden values") {
  RngStream r(123);
  const Direction u = sample_sphere(4, r);
  CHECK(u.vec()[0] == doctest::Approx(0.55877560894909684).epsilon(1e-15));
  CHECK(u.vec()[1] == doctest::Approx(0.52870641351096437).epsilon(1e-15));
  CHECK(u.vec()[2] == doctest::Approx(-1.84612018173325).epsilon(1e-15));
  CHECK(u.vec()[3] ==
        doctest::Approx(-0.0089231022145705909).epsilon(1e-12));

  RngStream r2(123);
  const Direction v = sample_sphere(4, r2);
  CHECK((u.vec() - v.vec()).norm() == 0.0);
}

TEST_CASE("sphere second moments are isotropic") {
  RngStream r(8);
  const int d = 4;
  const int n = 200000;
  double m00 = 0, m01 = 0;
  for (int i = 0; i < n; ++i) {
    const Direction u = sample_sphere(d, r);
    m00 += u.vec()[0] * u.vec()[0];
    m01 += u.vec()[0] * u.vec()[1];
  }
  // E[u_i u_j] = delta_ij; variances are O(1), so 5 sigma ~ 0.02.
  CHECK(std::abs(m00 / n - 1.0) < 0.02);
  CHECK(std::abs(m01 / n) < 0.02);
}

TEST_CASE("ball samples stay inside and fill the radius") {
  RngStream r(10);
  const int d = 4;
  const int n = 100000;
  double mean_norm_sq = 0;
  double max_norm = 0;
  for (int i = 0; i < n; ++i) {
    const Vector v = sample_ball(d, r);
    const double norm = v.norm();
    REQUIRE(norm <= std::sqrt(double(d)) + 1e-9);
    mean_norm_sq += v.squaredNorm();
    max_norm = std::max(max_norm, norm);
  }
  // E[|v|^2] = d * d/(d+2) since the radial factor is U^(1/d).
  const double target = double(d) * d / (d + 2);
  CHECK(std::abs(mean_norm_sq / n - target) < 0.02);
  CHECK(max_norm > 0.99 * std::sqrt(double(d)));
}

TEST_CASE("direction validates its norm") {
  Vector bad = Vector::Ones(3) * 2.0;  // squared norm 12, expected 3
  CHECK_THROWS_AS(Direction{bad}, std::invalid_argument);
  Vector good(2);
  good << 1.0, 1.0;  // squared norm 2 = d
  CHECK_NOTHROW(Direction{good});
}

TEST_CASE("zero-noise draws consume no randomness") {
  RngStream a(3);
  RngStream b(3);
  const Vector z = sample_gaussian_vector(16, 0.0, a);
  CHECK(z.size() == 0);
  const double s = sample_gaussian_scalar(0.0, a);
  CHECK(s == 0.0);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("noisy draws scale with sigma") {
  RngStream a(3);
  RngStream b(3);
  const Vector z1 = sample_gaussian_vector(8, 1.0, a);
  const Vector z2 = sample_gaussian_vector(8, 2.5, b);
  REQUIRE(z1.size() == 8);
  CHECK((z2 - 2.5 * z1).norm() == 0.0);

  RngStream c(4);
  const int n = 100000;
  double sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = sample_gaussian_scalar(3.0, c);
    sum_sq += v * v;
  }
  CHECK(sum_sq / n == doctest::Approx(9.0).epsilon(0.02));
}

TEST_CASE("invalid sampling arguments are rejected") {
  RngStream r(1);
  CHECK_THROWS_AS(sample_sphere(0, r), std::invalid_argument);
  CHECK_THROWS_AS(sample_gaussian_vector(4, -1.0, r), std::invalid_argument);
  CHECK_THROWS_AS(sample_gaussian_scalar(-0.5, r), std::invalid_argument);
}

TEST_SUITE_END();

}  // namespace
}  // namespace zodp
