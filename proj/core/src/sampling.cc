// Copyright 2026 The zodp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zodp/sampling.h"

#include <cmath>
#include <stdexcept>

namespace zodp {

Direction::Direction(Vector u) : u_(std::move(u)) {
  const int d = static_cast<int>(u_.size());
  if (d < 1) throw std::invalid_argument("Direction: empty vector");
  const double norm_sq = u_.squaredNorm();
  if (!(std::abs(norm_sq - static_cast<double>(d)) <= 1e-9 * d)) {
    throw std::invalid_argument(
        "Direction: squared norm must equal the dimension");
  }
  norm_ = std::sqrt(norm_sq);
}

Direction sample_sphere(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_sphere: d must be positive");
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = rng.next_gaussian();
  const double norm = z.norm();
  if (norm == 0.0) {
    throw std::runtime_error("sample_sphere: degenerate Gaussian draw");
  }
  z *= std::sqrt(static_cast<double>(d)) / norm;
  return Direction(std::move(z));
}

Vector sample_ball(int d, RngStream& rng) {
  Direction u = sample_sphere(d, rng);
  const double radius = std::pow(rng.next_double(), 1.0 / d);
  return u.vec() * radius;
}

double sample_gaussian_scalar(double sigma, RngStream& rng) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sample_gaussian_scalar: bad sigma");
  }
  if (sigma == 0.0) return 0.0;
  return sigma * rng.next_gaussian();
}

Vector sample_gaussian_vector(int d, double sigma, RngStream& rng) {
  if (d < 1) {
    throw std::invalid_argument("sample_gaussian_vector: d must be positive");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sample_gaussian_vector: bad sigma");
  }
  if (sigma == 0.0) return Vector();
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = sigma * rng.next_gaussian();
  return z;
}

}  // namespace zodp
