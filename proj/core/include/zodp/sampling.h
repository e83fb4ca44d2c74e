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

#ifndef ZODP_SAMPLING_H_
#define ZODP_SAMPLING_H_

#include <Eigen/Core>

#include "zodp/rng.h"

namespace zodp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Probe direction on the sphere of radius sqrt(d) in R^d. The constructor
// enforces |norm^2 - d| <= 1e-9 * d, so downstream code may rely on the
// scaling convention E[u u^T] = I.
class Direction {
 public:
  explicit Direction(Vector u);

  const Vector& vec() const { return u_; }
  int dim() const { return static_cast<int>(u_.size()); }
  double norm() const { return norm_; }

 private:
  Vector u_;
  double norm_;
};

// Uniform direction on the radius-sqrt(d) sphere: a standard Gaussian
// vector rescaled to norm sqrt(d). Consumes exactly d Gaussian draws.
Direction sample_sphere(int d, RngStream& rng);

// Uniform point in the radius-sqrt(d) ball: a sphere draw scaled by
// U^(1/d) with U uniform on [0, 1). Consumes d Gaussians plus one uniform,
// in that order.
Vector sample_ball(int d, RngStream& rng);

// N(0, sigma^2) scalar; returns exactly 0.0 without consuming draws when
// sigma == 0 so noise-free runs replay bit-identically.
double sample_gaussian_scalar(double sigma, RngStream& rng);

// N(0, sigma^2 I_d) vector; returns an empty vector without consuming
// draws when sigma == 0 (callers treat empty as "no noise").
Vector sample_gaussian_vector(int d, double sigma, RngStream& rng);

}  // namespace zodp

#endif  // ZODP_SAMPLING_H_
