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

#ifndef ZODP_ESTIMATOR_H_
#define ZODP_ESTIMATOR_H_

#include <vector>

#include "zodp/problems.h"
#include "zodp/sampling.h"

namespace zodp {

// Smoothing radii below this would put the finite-difference quotient in
// catastrophic-cancellation territory; derived radii at experiment scale
// sit many orders of magnitude above it.
inline constexpr double kMinSmoothing = 1e-12;

struct FiniteDiff {
  double value = 0;
  bool clipped = false;
};

struct ClippedVector {
  Vector value;
  bool clipped = false;
};

// Symmetric difference quotient (f(x + lambda u) - f(x - lambda u)) /
// (2 lambda) for sample i. Costs exactly two loss evaluations.
double finite_difference(const Problem& p, const Vector& x, const Direction& u,
                         double lambda, int i);

// Difference quotients for all samples at once, sharing the two shifted
// points; costs exactly 2n loss evaluations. Entry i agrees with
// finite_difference(p, x, u, lambda, i) up to vectorization rounding.
void batch_finite_differences(const Problem& p, const Vector& x,
                              const Direction& u, double lambda,
                              std::vector<double>& out);

// The two-point gradient estimator: finite_difference * u.
Vector two_point_gradient(const Problem& p, const Vector& x,
                          const Direction& u, double lambda, int i);

// clip_C(s) = s * min(1, C / |s|). C may be +infinity (never clips);
// saturated outputs equal +/-C exactly.
FiniteDiff clip_scalar(double value, double clip);

// clip_C(v) = v * min(1, C / ||v||); the zero vector passes unflagged.
ClippedVector clip_vector(const Vector& v, double clip);

}  // namespace zodp

#endif  // ZODP_ESTIMATOR_H_
