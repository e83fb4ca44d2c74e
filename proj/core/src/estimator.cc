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

#include "zodp/estimator.h"

#include <cmath>
#include <stdexcept>

namespace zodp {
namespace {

void check_lambda(double lambda) {
  if (!(lambda >= kMinSmoothing) || !std::isfinite(lambda)) {
    throw std::invalid_argument(
        "smoothing radius must be finite and >= 1e-12");
  }
}

void check_clip(double clip) {
  // +infinity is a valid "never clip" threshold.
  if (std::isnan(clip) || !(clip > 0)) {
    throw std::invalid_argument("clip threshold must be positive");
  }
}

}  // namespace

double finite_difference(const Problem& p, const Vector& x, const Direction& u,
                         double lambda, int i) {
  check_lambda(lambda);
  if (u.dim() != p.dimension()) {
    throw std::invalid_argument("finite_difference: direction dimension mismatch");
  }
  const Vector plus = x + lambda * u.vec();
  const Vector minus = x - lambda * u.vec();
  return (p.loss(plus, i) - p.loss(minus, i)) / (2.0 * lambda);
}

void batch_finite_differences(const Problem& p, const Vector& x,
                              const Direction& u, double lambda,
                              std::vector<double>& out) {
  check_lambda(lambda);
  if (u.dim() != p.dimension()) {
    throw std::invalid_argument(
        "batch_finite_differences: direction dimension mismatch");
  }
  const Vector plus = x + lambda * u.vec();
  const Vector minus = x - lambda * u.vec();
  std::vector<double> loss_minus;
  p.batch_loss(plus, out);
  p.batch_loss(minus, loss_minus);
  const double denom = 2.0 * lambda;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (out[i] - loss_minus[i]) / denom;
  }
}

Vector two_point_gradient(const Problem& p, const Vector& x,
                          const Direction& u, double lambda, int i) {
  return finite_difference(p, x, u, lambda, i) * u.vec();
}

FiniteDiff clip_scalar(double value, double clip) {
  check_clip(clip);
  if (std::abs(value) <= clip) return {value, false};
  return {std::copysign(clip, value), true};
}

ClippedVector clip_vector(const Vector& v, double clip) {
  check_clip(clip);
  const double norm = v.norm();
  if (norm <= clip) return {v, false};
  return {v * (clip / norm), true};
}

}  // namespace zodp
