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

#include "zodp/privacy.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace zodp {

PrivacyBudget PrivacyBudget::checked(double eps, double delta) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw std::invalid_argument("privacy budget: eps must be positive");
  }
  if (!(delta > 0) || !(delta < 1)) {
    throw std::invalid_argument("privacy budget: delta must lie in (0, 1)");
  }
  return PrivacyBudget{eps, delta};
}

double privacy_log_term(const PrivacyBudget& budget) {
  PrivacyBudget::checked(budget.eps, budget.delta);
  return std::log(std::numbers::e + budget.eps / budget.delta);
}

double sensitivity_bound(double clip, int n) {
  if (!(clip > 0)) throw std::invalid_argument("sensitivity_bound: clip must be positive");
  if (n < 1) throw std::invalid_argument("sensitivity_bound: n must be >= 1");
  return 2.0 * clip / n;
}

double noise_scale(double clip, int n, int T, const PrivacyBudget& budget) {
  if (!(clip > 0) || !std::isfinite(clip)) {
    throw std::invalid_argument("noise_scale: clip must be positive and finite");
  }
  if (n < 1) throw std::invalid_argument("noise_scale: n must be >= 1");
  if (T < 1) throw std::invalid_argument("noise_scale: T must be >= 1");
  const double log_term = privacy_log_term(budget);
  return 4.0 * clip * std::sqrt(2.0 * T * log_term) / (n * budget.eps);
}

NoiseCalibration calibrate_noise(double clip, int n, int T,
                                 const PrivacyBudget& budget) {
  NoiseCalibration cal;
  cal.clip = clip;
  cal.n = n;
  cal.T = T;
  cal.budget = PrivacyBudget::checked(budget.eps, budget.delta);
  cal.sensitivity = sensitivity_bound(clip, n);
  cal.sigma = noise_scale(clip, n, T, budget);
  return cal;
}

SensitivityProbe verify_sensitivity(const Problem& p, const Problem& pool,
                                    const Vector& x, const Direction& u,
                                    double lambda, double clip) {
  if (pool.dimension() != p.dimension()) {
    throw std::invalid_argument("verify_sensitivity: dimension mismatch");
  }
  const int n = p.sample_count();
  if (n > 100) {
    throw std::invalid_argument(
        "verify_sensitivity: brute force is quadratic, use a small dataset");
  }
  const int m = pool.sample_count();

  std::vector<double> base_fd(n), cand_fd(m);
  for (int i = 0; i < n; ++i) base_fd[i] = finite_difference(p, x, u, lambda, i);
  for (int j = 0; j < m; ++j) {
    cand_fd[j] = finite_difference(pool, x, u, lambda, j);
  }

  std::vector<double> base_s(n), cand_s(m);
  std::vector<Vector> base_v(n), cand_v(m);
  for (int i = 0; i < n; ++i) {
    base_s[i] = clip_scalar(base_fd[i], clip).value;
    base_v[i] = clip_vector(base_fd[i] * u.vec(), clip).value;
  }
  for (int j = 0; j < m; ++j) {
    cand_s[j] = clip_scalar(cand_fd[j], clip).value;
    cand_v[j] = clip_vector(cand_fd[j] * u.vec(), clip).value;
  }

  const auto scalar_mean = [&](int skip, int j) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += (i == skip) ? cand_s[j] : base_s[i];
    return acc / n;
  };
  const auto vector_mean = [&](int skip, int j) {
    Vector acc = Vector::Zero(u.dim());
    for (int i = 0; i < n; ++i) acc += (i == skip) ? cand_v[j] : base_v[i];
    return Vector(acc / n);
  };

  // skip = -1 leaves the dataset unmodified.
  const double mean_s = scalar_mean(-1, 0);
  const Vector mean_v = vector_mean(-1, 0);

  SensitivityProbe probe;
  probe.bound = sensitivity_bound(clip, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      probe.scalar_release =
          std::max(probe.scalar_release, std::abs(scalar_mean(i, j) - mean_s));
      probe.vector_release =
          std::max(probe.vector_release, (vector_mean(i, j) - mean_v).norm());
    }
  }
  return probe;
}

}  // namespace zodp
