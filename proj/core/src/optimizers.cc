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

#include "zodp/optimizers.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "zodp/estimator.h"
#include "zodp/sampling.h"

namespace zodp {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_derive_inputs(const DeriveInputs& in) {
  if (in.n < 1 || in.d < 1) {
    throw std::invalid_argument("derivation: need n >= 1 and d >= 1");
  }
  if (!(in.lipschitz > 0) || !std::isfinite(in.lipschitz)) {
    throw std::invalid_argument("derivation: Lipschitz constant must be positive");
  }
  if (!(in.smoothness > 0) || !std::isfinite(in.smoothness)) {
    throw std::invalid_argument("derivation: smoothness constant must be positive");
  }
}

void check_rank(const DeriveInputs& in) {
  if (!(in.effective_rank > 0) || !std::isfinite(in.effective_rank)) {
    throw std::invalid_argument("derivation: effective rank must be positive");
  }
}

void check_lambda_scale(double s) {
  if (!(s > 0) || !(s <= 1)) {
    throw std::invalid_argument("derivation: lambda_scale must lie in (0, 1]");
  }
}

// Floor to an integer iteration count, clamped to >= 1. Noise is always
// calibrated afterwards from the clamped value.
int floor_iterations(double t_real) {
  if (!std::isfinite(t_real)) {
    throw std::invalid_argument("derivation: iteration count is not finite");
  }
  const double floored = std::floor(t_real);
  if (floored >= 2147483647.0) {
    throw std::invalid_argument("derivation: iteration count overflows int");
  }
  return floored < 1.0 ? 1 : static_cast<int>(floored);
}

double checked_lambda(double lambda) {
  if (!(lambda >= kMinSmoothing)) {
    throw std::invalid_argument(
        "derivation: smoothing radius fell below the 1e-12 guard");
  }
  return lambda;
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAlg1: return "alg1";
    case Algorithm::kDpZero: return "dpzero";
    case Algorithm::kZoGd: return "zo-gd";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
  if (name == "alg1") return Algorithm::kAlg1;
  if (name == "dpzero") return Algorithm::kDpZero;
  if (name == "zo-gd") return Algorithm::kZoGd;
  return std::nullopt;
}

DeriveInputs derive_inputs(const Problem& p) {
  const ProblemInfo& info = p.info();
  return DeriveInputs{p.sample_count(), p.dimension(), info.lipschitz,
                      info.smoothness, info.effective_rank};
}

HyperParams derive_params_alg1_smooth(const DeriveInputs& in,
                                      const PrivacyBudget& budget,
                                      double lambda_scale) {
  check_derive_inputs(in);
  check_lambda_scale(lambda_scale);
  const double lt = privacy_log_term(budget);
  const double n = in.n, d = in.d;

  HyperParams hp;
  hp.algorithm = Algorithm::kAlg1;
  hp.alpha = 1.0 / (4.0 * in.smoothness * d);
  hp.T = floor_iterations(n * budget.eps / std::sqrt(d * lt));
  hp.clip = in.lipschitz * d;
  hp.lambda = checked_lambda(lambda_scale * (4.0 * in.lipschitz /
                                             (in.smoothness * d)) *
                             std::sqrt(std::sqrt(d * lt) / (n * budget.eps)));
  hp.sigma = noise_scale(hp.clip, in.n, hp.T, budget);
  return hp;
}

HyperParams derive_params_alg1_rank(const DeriveInputs& in,
                                    const PrivacyBudget& budget,
                                    double lambda_scale) {
  check_derive_inputs(in);
  check_rank(in);
  check_lambda_scale(lambda_scale);
  const double lt = privacy_log_term(budget);
  const double n = in.n, d = in.d, r = in.effective_rank;

  HyperParams hp;
  hp.algorithm = Algorithm::kAlg1;
  hp.alpha = 1.0 / (4.0 * in.smoothness * (r + 2.0));
  hp.T = floor_iterations(n * (r + 2.0) * budget.eps / (d * std::sqrt(r * lt)));
  hp.clip = in.lipschitz * d;
  hp.lambda = checked_lambda(lambda_scale * (4.0 * in.lipschitz /
                                             (in.smoothness * d)) *
                             std::sqrt(std::sqrt(r * lt) / (n * budget.eps)));
  hp.sigma = noise_scale(hp.clip, in.n, hp.T, budget);
  return hp;
}

HyperParams derive_params_dpzero(const DeriveInputs& in,
                                 const PrivacyBudget& budget,
                                 double lambda_scale) {
  check_derive_inputs(in);
  check_rank(in);
  check_lambda_scale(lambda_scale);
  const double lt = privacy_log_term(budget);
  const double n = in.n, d = in.d, r = in.effective_rank;
  const double L = in.lipschitz;

  const double envelope_arg = 2.0 * std::sqrt(2.0 * std::numbers::pi) * d *
                              (r + 2.0) * n * n * n * budget.eps * budget.eps /
                              (r * lt);
  if (!(envelope_arg > 1.0)) {
    throw std::invalid_argument(
        "derivation: scalar-clip envelope log argument must exceed 1");
  }
  const double l_tilde_sq = L * L * std::log(envelope_arg);
  const double l_tilde = std::sqrt(l_tilde_sq);

  HyperParams hp;
  hp.algorithm = Algorithm::kDpZero;
  hp.alpha = 1.0 / (4.0 * in.smoothness * (r + 2.0));
  hp.T = floor_iterations(n * (r + 2.0) * budget.eps / (4.0 * std::sqrt(r * lt)));
  hp.clip = 4.0 * l_tilde;
  hp.l_tilde = l_tilde;
  // Two caps: the first keeps smoothing drift from defeating the clip
  // threshold, the second matches the utility bound.
  const double drift_cap = 4.0 * (2.0 - std::sqrt(2.0)) * l_tilde;
  const double utility_cap =
      (L / std::sqrt(d)) * std::sqrt(std::sqrt(r * lt) / (n * budget.eps));
  hp.lambda = checked_lambda(
      lambda_scale * std::min(drift_cap, utility_cap) / (in.smoothness * d));
  hp.sigma = noise_scale(hp.clip, in.n, hp.T, budget);
  return hp;
}

HyperParams derive_params_alg1_smooth(const Problem& p,
                                      const PrivacyBudget& budget,
                                      double lambda_scale) {
  return derive_params_alg1_smooth(derive_inputs(p), budget, lambda_scale);
}

HyperParams derive_params_alg1_rank(const Problem& p,
                                    const PrivacyBudget& budget,
                                    double lambda_scale) {
  return derive_params_alg1_rank(derive_inputs(p), budget, lambda_scale);
}

HyperParams derive_params_dpzero(const Problem& p, const PrivacyBudget& budget,
                                 double lambda_scale) {
  return derive_params_dpzero(derive_inputs(p), budget, lambda_scale);
}

HyperParams zo_gd_defaults(const DeriveInputs& in, int T, double lambda) {
  check_derive_inputs(in);
  if (T < 1) throw std::invalid_argument("zo_gd_defaults: T must be >= 1");

  HyperParams hp;
  hp.algorithm = Algorithm::kZoGd;
  hp.alpha = 1.0 / (4.0 * in.smoothness * in.d);
  hp.T = T;
  hp.lambda = checked_lambda(lambda);
  hp.clip = kInf;
  hp.sigma = 0;
  return hp;
}

StepResult step_alg1(const Problem& p, const Vector& x, const Direction& u,
                     const HyperParams& hp, const Vector& noise) {
  std::vector<double> fds;
  batch_finite_differences(p, x, u, hp.lambda, fds);

  // clip_C(fd * u) = (fd * min(1, C / (|fd| ||u||))) * u, so the average
  // clipped vector is a single scalar coefficient times u.
  StepResult result;
  double acc = 0;
  if (std::isinf(hp.clip)) {
    for (double fd : fds) acc += fd;
  } else {
    const double u_norm = u.norm();
    for (double fd : fds) {
      const double norm = std::abs(fd) * u_norm;
      if (norm > hp.clip) {
        acc += fd * (hp.clip / norm);
        ++result.clip_count;
      } else {
        acc += fd;
      }
    }
  }
  const double coeff = acc / p.sample_count();

  if (noise.size() > 0) {
    result.x_next = x - hp.alpha * (coeff * u.vec() + noise);
  } else {
    result.x_next = x - hp.alpha * (coeff * u.vec());
  }
  return result;
}

StepResult step_dpzero(const Problem& p, const Vector& x, const Direction& u,
                       const HyperParams& hp, double noise) {
  std::vector<double> fds;
  batch_finite_differences(p, x, u, hp.lambda, fds);

  StepResult result;
  double acc = 0;
  if (std::isinf(hp.clip)) {
    for (double fd : fds) acc += fd;
  } else {
    for (double fd : fds) {
      if (std::abs(fd) > hp.clip) {
        acc += std::copysign(hp.clip, fd);
        ++result.clip_count;
      } else {
        acc += fd;
      }
    }
  }
  double coeff = acc / p.sample_count();
  // Adding an exact 0.0 is skipped so that noise-free runs share the
  // no-noise expression bit for bit.
  if (noise != 0.0) coeff += noise;

  result.x_next = x - hp.alpha * (coeff * u.vec());
  return result;
}

RunResult run(const Problem& p, const HyperParams& hp, std::uint64_t seed,
              const RunOptions& options) {
  if (hp.T < 1) throw std::invalid_argument("run: T must be >= 1");
  if (!(hp.alpha >= 0) || !std::isfinite(hp.alpha)) {
    throw std::invalid_argument("run: alpha must be finite and >= 0");
  }
  if (!(hp.lambda >= kMinSmoothing) || !std::isfinite(hp.lambda)) {
    throw std::invalid_argument("run: smoothing radius below the 1e-12 guard");
  }
  if (!(hp.sigma >= 0) || !std::isfinite(hp.sigma)) {
    throw std::invalid_argument("run: sigma must be finite and >= 0");
  }
  if (std::isnan(hp.clip) || !(hp.clip > 0)) {
    throw std::invalid_argument("run: clip threshold must be positive");
  }
  if (hp.algorithm == Algorithm::kZoGd &&
      (hp.sigma != 0 || !std::isinf(hp.clip))) {
    throw std::invalid_argument(
        "run: the zo-gd baseline requires sigma = 0 and an infinite clip");
  }
  if (options.snapshot_stride < 1 || options.grad_log_stride < 1) {
    throw std::invalid_argument("run: strides must be >= 1");
  }

  const auto start_time = std::chrono::steady_clock::now();
  const int d = p.dimension();
  const int n = p.sample_count();
  const int T = hp.T;

  RunResult result;
  result.algorithm = hp.algorithm;
  result.params = hp;
  result.seed = seed;
  result.d = d;
  result.n = n;
  result.problem_fingerprint = p.fingerprint();

  for (int t = 0; t < T; t += options.snapshot_stride) {
    result.snapshot_steps.push_back(t);
  }

  RngStream root = make_rng(seed);
  {
    RngStream output = root.child("output");
    const auto pos = output.next_below(result.snapshot_steps.size());
    result.tau = result.snapshot_steps[static_cast<std::size_t>(pos)];
  }

  Vector x = p.start_point();
  result.rows.reserve(T + 1);
  result.snapshots.reserve(result.snapshot_steps.size());

  int prev_clips = 0;
  std::size_t next_snapshot = 0;
  for (int t = 0;; ++t) {
    const double loss = p.average_loss(x);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("run: non-finite loss at iteration " +
                               std::to_string(t) + " (diverged)");
    }
    const bool measured = (t % options.grad_log_stride == 0) || t == T;
    result.rows.push_back(
        {t, loss, measured ? p.avg_grad_norm_sq(x) : kNan, prev_clips});
    result.max_iterate_norm = std::max(result.max_iterate_norm, x.norm());
    if (next_snapshot < result.snapshot_steps.size() &&
        result.snapshot_steps[next_snapshot] == t) {
      result.snapshots.push_back(x);
      ++next_snapshot;
    }
    if (t == result.tau) result.selected = x;
    if (t == T) break;

    RngStream iter = root.child("iter:" + std::to_string(t));
    const Direction u = sample_sphere(d, iter);

    const long long before = p.eval_count();
    StepResult step;
    if (hp.algorithm == Algorithm::kAlg1) {
      const Vector noise = sample_gaussian_vector(d, hp.sigma, iter);
      step = step_alg1(p, x, u, hp, noise);
    } else {
      const double noise = sample_gaussian_scalar(hp.sigma, iter);
      step = step_dpzero(p, x, u, hp, noise);
    }
    result.oracle_calls += p.eval_count() - before;

    prev_clips = step.clip_count;
    result.total_clips += prev_clips;
    if (options.observer) {
      StepEvent event;
      event.t = t;
      event.x_before = &x;
      event.x_after = &step.x_next;
      event.u = &u;
      event.clip_count = prev_clips;
      options.observer(event);
    }
    x = std::move(step.x_next);
  }

  if (result.oracle_calls != 2LL * n * T) {
    throw std::logic_error("run: oracle budget violated");
  }

  result.final_loss = p.average_loss(result.selected);
  result.final_grad_norm_sq = p.avg_grad_norm_sq(result.selected);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  return result;
}

const Vector& select_output(const RunResult& result, RngStream& rng) {
  if (result.snapshots.empty()) {
    throw std::invalid_argument("select_output: run kept no snapshots");
  }
  const auto pos = rng.next_below(result.snapshots.size());
  return result.snapshots[static_cast<std::size_t>(pos)];
}

}  // namespace zodp
