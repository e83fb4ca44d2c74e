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

#ifndef ZODP_OPTIMIZERS_H_
#define ZODP_OPTIMIZERS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zodp/privacy.h"
#include "zodp/problems.h"

namespace zodp {

enum class Algorithm { kAlg1, kDpZero, kZoGd };

std::string_view algorithm_name(Algorithm algorithm);
std::optional<Algorithm> algorithm_from_name(std::string_view name);

struct HyperParams {
  Algorithm algorithm = Algorithm::kDpZero;
  double alpha = 0;   // step size
  int T = 1;          // iteration count
  double lambda = 0;  // smoothing radius
  double clip = 0;    // clip threshold; +infinity disables clipping
  double sigma = 0;   // Gaussian noise scale; 0 disables noise
  double l_tilde = 0; // scalar-clip envelope, nonzero only for dpzero
};

// Inputs the closed-form derivations need; obtainable from a Problem or
// supplied directly (for parameter planning without data).
struct DeriveInputs {
  int n = 0;
  int d = 0;
  double lipschitz = 0;
  double smoothness = 0;
  double effective_rank = 0;
};

DeriveInputs derive_inputs(const Problem& p);

// Full-dimension derivation: alpha = 1/(4 ell d), T = floor(n eps /
// sqrt(d log(e + eps/delta))), C = L d, lambda at its upper bound scaled
// by lambda_scale in (0, 1]. T is clamped to >= 1 and sigma is computed
// from the clamped T, so rounding never weakens the privacy guarantee.
HyperParams derive_params_alg1_smooth(const DeriveInputs& in,
                                      const PrivacyBudget& budget,
                                      double lambda_scale = 1.0);
HyperParams derive_params_alg1_smooth(const Problem& p,
                                      const PrivacyBudget& budget,
                                      double lambda_scale = 1.0);

// Effective-rank-aware derivation: alpha = 1/(4 ell (r+2)),
// T = floor(n (r+2) eps / (d sqrt(r log(e + eps/delta)))), C = L d.
HyperParams derive_params_alg1_rank(const DeriveInputs& in,
                                    const PrivacyBudget& budget,
                                    double lambda_scale = 1.0);
HyperParams derive_params_alg1_rank(const Problem& p,
                                    const PrivacyBudget& budget,
                                    double lambda_scale = 1.0);

// Scalar-clip derivation: T = floor(n (r+2) eps / (4 sqrt(r log(e +
// eps/delta)))), C = 4 L~ where L~^2 = L^2 log(2 sqrt(2 pi) d (r+2) n^3
// eps^2 / (r log(e + eps/delta))), and lambda capped so the smoothing
// drift cannot push an in-bound difference quotient past C.
HyperParams derive_params_dpzero(const DeriveInputs& in,
                                 const PrivacyBudget& budget,
                                 double lambda_scale = 1.0);
HyperParams derive_params_dpzero(const Problem& p, const PrivacyBudget& budget,
                                 double lambda_scale = 1.0);

// Non-private baseline: alpha = 1/(4 ell d), no clipping, no noise.
HyperParams zo_gd_defaults(const DeriveInputs& in, int T,
                           double lambda = 1e-6);

// One update of the full-vector algorithm: per-sample two-point gradients
// clipped in norm, averaged in sample order, plus isotropic noise. An
// empty noise vector means sigma = 0. Returns the clip-event count.
struct StepResult {
  Vector x_next;
  int clip_count = 0;
};

StepResult step_alg1(const Problem& p, const Vector& x, const Direction& u,
                     const HyperParams& hp, const Vector& noise);

// One update of the scalar-release algorithm: clipped difference
// quotients averaged, scalar noise added, step taken along u.
StepResult step_dpzero(const Problem& p, const Vector& x, const Direction& u,
                       const HyperParams& hp, double noise);

// Per-iteration observation hook for tests and diagnostics.
struct StepEvent {
  int t = 0;
  const Vector* x_before = nullptr;
  const Vector* x_after = nullptr;
  const Direction* u = nullptr;
  int clip_count = 0;
};

struct RunOptions {
  // Iterates x_t with t % snapshot_stride == 0 (t < T) are retained and
  // the output index tau is drawn uniformly among them; stride 1 matches
  // the algorithms as stated.
  int snapshot_stride = 1;
  // Gradient norms are measured (non-private diagnostic) on rows with
  // t % grad_log_stride == 0 and on the final row; other rows carry NaN.
  int grad_log_stride = 1;
  std::function<void(const StepEvent&)> observer;
};

struct TraceRow {
  int t = 0;
  double loss = 0;
  double grad_norm_sq = 0;  // NaN when not measured
  int clip_count = 0;       // clip events of the step that produced x_t
};

struct RunResult {
  Algorithm algorithm = Algorithm::kDpZero;
  HyperParams params;
  std::uint64_t seed = 0;
  int d = 0;
  int n = 0;
  std::string problem_fingerprint;

  std::vector<TraceRow> rows;  // exactly T + 1 rows, t = 0..T
  std::vector<int> snapshot_steps;
  std::vector<Vector> snapshots;

  int tau = 0;         // uniformly drawn output index
  Vector selected;     // x_tau
  double final_loss = 0;
  double final_grad_norm_sq = 0;

  long long oracle_calls = 0;  // loss evaluations inside steps; always 2nT
  int total_clips = 0;
  double max_iterate_norm = 0;
  // Wall-clock diagnostic; deliberately kept out of serialized traces so
  // outputs stay byte-reproducible.
  double wall_seconds = 0;
};

// Runs T iterations from the problem's start point. Independent substreams
// per iteration ("iter:<t>") carry the direction and noise draws; the
// output index comes from the separate "output" substream, so changing T
// or observers never perturbs the trajectory prefix. Throws on non-finite
// losses with the failing iteration in the message.
RunResult run(const Problem& p, const HyperParams& hp, std::uint64_t seed,
              const RunOptions& options = RunOptions());

// Redraws an output iterate from a finished run using the given stream.
const Vector& select_output(const RunResult& result, RngStream& rng);

}  // namespace zodp

#endif  // ZODP_OPTIMIZERS_H_
