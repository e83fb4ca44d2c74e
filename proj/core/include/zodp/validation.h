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

// Monte Carlo checks for the statistical facts the optimizers rely on:
// sphere moment identities, direction tail bounds, estimator unbiasedness,
// smoothing bias and second-moment bounds, and observed clip rates. Each
// check returns a structured report so failures carry the measured value,
// the target, and the tolerance that was applied.

#ifndef ZODP_VALIDATION_H_
#define ZODP_VALIDATION_H_

#include <functional>
#include <string>
#include <vector>

#include "zodp/optimizers.h"
#include "zodp/problems.h"
#include "zodp/rng.h"
#include "zodp/sampling.h"

namespace zodp {

// One estimated quantity inside a check. For two-sided entries the pass
// condition is |estimate - target| <= tolerance; one-sided entries pass
// when estimate <= target + tolerance.
struct CheckEntry {
  std::string label;
  double estimate = 0;
  double target = 0;
  double tolerance = 0;
  double mc_stderr = 0;  // 0 when the entry is deterministic
  bool one_sided = false;
  bool pass = false;
};

struct CheckReport {
  std::string name;
  long long sample_count = 0;
  std::vector<CheckEntry> entries;
  bool pass = true;

  void add(CheckEntry entry);
  // Single JSON object (one JSONL line, no trailing newline).
  std::string to_json() const;
};

// Direction sampler hook. The default draws uniformly from the sphere of
// radius sqrt(d); tests substitute a deliberately wrong sampler to confirm
// the moment checks can fail.
using SphereSampler = std::function<Vector(int d, RngStream& rng)>;
SphereSampler default_sphere_sampler();
// Returns raw standard Gaussian vectors. Second moments still match, but
// fourth-moment identities do not, so check_sphere_moments must fail.
SphereSampler gaussian_sampler();

// Estimates E[u u^T], E[(u^T a)^2], E[(u^T a)^2 u u^T], E[u^T H u],
// E[(u^T a)^2 u^T H u], and the fourth-moment weights against their
// closed forms, with a = (1, 2, 0, ...) and H = diag(1, 1/2, ..., 1/d).
CheckReport check_sphere_moments(int d, long long num_samples, RngStream& rng,
                                 const SphereSampler& sampler);

// Checks P(|u^T a| >= c) against the sub-Gaussian bound
// 2 sqrt(2 pi) exp(-c^2 / (8 |a|^2)) for each threshold in c_list.
CheckReport check_tail_bound(int d, long long num_samples, const Vector& a,
                             const std::vector<double>& c_list, RngStream& rng,
                             const SphereSampler& sampler);

// Confirms the averaged two-point estimate at x matches the smoothed
// gradient. Quadratics admit a closed form (the smoothed gradient equals
// the true gradient); other families are compared against a ball-sampling
// Monte Carlo target with the two standard errors combined.
CheckReport check_estimator_unbiased(const Problem& p, const Vector& x,
                                     double lambda, long long num_samples,
                                     RngStream& rng);

// Verifies, at one point, both smoothing bounds: the gradient gap
// |grad f - grad f_lambda| <= (l/2) lambda d^{3/2} and the second moment
// E|g|^2 <= 2 d |grad f|^2 + (l^2/2) lambda^2 d^3. One-sided with a
// three-standard-error allowance.
CheckReport check_smoothing_gap(const Problem& p, const Vector& x,
                                double lambda, long long num_samples,
                                RngStream& rng);

// Compares the clip frequency observed in a finished run against the
// union bound 2 sqrt(2 pi) n T exp(-C0^2 / (8 L^2)) with C0 the clip
// threshold less the smoothing drift.
CheckReport check_clip_rate(const RunResult& result, const HyperParams& hp,
                            const Problem& p);

// Runs every check on fixed default instances. quick shrinks the sample
// counts for smoke testing; the full sizes are meant for release gates.
std::vector<CheckReport> run_default_checks(
    std::uint64_t seed, bool quick,
    const SphereSampler& sampler = default_sphere_sampler());

// Serializes reports as JSON Lines, one report per line.
std::string reports_to_jsonl(const std::vector<CheckReport>& reports);

}  // namespace zodp

#endif  // ZODP_VALIDATION_H_
