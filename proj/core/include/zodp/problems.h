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

#ifndef ZODP_PROBLEMS_H_
#define ZODP_PROBLEMS_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zodp/sampling.h"

namespace zodp {

enum class ProblemFamily { kLogistic, kQuadratic, kQuartic };

std::string_view family_name(ProblemFamily family);
std::optional<ProblemFamily> family_from_name(std::string_view name);

// Analytic constants attached to every problem. Derivations consume these
// rather than estimating them from data.
struct ProblemInfo {
  double lipschitz = 0;       // L: per-sample gradient norm bound
  double smoothness = 0;      // ell: per-sample Hessian operator-norm bound
  double hessian_trace = 0;   // trace of the average Hessian bound
  double hessian_norm = 0;    // operator norm of the average Hessian bound
  double effective_rank = 0;  // hessian_trace / hessian_norm
  std::optional<double> min_value;  // known minimum of the average loss
};

// Finite-sum objective (1/n) sum_i f(x; xi_i) with per-sample loss oracles
// and measurement-only analytic gradients. Instances are immutable after
// construction; evaluation methods are safe to call concurrently.
//
// Loss evaluations are tallied in a counter shared across copies so that
// optimizer oracle budgets can be audited; gradient calls are diagnostics
// and are not counted.
class Problem {
 public:
  // Binary logistic losses log(1 + exp(-y_i a_i^T x)) with features a_i
  // drawn i.i.d. Gaussian inside a fixed r-dimensional subspace and scaled
  // so max_i ||a_i|| = feature_scale. Labels come from a random planted
  // linear model with a 10% flip rate.
  //
  // Generation is keyed by substream labels so that enlarging n keeps the
  // first samples fixed and changing d keeps all within-subspace draws
  // (coordinates, labels, start coordinates) fixed; only the embedding
  // basis depends on d. start_radius = 0 starts at the origin, otherwise
  // the start point lies at that radius inside the feature subspace.
  static Problem low_rank_logistic(int d, int r, int n, std::uint64_t seed,
                                   double feature_scale,
                                   double start_radius = 0.0);

  // Logistic problem over explicit features (rows = samples) and +/-1
  // labels; used for hand-constructed cases.
  static Problem logistic_from_data(Matrix features, std::vector<int> labels,
                                    Vector start);

  // Per-sample quadratics 1/2 (x - xi_i)^T H (x - xi_i) where H has the
  // given nonincreasing spectrum in a random orthogonal basis. Samples are
  // standard Gaussian inside the top-k eigenspace. region_radius = 0 picks
  // the default 2 * (||x0|| + max_i ||xi_i||).
  static Problem spectrum_quadratic(int d, std::vector<double> spectrum,
                                    int n, std::uint64_t seed,
                                    double start_radius = 1.0,
                                    double region_radius = 0.0);

  // Quadratic over an explicit orthonormal basis (d x k), spectrum, and
  // sample rows (n x d).
  static Problem quadratic_from_data(Matrix basis,
                                     std::vector<double> spectrum,
                                     Matrix samples, Vector start,
                                     double region_radius = 0.0);

  // One-dimensional f(x) = x^4 with a single sample. Not globally smooth;
  // its info() constants are region bounds, and smoothing validators
  // compute their own local constants on the evaluation interval.
  static Problem one_dim_quartic(double start, double region_radius = 2.0);

  ProblemFamily family() const { return family_; }
  int dimension() const { return d_; }
  int sample_count() const { return n_; }
  const ProblemInfo& info() const { return info_; }
  const Vector& start_point() const { return x0_; }
  double region_radius() const { return region_radius_; }
  std::uint64_t seed() const { return seed_; }
  double feature_scale() const { return feature_scale_; }
  double start_radius() const { return start_radius_; }

  // Loss oracle; i is zero-based. Counts one evaluation.
  double loss(const Vector& x, int i) const;

  // All per-sample losses at x; counts n evaluations. Values agree with
  // loss(x, i) up to floating rounding (the batch path vectorizes).
  void batch_loss(const Vector& x, std::vector<double>& out) const;

  // Analytic per-sample gradient; measurement only, never fed to the
  // private optimizers.
  Vector gradient(const Vector& x, int i) const;

  double average_loss(const Vector& x) const;  // counts n evaluations
  Vector average_gradient(const Vector& x) const;
  double avg_grad_norm_sq(const Vector& x) const;

  long long eval_count() const { return evals_->load(); }
  void reset_eval_count() const { evals_->store(0); }

  // JSON snapshot of everything needed to reconstruct the instance;
  // from_json(to_json()) reproduces identical evaluations and an identical
  // serialized form, byte for byte.
  std::string to_json() const;
  static Problem from_json(const std::string& text);

  // 64-bit FNV-1a hash of to_json(), as 16 hex digits.
  std::string fingerprint() const;

  // Structure accessors for tests and validators.
  const Matrix& basis() const { return basis_; }    // logistic B / quadratic Q
  const Matrix& coords() const { return coords_; }  // subspace coordinates
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& spectrum() const { return spectrum_; }

 private:
  Problem() : evals_(std::make_shared<std::atomic<long long>>(0)) {}

  void finalize_logistic();
  void finalize_quadratic();
  void count(long long k) const { evals_->fetch_add(k); }

  ProblemFamily family_ = ProblemFamily::kLogistic;
  int d_ = 0;
  int n_ = 0;
  std::uint64_t seed_ = 0;
  double feature_scale_ = 0;
  double start_radius_ = 0;
  double region_radius_ = 0;

  // Logistic: basis_ is d x r with orthonormal columns, coords_ is n x r,
  // features are coords_ * basis_^T. For explicit data basis_ = I.
  // Quadratic: basis_ is d x k, coords_ holds Q^T xi_i rows, spectrum_ the
  // eigenvalues, sample_norms_ the full ||xi_i||.
  Matrix basis_;
  Matrix coords_;
  std::vector<int> labels_;
  Vector label_signs_;  // labels_ as doubles, kept for vectorized margins
  std::vector<double> spectrum_;
  std::vector<double> sample_norms_;
  Vector coords_mean_;  // quadratic: mean of coords_ rows
  Vector x0_;

  ProblemInfo info_;
  std::shared_ptr<std::atomic<long long>> evals_;
};

// Hutchinson probe estimate (1/m) sum_k v_k^T H v_k of the average-Hessian
// trace, with Rademacher probes v_k. Reporting only: derivations always use
// the analytic info() constants. Requires a quadratic family, where H is
// x-independent and v^T H v has a closed form through the eigenbasis.
double hutchinson_hessian_trace(const Problem& p, int num_probes,
                                RngStream& rng);

}  // namespace zodp

#endif  // ZODP_PROBLEMS_H_
