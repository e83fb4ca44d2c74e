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

#include "zodp/validation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "zodp/estimator.h"

namespace zodp {
namespace {

using nlohmann::json;

constexpr double kTwoSqrtTwoPi = 5.013256549262001;  // 2 sqrt(2 pi)

// Streaming mean and variance for one scalar statistic.
struct Accumulator {
  long long count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / count;
    m2 += delta * (v - mean);
  }
  double stderr_mean() const {
    if (count < 2) return 0;
    return std::sqrt(m2 / (count - 1) / count);
  }
};

CheckEntry two_sided(const std::string& label, const Accumulator& acc,
                     double target, double sigmas) {
  CheckEntry e;
  e.label = label;
  e.estimate = acc.mean;
  e.target = target;
  e.mc_stderr = acc.stderr_mean();
  e.tolerance = sigmas * e.mc_stderr + 1e-12;
  e.one_sided = false;
  e.pass = std::abs(e.estimate - e.target) <= e.tolerance;
  return e;
}

CheckEntry one_sided(const std::string& label, double estimate, double target,
                     double tolerance, double mc_stderr) {
  CheckEntry e;
  e.label = label;
  e.estimate = estimate;
  e.target = target;
  e.mc_stderr = mc_stderr;
  e.tolerance = tolerance;
  e.one_sided = true;
  e.pass = estimate <= target + tolerance;
  return e;
}

json number_or_string(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isnan(v)) return json("nan");
  return json(v > 0 ? "inf" : "-inf");
}

}  // namespace

void CheckReport::add(CheckEntry entry) {
  pass = pass && entry.pass;
  entries.push_back(std::move(entry));
}

std::string CheckReport::to_json() const {
  json doc;
  doc["name"] = name;
  doc["sample_count"] = sample_count;
  doc["pass"] = pass;
  json items = json::array();
  for (const CheckEntry& e : entries) {
    json item;
    item["label"] = e.label;
    item["estimate"] = number_or_string(e.estimate);
    item["target"] = number_or_string(e.target);
    item["tolerance"] = number_or_string(e.tolerance);
    item["mc_stderr"] = number_or_string(e.mc_stderr);
    item["one_sided"] = e.one_sided;
    item["pass"] = e.pass;
    items.push_back(std::move(item));
  }
  doc["entries"] = std::move(items);
  return doc.dump();
}

SphereSampler default_sphere_sampler() {
  return [](int d, RngStream& rng) { return sample_sphere(d, rng).vec(); };
}

SphereSampler gaussian_sampler() {
  return [](int d, RngStream& rng) {
    Vector z(d);
    for (int i = 0; i < d; ++i) z[i] = rng.next_gaussian();
    return z;
  };
}

CheckReport check_sphere_moments(int d, long long num_samples, RngStream& rng,
                                 const SphereSampler& sampler) {
  if (d < 2) throw std::invalid_argument("sphere moment check needs d >= 2");
  if (num_samples < 2) {
    throw std::invalid_argument("sphere moment check needs >= 2 samples");
  }

  Vector a = Vector::Zero(d);
  a[0] = 1;
  a[1] = 2;
  const double a_norm_sq = a.squaredNorm();
  Vector h(d);  // diagonal of H
  double trace_h = 0;
  for (int i = 0; i < d; ++i) {
    h[i] = 1.0 / (i + 1);
    trace_h += h[i];
  }
  const double a_h_a = a.cwiseProduct(h).dot(a);
  const double weight = static_cast<double>(d) / (d + 2);

  Accumulator quad_a, fourth_same, fourth_cross, quad_h, diag_00, cross_01,
      fourth_trace;
  double max_norm_err = 0;

  RngStream draws = rng.child("draws");
  for (long long s = 0; s < num_samples; ++s) {
    const Vector u = sampler(d, draws);
    max_norm_err = std::max(max_norm_err, std::abs(u.squaredNorm() - d));
    const double ua = u.dot(a);
    const double ua_sq = ua * ua;
    const double uhu = u.cwiseProduct(h).dot(u);

    double sum4 = 0;
    for (int i = 0; i < d; ++i) sum4 += u[i] * u[i] * u[i] * u[i];
    double cross = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) cross += u[i] * u[i] * u[j] * u[j];
    }

    quad_a.add(ua_sq);
    fourth_same.add(sum4 / d);
    fourth_cross.add(2.0 * cross / (static_cast<double>(d) * (d - 1)));
    quad_h.add(uhu);
    diag_00.add(ua_sq * u[0] * u[0]);
    cross_01.add(ua_sq * u[0] * u[1]);
    fourth_trace.add(ua_sq * uhu);
  }

  CheckReport report;
  report.name = "sphere_moments";
  report.sample_count = num_samples;
  report.add(one_sided("max_norm_sq_error", max_norm_err, 0, 1e-9 * d, 0));
  report.add(two_sided("second_moment_quadform", quad_a, a_norm_sq, 5));
  report.add(two_sided("fourth_moment_same", fourth_same,
                       3.0 * d / (d + 2), 5));
  report.add(two_sided("fourth_moment_cross", fourth_cross, weight, 5));
  report.add(two_sided("trace_quadform", quad_h, trace_h, 5));
  report.add(two_sided("matrix_moment_diag", diag_00,
                       weight * (2 * a[0] * a[0] + a_norm_sq), 5));
  report.add(two_sided("matrix_moment_cross", cross_01,
                       weight * 2 * a[0] * a[1], 5));
  report.add(two_sided("fourth_order_trace", fourth_trace,
                       weight * (2 * a_h_a + a_norm_sq * trace_h), 5));
  return report;
}

CheckReport check_tail_bound(int d, long long num_samples, const Vector& a,
                             const std::vector<double>& c_list, RngStream& rng,
                             const SphereSampler& sampler) {
  if (a.size() != d) {
    throw std::invalid_argument("tail check: a must have dimension d");
  }
  if (c_list.empty()) {
    throw std::invalid_argument("tail check: need at least one threshold");
  }
  const double a_norm_sq = a.squaredNorm();
  if (!(a_norm_sq > 0)) {
    throw std::invalid_argument("tail check: a must be nonzero");
  }

  std::vector<long long> exceed(c_list.size(), 0);
  RngStream draws = rng.child("draws");
  for (long long s = 0; s < num_samples; ++s) {
    const Vector u = sampler(d, draws);
    const double ua = std::abs(u.dot(a));
    for (std::size_t k = 0; k < c_list.size(); ++k) {
      if (ua >= c_list[k]) ++exceed[k];
    }
  }

  CheckReport report;
  report.name = "tail_bound";
  report.sample_count = num_samples;
  for (std::size_t k = 0; k < c_list.size(); ++k) {
    const double rate =
        static_cast<double>(exceed[k]) / static_cast<double>(num_samples);
    const double bound =
        kTwoSqrtTwoPi * std::exp(-c_list[k] * c_list[k] / (8 * a_norm_sq));
    const double se = std::sqrt(std::max(rate * (1 - rate), 1e-12) /
                                static_cast<double>(num_samples));
    char label[64];
    std::snprintf(label, sizeof(label), "tail_c_%g", c_list[k]);
    report.add(one_sided(label, rate, bound, 3 * se, se));
  }
  return report;
}

CheckReport check_estimator_unbiased(const Problem& p, const Vector& x,
                                     double lambda, long long num_samples,
                                     RngStream& rng) {
  const int d = p.dimension();
  const int n = p.sample_count();

  // Estimator side: average the per-sample difference quotients so the
  // expectation is the smoothed gradient of the average loss.
  std::vector<Accumulator> est(d);
  std::vector<double> fds;
  RngStream dirs = rng.child("dirs");
  for (long long s = 0; s < num_samples; ++s) {
    const Direction u = sample_sphere(d, dirs);
    batch_finite_differences(p, x, u, lambda, fds);
    double mean_fd = 0;
    for (double v : fds) mean_fd += v;
    mean_fd /= n;
    for (int i = 0; i < d; ++i) est[i].add(mean_fd * u.vec()[i]);
  }

  // Target side: quadratics have a smoothed gradient equal to the true
  // gradient; other families get a ball-sampling Monte Carlo target.
  Vector target(d);
  std::vector<Accumulator> tgt(d);
  bool analytic = p.family() == ProblemFamily::kQuadratic;
  if (analytic) {
    target = p.average_gradient(x);
  } else {
    RngStream ball = rng.child("ball");
    for (long long s = 0; s < num_samples; ++s) {
      const Vector v = sample_ball(d, ball);
      const Vector g = p.average_gradient(x + lambda * v);
      for (int i = 0; i < d; ++i) tgt[i].add(g[i]);
    }
    for (int i = 0; i < d; ++i) target[i] = tgt[i].mean;
  }

  double max_err = 0;
  double max_se = 0;
  double err_norm_sq = 0;
  double se_norm_sq = 0;
  for (int i = 0; i < d; ++i) {
    const double err = std::abs(est[i].mean - target[i]);
    const double se_t = analytic ? 0.0 : tgt[i].stderr_mean();
    const double se = std::sqrt(est[i].stderr_mean() * est[i].stderr_mean() +
                                se_t * se_t);
    max_err = std::max(max_err, err);
    max_se = std::max(max_se, se);
    err_norm_sq += err * err;
    se_norm_sq += se * se;
  }

  CheckReport report;
  report.name = analytic ? "estimator_unbiased_analytic"
                         : "estimator_unbiased_ball_mc";
  report.sample_count = num_samples;
  report.add(one_sided("max_coord_error", max_err, 0, 5 * max_se + 1e-12,
                       max_se));
  report.add(one_sided("norm_error", std::sqrt(err_norm_sq), 0,
                       5 * std::sqrt(se_norm_sq) + 1e-12,
                       std::sqrt(se_norm_sq)));
  return report;
}

CheckReport check_smoothing_gap(const Problem& p, const Vector& x,
                                double lambda, long long num_samples,
                                RngStream& rng) {
  const int d = p.dimension();
  const int n = p.sample_count();
  const double ell = p.info().smoothness;
  const Vector true_grad = p.average_gradient(x);

  // Smoothed gradient via ball sampling.
  std::vector<Accumulator> smoothed(d);
  RngStream ball = rng.child("ball");
  for (long long s = 0; s < num_samples; ++s) {
    const Vector v = sample_ball(d, ball);
    const Vector g = p.average_gradient(x + lambda * v);
    for (int i = 0; i < d; ++i) smoothed[i].add(g[i]);
  }
  double gap_sq = 0;
  double se_sq = 0;
  for (int i = 0; i < d; ++i) {
    const double diff = true_grad[i] - smoothed[i].mean;
    gap_sq += diff * diff;
    se_sq += smoothed[i].stderr_mean() * smoothed[i].stderr_mean();
  }
  const double gap_bound = 0.5 * ell * lambda * std::pow(d, 1.5);

  // Second moment of the two-point estimate of the average loss.
  Accumulator second;
  std::vector<double> fds;
  RngStream dirs = rng.child("dirs");
  for (long long s = 0; s < num_samples; ++s) {
    const Direction u = sample_sphere(d, dirs);
    batch_finite_differences(p, x, u, lambda, fds);
    double mean_fd = 0;
    for (double v : fds) mean_fd += v;
    mean_fd /= n;
    const double norm = mean_fd * u.norm();
    second.add(norm * norm);
  }
  const double second_bound = 2.0 * d * true_grad.squaredNorm() +
                              0.5 * ell * ell * lambda * lambda * d * d * d;

  CheckReport report;
  report.name = "smoothing_gap";
  report.sample_count = num_samples;
  report.add(one_sided("gradient_gap", std::sqrt(gap_sq), gap_bound,
                       3 * std::sqrt(se_sq), std::sqrt(se_sq)));
  report.add(one_sided("second_moment", second.mean, second_bound,
                       3 * second.stderr_mean(), second.stderr_mean()));
  return report;
}

CheckReport check_clip_rate(const RunResult& result, const HyperParams& hp,
                            const Problem& p) {
  const ProblemInfo& info = p.info();
  const int d = p.dimension();
  const long long n = p.sample_count();
  const long long attempts = n * static_cast<long long>(hp.T);

  // The vector clip at threshold C acts on |fd| * ||u|| = |fd| sqrt(d), so
  // both algorithms reduce to a scalar threshold on the quotient.
  const double scalar_threshold =
      hp.algorithm == Algorithm::kAlg1
          ? hp.clip / std::sqrt(static_cast<double>(d))
          : hp.clip;
  const double drift = 0.5 * info.smoothness * hp.lambda * d;
  const double c0 = scalar_threshold - drift;
  double bound_rate = 1.0;
  if (c0 > 0 && std::isfinite(c0)) {
    bound_rate = std::min(
        1.0, kTwoSqrtTwoPi *
                 std::exp(-c0 * c0 / (8 * info.lipschitz * info.lipschitz)));
  }
  if (std::isinf(hp.clip)) bound_rate = 0;

  const double observed =
      static_cast<double>(result.total_clips) / static_cast<double>(attempts);
  const double bound_count = bound_rate * static_cast<double>(attempts);
  // Poisson-style slack: a realized count can exceed its mean.
  const double slack = (3.0 * std::sqrt(std::max(bound_count, 0.0)) + 3.0) /
                       static_cast<double>(attempts);

  CheckReport report;
  report.name = "clip_rate";
  report.sample_count = attempts;
  report.add(one_sided("clip_rate", observed, bound_rate, slack,
                       std::sqrt(std::max(observed, 1e-12) /
                                 static_cast<double>(attempts))));
  return report;
}

std::vector<CheckReport> run_default_checks(std::uint64_t seed, bool quick,
                                            const SphereSampler& sampler) {
  RngStream root(seed);
  const long long n_moments = quick ? 200000 : 2000000;
  const long long n_mc = quick ? 40000 : 400000;

  std::vector<CheckReport> reports;

  {
    RngStream r = root.child("val:sphere_moments");
    reports.push_back(check_sphere_moments(8, n_moments, r, sampler));
  }
  {
    RngStream r = root.child("val:tail_bound");
    Vector a = Vector::Zero(8);
    a[0] = 1;
    a[1] = 2;
    const double norm = std::sqrt(5.0);
    reports.push_back(check_tail_bound(
        8, n_moments, a, {1 * norm, 2 * norm, 3 * norm, 4 * norm}, r,
        sampler));
  }

  const Problem quadratic = Problem::spectrum_quadratic(
      6, {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}, 4, 7, 1.0);
  const Problem quartic = Problem::one_dim_quartic(1.0);

  {
    RngStream r = root.child("val:estimator_quadratic");
    CheckReport rep = check_estimator_unbiased(
        quadratic, quadratic.start_point(), 0.05, n_mc, r);
    rep.name += "_quadratic";
    reports.push_back(std::move(rep));
  }
  {
    RngStream r = root.child("val:estimator_quartic");
    CheckReport rep = check_estimator_unbiased(quartic, quartic.start_point(),
                                               0.1, n_mc, r);
    rep.name += "_quartic";
    reports.push_back(std::move(rep));
  }
  {
    RngStream r = root.child("val:smoothing_quadratic");
    CheckReport rep = check_smoothing_gap(quadratic, quadratic.start_point(),
                                          0.05, n_mc, r);
    rep.name += "_quadratic";
    reports.push_back(std::move(rep));
  }
  {
    RngStream r = root.child("val:smoothing_quartic");
    CheckReport rep =
        check_smoothing_gap(quartic, quartic.start_point(), 0.1, n_mc, r);
    rep.name += "_quartic";
    reports.push_back(std::move(rep));
  }

  // Clip-rate checks on short private runs of both algorithms.
  {
    const Problem logistic = Problem::low_rank_logistic(32, 4, 200, 11, 1.0);
    const PrivacyBudget budget = PrivacyBudget::checked(2.0, 1e-5);
    {
      HyperParams hp = derive_params_dpzero(logistic, budget);
      const RunResult run_result = run(logistic, hp, seed ^ 0x5a5a5a5aull);
      CheckReport rep = check_clip_rate(run_result, hp, logistic);
      rep.name += "_dpzero";
      reports.push_back(std::move(rep));
    }
    {
      HyperParams hp = derive_params_alg1_rank(logistic, budget);
      const RunResult run_result = run(logistic, hp, seed ^ 0x3c3c3c3cull);
      CheckReport rep = check_clip_rate(run_result, hp, logistic);
      rep.name += "_alg1";
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

std::string reports_to_jsonl(const std::vector<CheckReport>& reports) {
  std::string out;
  for (const CheckReport& r : reports) {
    out += r.to_json();
    out += "\n";
  }
  return out;
}

}  // namespace zodp
