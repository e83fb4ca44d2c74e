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

#ifndef ZODP_HARNESS_H_
#define ZODP_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zodp/optimizers.h"
#include "zodp/privacy.h"
#include "zodp/problems.h"

namespace zodp {

// Problem block of an experiment config. The "metadata" family carries
// only derivation constants and cannot be run, just planned against.
struct ProblemSpec {
  std::string family = "logistic";  // logistic | quadratic | metadata
  int d = 0;
  int r = 0;  // logistic subspace dimension
  int n = 0;
  std::uint64_t seed = 0;
  double feature_scale = 1.0;       // logistic
  double start_radius = 0.0;
  std::vector<double> spectrum;     // quadratic eigenvalues, nonincreasing
  double region_radius = 0.0;       // quadratic; 0 = default
  // metadata family only:
  double lipschitz = 0.0;
  double smoothness = 0.0;
  double effective_rank = 0.0;
};

struct TraceConfig {
  int snapshot_stride = 1;
  int grad_log_stride = 1;
  bool write_traces = true;
};

struct SweepConfig {
  std::vector<int> d_list;
  std::vector<std::string> algorithms = {"alg1", "dpzero"};
};

// Optional explicit hyperparameters; any field present overrides the
// derived value. sigma is deliberately not overridable: it is always
// recalibrated from (C, T, budget), or zero without a budget, so traces
// can never carry noise inconsistent with their stated privacy claim.
struct ParamOverrides {
  std::optional<double> alpha;
  std::optional<int> T;
  std::optional<double> lambda;
  std::optional<double> clip;
};

struct ExperimentConfig {
  int schema_version = 1;
  ProblemSpec problem;
  std::string algorithm = "dpzero";  // alg1 | dpzero | zo-gd
  std::optional<PrivacyBudget> budget;
  // auto | alg1_smooth | alg1_rank | dpzero | none. "auto" picks the
  // effective-rank derivation for alg1 and the scalar-clip derivation for
  // dpzero; "none" requires explicit params.
  std::string derivation = "auto";
  double lambda_scale = 1.0;
  ParamOverrides params;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  TraceConfig trace;
  SweepConfig sweep;
};

// Parses and validates config JSON; unknown keys anywhere are rejected.
// origin appears in error messages (a file path or "<override>").
ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& origin);
ExperimentConfig read_config(const std::string& path);

// Applies one dotted-path assignment ("budget.eps=4", "problem.d=256",
// "sweep.d_list=[64,256]") on the raw JSON document. Values parse as JSON
// when possible, else as strings. The resulting document must still pass
// parse_config.
std::string apply_override(const std::string& json_text,
                           const std::string& assignment);

// Canonical JSON for a parsed config; parse_config(render) round-trips.
std::string render_config(const ExperimentConfig& cfg);

// Instantiates the problem block; rejects the metadata family.
Problem build_problem(const ProblemSpec& spec);

// Derivation constants from the problem block (metadata family included).
DeriveInputs derive_inputs_from_spec(const ProblemSpec& spec);

// Hyperparameters for cfg's algorithm: derivation first (unless "none"),
// then explicit overrides, with sigma recalibrated when C or T changed and
// sigma itself was not pinned.
HyperParams resolve_params(const ExperimentConfig& cfg);

// Aggregate over seeds of one (algorithm, problem) cell.
struct RunSummary {
  std::string algorithm;
  int d = 0;
  double r = 0;  // effective rank used by the derivations
  int n = 0;
  std::optional<double> eps;
  std::optional<double> delta;
  double alpha = 0;
  int T = 0;
  double lambda = 0;
  double clip = 0;
  double sigma = 0;
  std::vector<std::uint64_t> seeds;
  double mean_final_grad_norm_sq = 0;
  double stderr_mean = 0;
  std::optional<double> slope;  // sweeps only

  std::vector<double> per_seed_final;  // not serialized; kept for analysis
};

// JSON object with exactly the keys: algorithm, d, r, n, eps, delta,
// alpha, T, lambda, C, sigma, seeds, mean_final_grad_norm_sq, stderr, and
// slope when present. Non-finite numbers render as strings ("inf").
std::string summary_to_json(const RunSummary& summary);

// Runs every seed sequentially, writes one trace CSV per seed plus
// summary.json and effective_config.json under cfg.output_dir, and returns
// the aggregate. Existing files are only replaced when force is set.
// If log is non-null, per-seed progress lines (including wall time, which
// never enters the files) are written to it.
RunSummary run_experiment(const ExperimentConfig& cfg, bool force,
                          std::ostream* log = nullptr);

struct SweepResult {
  std::vector<RunSummary> summaries;  // one per (algorithm, d), slope set
};

// Re-runs the experiment per algorithm and dimension in cfg.sweep with
// per-cell derived parameters, then fits a log-log slope of the mean final
// squared gradient norm against d for each algorithm.
SweepResult sweep_dimension(const ExperimentConfig& cfg, bool force,
                            std::ostream* log = nullptr);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

// Trace CSV with "# key=value" header and footer comment lines and the
// fixed column order t, loss, grad_norm_sq, clip_count. Doubles are
// written with enough digits to round-trip exactly.
struct TraceHeader {
  int schema_version = 1;
  std::string algorithm;
  int d = 0;
  double r = 0;
  int n = 0;
  std::optional<double> eps;
  std::optional<double> delta;
  HyperParams params;
  double sensitivity = 0;
  std::string problem_fingerprint;
  std::uint64_t seed = 0;
  int snapshot_stride = 1;
  int grad_log_stride = 1;
};

// Canonical per-seed trace file name: trace_<algorithm>_d<d>_seed<seed>.csv.
std::string trace_filename(const std::string& algorithm, int d,
                           std::uint64_t seed);

void write_trace_csv(const std::string& path, const TraceHeader& header,
                     const RunResult& result, bool force);

struct ParsedTrace {
  TraceHeader header;
  std::vector<TraceRow> rows;
  int tau = 0;
  double final_loss = 0;
  double final_grad_norm_sq = 0;
  long long oracle_calls = 0;
  int total_clips = 0;
};

// Reads a trace back, enforcing the row-count invariant (T + 1 rows), the
// oracle budget 2nT, and agreement of the stored sigma with the one
// recomputed from (C, n, T, eps, delta) to 1e-12 relative. Violations
// raise errors naming the offending line.
ParsedTrace read_trace_csv(const std::string& path);

}  // namespace zodp

#endif  // ZODP_HARNESS_H_
