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

#include "zodp/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zodp {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Non-finite doubles have no JSON number representation; they are encoded
// as the strings "inf", "-inf", "nan" and decoded symmetrically.
json json_number(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isnan(v)) return json("nan");
  return json(v > 0 ? "inf" : "-inf");
}

double number_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument(where + " must be a number");
}

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
  throw std::invalid_argument("config " + origin + ": " + message);
}

void check_keys(const json& obj, const std::string& origin,
                const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(origin, path + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(origin, "unknown key '" + path + "." + item.key() + "'");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

int get_int(const json& obj, const char* key, const std::string& origin,
            const std::string& path, std::optional<int> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    fail(origin, path + "." + key + " is required");
  }
  if (!v->is_number_integer()) {
    fail(origin, path + "." + key + " must be an integer");
  }
  return v->get<int>();
}

double get_double(const json& obj, const char* key, const std::string& origin,
                  const std::string& path, std::optional<double> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    fail(origin, path + "." + key + " is required");
  }
  if (!v->is_number()) fail(origin, path + "." + key + " must be a number");
  return v->get<double>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& origin, const std::string& path,
                       std::optional<std::string> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    fail(origin, path + "." + key + " is required");
  }
  if (!v->is_string()) fail(origin, path + "." + key + " must be a string");
  return v->get<std::string>();
}

ProblemSpec parse_problem(const json& obj, const std::string& origin) {
  check_keys(obj, origin, "problem",
             {"family", "d", "r", "n", "seed", "feature_scale", "start_radius",
              "spectrum", "region_radius", "lipschitz", "smoothness",
              "effective_rank"});
  ProblemSpec spec;
  spec.family = get_string(obj, "family", origin, "problem", std::nullopt);
  spec.d = get_int(obj, "d", origin, "problem", std::nullopt);
  if (spec.d < 1) fail(origin, "problem.d must be >= 1");

  if (spec.family == "logistic") {
    spec.r = get_int(obj, "r", origin, "problem", std::nullopt);
    if (spec.r < 1) fail(origin, "problem.r must be >= 1");
    if (spec.r > spec.d) fail(origin, "problem.r must not exceed problem.d");
    spec.n = get_int(obj, "n", origin, "problem", std::nullopt);
    if (spec.n < 1) fail(origin, "problem.n must be >= 1");
    const json* seed = find(obj, "seed");
    if (!seed || !seed->is_number_unsigned()) {
      fail(origin, "problem.seed must be a nonnegative integer");
    }
    spec.seed = seed->get<std::uint64_t>();
    spec.feature_scale =
        get_double(obj, "feature_scale", origin, "problem", 1.0);
    if (!(spec.feature_scale > 0)) {
      fail(origin, "problem.feature_scale must be positive");
    }
    spec.start_radius = get_double(obj, "start_radius", origin, "problem", 0.0);
    if (!(spec.start_radius >= 0)) {
      fail(origin, "problem.start_radius must be >= 0");
    }
    for (const char* banned :
         {"spectrum", "region_radius", "lipschitz", "smoothness",
          "effective_rank"}) {
      if (find(obj, banned)) {
        fail(origin, std::string("problem.") + banned +
                         " does not apply to the logistic family");
      }
    }
  } else if (spec.family == "quadratic") {
    spec.n = get_int(obj, "n", origin, "problem", std::nullopt);
    if (spec.n < 1) fail(origin, "problem.n must be >= 1");
    const json* seed = find(obj, "seed");
    if (!seed || !seed->is_number_unsigned()) {
      fail(origin, "problem.seed must be a nonnegative integer");
    }
    spec.seed = seed->get<std::uint64_t>();
    const json* spectrum = find(obj, "spectrum");
    if (!spectrum || !spectrum->is_array() || spectrum->empty()) {
      fail(origin, "problem.spectrum must be a nonempty array");
    }
    for (const json& v : *spectrum) {
      if (!v.is_number()) fail(origin, "problem.spectrum entries must be numbers");
      spec.spectrum.push_back(v.get<double>());
    }
    spec.start_radius = get_double(obj, "start_radius", origin, "problem", 0.0);
    spec.region_radius =
        get_double(obj, "region_radius", origin, "problem", 0.0);
    for (const char* banned :
         {"r", "feature_scale", "lipschitz", "smoothness", "effective_rank"}) {
      if (find(obj, banned)) {
        fail(origin, std::string("problem.") + banned +
                         " does not apply to the quadratic family");
      }
    }
  } else if (spec.family == "metadata") {
    spec.n = get_int(obj, "n", origin, "problem", std::nullopt);
    if (spec.n < 1) fail(origin, "problem.n must be >= 1");
    spec.lipschitz = get_double(obj, "lipschitz", origin, "problem", std::nullopt);
    spec.smoothness =
        get_double(obj, "smoothness", origin, "problem", std::nullopt);
    spec.effective_rank =
        get_double(obj, "effective_rank", origin, "problem", std::nullopt);
    if (spec.effective_rank > spec.d) {
      fail(origin, "problem.effective_rank must not exceed problem.d");
    }
    for (const char* banned :
         {"r", "feature_scale", "start_radius", "spectrum", "region_radius",
          "seed"}) {
      if (find(obj, banned)) {
        fail(origin, std::string("problem.") + banned +
                         " does not apply to the metadata family");
      }
    }
  } else {
    fail(origin, "problem.family must be logistic, quadratic, or metadata");
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
  check_keys(doc, origin, "$",
             {"schema_version", "problem", "algorithm", "budget", "derivation",
              "lambda_scale", "params", "seeds", "output_dir", "trace",
              "sweep"});

  ExperimentConfig cfg;
  cfg.schema_version =
      get_int(doc, "schema_version", origin, "$", std::nullopt);
  if (cfg.schema_version != 1) {
    fail(origin, "schema_version must be 1");
  }
  const json* problem = find(doc, "problem");
  if (!problem) fail(origin, "problem block is required");
  cfg.problem = parse_problem(*problem, origin);

  cfg.algorithm = get_string(doc, "algorithm", origin, "$", "dpzero");
  if (!algorithm_from_name(cfg.algorithm)) {
    fail(origin, "algorithm must be alg1, dpzero, or zo-gd");
  }

  if (const json* budget = find(doc, "budget")) {
    check_keys(*budget, origin, "budget", {"eps", "delta"});
    const double eps = get_double(*budget, "eps", origin, "budget", std::nullopt);
    const double delta =
        get_double(*budget, "delta", origin, "budget", std::nullopt);
    try {
      cfg.budget = PrivacyBudget::checked(eps, delta);
    } catch (const std::invalid_argument& e) {
      fail(origin, e.what());
    }
  }

  cfg.derivation = get_string(doc, "derivation", origin, "$", "auto");
  static const std::set<std::string> kDerivations = {
      "auto", "alg1_smooth", "alg1_rank", "dpzero", "none"};
  if (!kDerivations.count(cfg.derivation)) {
    fail(origin,
         "derivation must be auto, alg1_smooth, alg1_rank, dpzero, or none");
  }

  cfg.lambda_scale = get_double(doc, "lambda_scale", origin, "$", 1.0);
  if (!(cfg.lambda_scale > 0) || !(cfg.lambda_scale <= 1)) {
    fail(origin, "lambda_scale must lie in (0, 1]");
  }

  if (const json* params = find(doc, "params")) {
    check_keys(*params, origin, "params", {"alpha", "T", "lambda", "C"});
    if (find(*params, "alpha")) {
      cfg.params.alpha =
          get_double(*params, "alpha", origin, "params", std::nullopt);
    }
    if (find(*params, "T")) {
      cfg.params.T = get_int(*params, "T", origin, "params", std::nullopt);
      if (*cfg.params.T < 1) fail(origin, "params.T must be >= 1");
    }
    if (find(*params, "lambda")) {
      cfg.params.lambda =
          get_double(*params, "lambda", origin, "params", std::nullopt);
    }
    if (const json* clip = find(*params, "C")) {
      cfg.params.clip = number_from_json(*clip, "config " + origin + ": params.C");
    }
  }

  if (const json* seeds = find(doc, "seeds")) {
    if (!seeds->is_array() || seeds->empty()) {
      fail(origin, "seeds must be a nonempty array");
    }
    for (const json& s : *seeds) {
      if (!s.is_number_unsigned()) {
        fail(origin, "seeds entries must be nonnegative integers");
      }
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }

  cfg.output_dir = get_string(doc, "output_dir", origin, "$", "");

  if (const json* trace = find(doc, "trace")) {
    check_keys(*trace, origin, "trace",
               {"snapshot_stride", "grad_log_stride", "write_traces"});
    cfg.trace.snapshot_stride =
        get_int(*trace, "snapshot_stride", origin, "trace", 1);
    cfg.trace.grad_log_stride =
        get_int(*trace, "grad_log_stride", origin, "trace", 1);
    if (cfg.trace.snapshot_stride < 1 || cfg.trace.grad_log_stride < 1) {
      fail(origin, "trace strides must be >= 1");
    }
    if (const json* wt = find(*trace, "write_traces")) {
      if (!wt->is_boolean()) fail(origin, "trace.write_traces must be a boolean");
      cfg.trace.write_traces = wt->get<bool>();
    }
  }

  if (const json* sweep = find(doc, "sweep")) {
    check_keys(*sweep, origin, "sweep", {"d_list", "algorithms"});
    if (const json* d_list = find(*sweep, "d_list")) {
      if (!d_list->is_array() || d_list->empty()) {
        fail(origin, "sweep.d_list must be a nonempty array");
      }
      for (const json& v : *d_list) {
        if (!v.is_number_integer() || v.get<int>() < 1) {
          fail(origin, "sweep.d_list entries must be integers >= 1");
        }
        cfg.sweep.d_list.push_back(v.get<int>());
      }
    }
    if (const json* algorithms = find(*sweep, "algorithms")) {
      if (!algorithms->is_array() || algorithms->empty()) {
        fail(origin, "sweep.algorithms must be a nonempty array");
      }
      cfg.sweep.algorithms.clear();
      for (const json& v : *algorithms) {
        if (!v.is_string() || !algorithm_from_name(v.get<std::string>())) {
          fail(origin, "sweep.algorithms entries must name algorithms");
        }
        cfg.sweep.algorithms.push_back(v.get<std::string>());
      }
    }
  }
  return cfg;
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("config " + path + ": cannot open file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string apply_override(const std::string& json_text,
                           const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override '" + assignment +
                                "' must look like path.key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw_value = assignment.substr(eq + 1);

  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("override target is not valid JSON: ") +
                                e.what());
  }

  std::vector<std::string> segments;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    if (dot == std::string::npos) {
      segments.push_back(path.substr(start));
      break;
    }
    segments.push_back(path.substr(start, dot - start));
    start = dot + 1;
  }
  for (const std::string& s : segments) {
    if (s.empty()) {
      throw std::invalid_argument("override '" + assignment +
                                  "' has an empty path segment");
    }
  }

  json* node = &doc;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    json& next = (*node)[segments[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) {
      throw std::invalid_argument("override '" + assignment + "': '" +
                                  segments[i] + "' is not an object");
    }
    node = &next;
  }

  json value;
  try {
    value = json::parse(raw_value);
  } catch (const json::parse_error&) {
    value = raw_value;  // bare strings need no quotes on the command line
  }
  (*node)[segments.back()] = value;
  return doc.dump();
}

std::string render_config(const ExperimentConfig& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;

  json problem;
  problem["family"] = cfg.problem.family;
  problem["d"] = cfg.problem.d;
  if (cfg.problem.family == "logistic") {
    problem["r"] = cfg.problem.r;
    problem["n"] = cfg.problem.n;
    problem["seed"] = cfg.problem.seed;
    problem["feature_scale"] = cfg.problem.feature_scale;
    problem["start_radius"] = cfg.problem.start_radius;
  } else if (cfg.problem.family == "quadratic") {
    problem["n"] = cfg.problem.n;
    problem["seed"] = cfg.problem.seed;
    problem["spectrum"] = cfg.problem.spectrum;
    problem["start_radius"] = cfg.problem.start_radius;
    problem["region_radius"] = cfg.problem.region_radius;
  } else {
    problem["n"] = cfg.problem.n;
    problem["lipschitz"] = cfg.problem.lipschitz;
    problem["smoothness"] = cfg.problem.smoothness;
    problem["effective_rank"] = cfg.problem.effective_rank;
  }
  doc["problem"] = std::move(problem);

  doc["algorithm"] = cfg.algorithm;
  if (cfg.budget) {
    doc["budget"] = {{"eps", cfg.budget->eps}, {"delta", cfg.budget->delta}};
  }
  doc["derivation"] = cfg.derivation;
  doc["lambda_scale"] = cfg.lambda_scale;

  json params = json::object();
  if (cfg.params.alpha) params["alpha"] = *cfg.params.alpha;
  if (cfg.params.T) params["T"] = *cfg.params.T;
  if (cfg.params.lambda) params["lambda"] = *cfg.params.lambda;
  if (cfg.params.clip) params["C"] = json_number(*cfg.params.clip);
  if (!params.empty()) doc["params"] = std::move(params);

  if (!cfg.seeds.empty()) doc["seeds"] = cfg.seeds;
  doc["output_dir"] = cfg.output_dir;
  doc["trace"] = {{"snapshot_stride", cfg.trace.snapshot_stride},
                  {"grad_log_stride", cfg.trace.grad_log_stride},
                  {"write_traces", cfg.trace.write_traces}};
  if (!cfg.sweep.d_list.empty()) {
    doc["sweep"] = {{"d_list", cfg.sweep.d_list},
                    {"algorithms", cfg.sweep.algorithms}};
  }
  return doc.dump(2) + "\n";
}

Problem build_problem(const ProblemSpec& spec) {
  if (spec.family == "logistic") {
    return Problem::low_rank_logistic(spec.d, spec.r, spec.n, spec.seed,
                                      spec.feature_scale, spec.start_radius);
  }
  if (spec.family == "quadratic") {
    return Problem::spectrum_quadratic(spec.d, spec.spectrum, spec.n,
                                       spec.seed, spec.start_radius,
                                       spec.region_radius);
  }
  throw std::invalid_argument(
      "the metadata problem family only supports parameter derivation");
}

DeriveInputs derive_inputs_from_spec(const ProblemSpec& spec) {
  if (spec.family == "metadata") {
    DeriveInputs in;
    in.n = spec.n;
    in.d = spec.d;
    in.lipschitz = spec.lipschitz;
    in.smoothness = spec.smoothness;
    in.effective_rank = spec.effective_rank;
    return in;
  }
  return derive_inputs(build_problem(spec));
}

HyperParams resolve_params(const ExperimentConfig& cfg) {
  const Algorithm algorithm = *algorithm_from_name(cfg.algorithm);
  const DeriveInputs inputs = derive_inputs_from_spec(cfg.problem);

  HyperParams hp;
  if (cfg.derivation == "none") {
    if (!cfg.params.alpha || !cfg.params.T || !cfg.params.lambda ||
        !cfg.params.clip) {
      throw std::invalid_argument(
          "derivation 'none' requires explicit params.alpha, params.T, "
          "params.lambda, and params.C");
    }
    hp.algorithm = algorithm;
  } else if (algorithm == Algorithm::kZoGd) {
    if (cfg.derivation != "auto") {
      throw std::invalid_argument(
          "the zo-gd baseline supports only the 'auto' or 'none' derivation");
    }
    if (!cfg.params.T) {
      throw std::invalid_argument(
          "the zo-gd baseline has no derived iteration count; set params.T");
    }
    hp = zo_gd_defaults(inputs, *cfg.params.T);
  } else {
    if (!cfg.budget) {
      throw std::invalid_argument(
          "derived private parameters require a budget block");
    }
    std::string derivation = cfg.derivation;
    if (derivation == "auto") {
      derivation = algorithm == Algorithm::kAlg1 ? "alg1_rank" : "dpzero";
    }
    if (algorithm == Algorithm::kAlg1 && derivation == "dpzero") {
      throw std::invalid_argument(
          "derivation 'dpzero' applies only to the dpzero algorithm");
    }
    if (algorithm == Algorithm::kDpZero && derivation != "dpzero") {
      throw std::invalid_argument(
          "the dpzero algorithm uses the 'dpzero' or 'none' derivation");
    }
    if (derivation == "alg1_smooth") {
      hp = derive_params_alg1_smooth(inputs, *cfg.budget, cfg.lambda_scale);
    } else if (derivation == "alg1_rank") {
      hp = derive_params_alg1_rank(inputs, *cfg.budget, cfg.lambda_scale);
    } else {
      hp = derive_params_dpzero(inputs, *cfg.budget, cfg.lambda_scale);
    }
  }

  if (cfg.params.alpha) hp.alpha = *cfg.params.alpha;
  if (cfg.params.T) hp.T = *cfg.params.T;
  if (cfg.params.lambda) hp.lambda = *cfg.params.lambda;
  if (cfg.params.clip) {
    if (algorithm == Algorithm::kZoGd && !std::isinf(*cfg.params.clip)) {
      throw std::invalid_argument("the zo-gd baseline never clips; params.C "
                                  "cannot be finite");
    }
    hp.clip = *cfg.params.clip;
  }

  // Noise is always recalibrated from the final (C, T); without a budget
  // the run is noise-free.
  if (algorithm != Algorithm::kZoGd && cfg.budget) {
    if (std::isinf(hp.clip)) {
      throw std::invalid_argument(
          "an infinite clip threshold cannot be calibrated against a budget");
    }
    hp.sigma = noise_scale(hp.clip, inputs.n, hp.T, *cfg.budget);
  } else {
    hp.sigma = 0;
  }
  return hp;
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need matching arrays of >= 2 points");
  }
  double mean_lx = 0, mean_ly = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) {
      throw std::invalid_argument("fit_loglog_slope: values must be positive");
    }
    mean_lx += std::log(x[i]);
    mean_ly += std::log(y[i]);
  }
  mean_lx /= x.size();
  mean_ly /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mean_lx;
    num += dx * (std::log(y[i]) - mean_ly);
    den += dx * dx;
  }
  if (den == 0) {
    throw std::invalid_argument("fit_loglog_slope: x values are all equal");
  }
  return num / den;
}

std::string summary_to_json(const RunSummary& summary) {
  json doc;
  doc["algorithm"] = summary.algorithm;
  doc["d"] = summary.d;
  doc["r"] = summary.r;
  doc["n"] = summary.n;
  doc["eps"] = summary.eps ? json_number(*summary.eps) : json(nullptr);
  doc["delta"] = summary.delta ? json_number(*summary.delta) : json(nullptr);
  doc["alpha"] = summary.alpha;
  doc["T"] = summary.T;
  doc["lambda"] = summary.lambda;
  doc["C"] = json_number(summary.clip);
  doc["sigma"] = summary.sigma;
  doc["seeds"] = summary.seeds;
  doc["mean_final_grad_norm_sq"] = summary.mean_final_grad_norm_sq;
  doc["stderr"] = summary.stderr_mean;
  if (summary.slope) doc["slope"] = *summary.slope;
  return doc.dump(2) + "\n";
}

std::string trace_filename(const std::string& algorithm, int d,
                           std::uint64_t seed) {
  return "trace_" + algorithm + "_d" + std::to_string(d) + "_seed" +
         std::to_string(seed) + ".csv";
}

namespace {

void write_text_file(const std::string& path, const std::string& content,
                     bool force) {
  namespace fs = std::filesystem;
  if (!force && fs::exists(path)) {
    throw std::runtime_error("refusing to overwrite existing file " + path +
                             " (use --force)");
  }
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

// Shared implementation for single experiments and sweep cells.
RunSummary run_cell(const ExperimentConfig& cfg, bool force, std::ostream* log,
                    const std::string& summary_filename, bool write_config) {
  if (cfg.seeds.empty()) {
    throw std::invalid_argument("running an experiment requires seeds");
  }
  const Problem problem = build_problem(cfg.problem);
  const HyperParams hp = resolve_params(cfg);
  const ProblemInfo& info = problem.info();

  RunOptions options;
  options.snapshot_stride = cfg.trace.snapshot_stride;
  options.grad_log_stride = cfg.trace.grad_log_stride;

  TraceHeader header;
  header.algorithm = cfg.algorithm;
  header.d = problem.dimension();
  header.r = info.effective_rank;
  header.n = problem.sample_count();
  if (cfg.budget && hp.sigma > 0) {
    header.eps = cfg.budget->eps;
    header.delta = cfg.budget->delta;
  }
  header.params = hp;
  header.sensitivity =
      std::isfinite(hp.clip) ? sensitivity_bound(hp.clip, problem.sample_count())
                             : kInf;
  header.problem_fingerprint = problem.fingerprint();
  header.snapshot_stride = cfg.trace.snapshot_stride;
  header.grad_log_stride = cfg.trace.grad_log_stride;

  RunSummary summary;
  summary.algorithm = cfg.algorithm;
  summary.d = problem.dimension();
  summary.r = info.effective_rank;
  summary.n = problem.sample_count();
  summary.eps = header.eps;
  summary.delta = header.delta;
  summary.alpha = hp.alpha;
  summary.T = hp.T;
  summary.lambda = hp.lambda;
  summary.clip = hp.clip;
  summary.sigma = hp.sigma;
  summary.seeds = cfg.seeds;

  for (const std::uint64_t seed : cfg.seeds) {
    const RunResult result = run(problem, hp, seed, options);
    if (problem.family() == ProblemFamily::kQuadratic &&
        result.max_iterate_norm > problem.region_radius()) {
      throw std::runtime_error(
          "iterates left the certified region (max norm " +
          fmt_double(result.max_iterate_norm) + " > radius " +
          fmt_double(problem.region_radius()) +
          "); the quadratic Lipschitz constant no longer applies");
    }
    summary.per_seed_final.push_back(result.final_grad_norm_sq);
    if (!cfg.output_dir.empty() && cfg.trace.write_traces) {
      header.seed = seed;
      const std::string path = (std::filesystem::path(cfg.output_dir) /
                                trace_filename(cfg.algorithm, summary.d, seed))
                                   .string();
      write_trace_csv(path, header, result, force);
    }
    if (log) {
      *log << "algorithm=" << cfg.algorithm << " d=" << summary.d
           << " seed=" << seed << " tau=" << result.tau
           << " final_grad_norm_sq=" << fmt_double(result.final_grad_norm_sq)
           << " clips=" << result.total_clips
           << " wall_seconds=" << result.wall_seconds << "\n";
    }
  }

  double mean = 0;
  for (double v : summary.per_seed_final) mean += v;
  mean /= summary.per_seed_final.size();
  summary.mean_final_grad_norm_sq = mean;
  if (summary.per_seed_final.size() > 1) {
    double var = 0;
    for (double v : summary.per_seed_final) var += (v - mean) * (v - mean);
    var /= (summary.per_seed_final.size() - 1);
    summary.stderr_mean = std::sqrt(var / summary.per_seed_final.size());
  }

  if (!cfg.output_dir.empty()) {
    const std::filesystem::path dir(cfg.output_dir);
    write_text_file((dir / summary_filename).string(),
                    summary_to_json(summary), force);
    if (write_config) {
      write_text_file((dir / "effective_config.json").string(),
                      render_config(cfg), force);
    }
  }
  return summary;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, bool force,
                          std::ostream* log) {
  return run_cell(cfg, force, log, "summary.json", true);
}

SweepResult sweep_dimension(const ExperimentConfig& cfg, bool force,
                            std::ostream* log) {
  if (cfg.sweep.d_list.empty()) {
    throw std::invalid_argument("sweep requires a nonempty sweep.d_list");
  }
  if (cfg.problem.family == "metadata") {
    throw std::invalid_argument("the metadata family cannot be swept");
  }

  SweepResult result;
  for (const std::string& algorithm : cfg.sweep.algorithms) {
    std::vector<double> dims, means;
    std::vector<std::size_t> indices;
    for (const int d : cfg.sweep.d_list) {
      ExperimentConfig cell = cfg;
      cell.algorithm = algorithm;
      cell.problem.d = d;
      // Each algorithm derives its own parameters per dimension unless
      // the config pins them explicitly.
      const std::string summary_name =
          "summary_" + algorithm + "_d" + std::to_string(d) + ".json";
      RunSummary summary = run_cell(cell, force, log, summary_name, false);
      dims.push_back(static_cast<double>(d));
      means.push_back(summary.mean_final_grad_norm_sq);
      indices.push_back(result.summaries.size());
      result.summaries.push_back(std::move(summary));
    }
    if (dims.size() >= 2) {
      const double slope = fit_loglog_slope(dims, means);
      for (const std::size_t i : indices) result.summaries[i].slope = slope;
    }
  }

  if (!cfg.output_dir.empty()) {
    json doc;
    doc["schema_version"] = 1;
    json entries = json::array();
    for (const RunSummary& s : result.summaries) {
      entries.push_back(json::parse(summary_to_json(s)));
    }
    doc["summaries"] = std::move(entries);
    const std::filesystem::path dir(cfg.output_dir);
    write_text_file((dir / "sweep_summary.json").string(), doc.dump(2) + "\n",
                    force);
    write_text_file((dir / "effective_config.json").string(),
                    render_config(cfg), force);
  }
  return result;
}

void write_trace_csv(const std::string& path, const TraceHeader& header,
                     const RunResult& result, bool force) {
  std::ostringstream out;
  out << "# schema_version=" << header.schema_version << "\n";
  out << "# algorithm=" << header.algorithm << "\n";
  out << "# d=" << header.d << "\n";
  out << "# r=" << fmt_double(header.r) << "\n";
  out << "# n=" << header.n << "\n";
  if (header.eps) {
    out << "# eps=" << fmt_double(*header.eps) << "\n";
    out << "# delta=" << fmt_double(*header.delta) << "\n";
  }
  out << "# alpha=" << fmt_double(header.params.alpha) << "\n";
  out << "# T=" << header.params.T << "\n";
  out << "# lambda=" << fmt_double(header.params.lambda) << "\n";
  out << "# C=" << fmt_double(header.params.clip) << "\n";
  out << "# sigma=" << fmt_double(header.params.sigma) << "\n";
  if (header.params.l_tilde != 0) {
    out << "# l_tilde=" << fmt_double(header.params.l_tilde) << "\n";
  }
  out << "# sensitivity=" << fmt_double(header.sensitivity) << "\n";
  out << "# problem=" << header.problem_fingerprint << "\n";
  out << "# seed=" << header.seed << "\n";
  out << "# snapshot_stride=" << header.snapshot_stride << "\n";
  out << "# grad_log_stride=" << header.grad_log_stride << "\n";
  out << "# loss and grad_norm_sq are non-private diagnostics\n";
  out << "t,loss,grad_norm_sq,clip_count\n";
  for (const TraceRow& row : result.rows) {
    out << row.t << "," << fmt_double(row.loss) << ","
        << fmt_double(row.grad_norm_sq) << "," << row.clip_count << "\n";
  }
  out << "# tau=" << result.tau << "\n";
  out << "# final_loss=" << fmt_double(result.final_loss) << "\n";
  out << "# final_grad_norm_sq=" << fmt_double(result.final_grad_norm_sq)
      << "\n";
  out << "# oracle_calls=" << result.oracle_calls << "\n";
  out << "# total_clips=" << result.total_clips << "\n";
  write_text_file(path, out.str(), force);
}

namespace {

[[noreturn]] void trace_fail(const std::string& path, int line,
                             const std::string& message) {
  throw std::invalid_argument("trace " + path + ":" + std::to_string(line) +
                              ": " + message);
}

double parse_double(const std::string& text, const std::string& path,
                    int line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    trace_fail(path, line, "malformed number '" + text + "'");
  }
  return v;
}

}  // namespace

ParsedTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("trace " + path + ": cannot open file");

  ParsedTrace trace;
  std::string line;
  int line_no = 0;
  bool seen_columns = false;
  bool eps_seen = false, delta_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;  // freeform comment
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "schema_version") {
        trace.header.schema_version =
            static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "algorithm") {
        trace.header.algorithm = value;
      } else if (key == "d") {
        trace.header.d = static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "r") {
        trace.header.r = parse_double(value, path, line_no);
      } else if (key == "n") {
        trace.header.n = static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "eps") {
        trace.header.eps = parse_double(value, path, line_no);
        eps_seen = true;
      } else if (key == "delta") {
        trace.header.delta = parse_double(value, path, line_no);
        delta_seen = true;
      } else if (key == "alpha") {
        trace.header.params.alpha = parse_double(value, path, line_no);
      } else if (key == "T") {
        trace.header.params.T =
            static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "lambda") {
        trace.header.params.lambda = parse_double(value, path, line_no);
      } else if (key == "C") {
        trace.header.params.clip = parse_double(value, path, line_no);
      } else if (key == "sigma") {
        trace.header.params.sigma = parse_double(value, path, line_no);
      } else if (key == "l_tilde") {
        trace.header.params.l_tilde = parse_double(value, path, line_no);
      } else if (key == "sensitivity") {
        trace.header.sensitivity = parse_double(value, path, line_no);
      } else if (key == "problem") {
        trace.header.problem_fingerprint = value;
      } else if (key == "seed") {
        trace.header.seed =
            static_cast<std::uint64_t>(parse_double(value, path, line_no));
      } else if (key == "snapshot_stride") {
        trace.header.snapshot_stride =
            static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "grad_log_stride") {
        trace.header.grad_log_stride =
            static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "tau") {
        trace.tau = static_cast<int>(parse_double(value, path, line_no));
      } else if (key == "final_loss") {
        trace.final_loss = parse_double(value, path, line_no);
      } else if (key == "final_grad_norm_sq") {
        trace.final_grad_norm_sq = parse_double(value, path, line_no);
      } else if (key == "oracle_calls") {
        trace.oracle_calls =
            static_cast<long long>(parse_double(value, path, line_no));
      } else if (key == "total_clips") {
        trace.total_clips =
            static_cast<int>(parse_double(value, path, line_no));
      } else {
        trace_fail(path, line_no, "unknown header key '" + key + "'");
      }
      continue;
    }
    if (line == "t,loss,grad_norm_sq,clip_count") {
      seen_columns = true;
      continue;
    }
    if (line.empty()) continue;

    // Data row: t,loss,grad_norm_sq,clip_count.
    if (!seen_columns) trace_fail(path, line_no, "data before column header");
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (fields.size() != 4) {
      trace_fail(path, line_no, "expected 4 comma-separated fields");
    }
    TraceRow row;
    row.t = static_cast<int>(parse_double(fields[0], path, line_no));
    row.loss = parse_double(fields[1], path, line_no);
    row.grad_norm_sq = parse_double(fields[2], path, line_no);
    row.clip_count = static_cast<int>(parse_double(fields[3], path, line_no));
    if (row.t != static_cast<int>(trace.rows.size())) {
      trace_fail(path, line_no, "iteration indices must run 0..T in order");
    }
    trace.rows.push_back(row);
  }

  if (!seen_columns) {
    throw std::invalid_argument("trace " + path + ": missing column header");
  }
  if (static_cast<int>(trace.rows.size()) != trace.header.params.T + 1) {
    throw std::invalid_argument(
        "trace " + path + ": row count " + std::to_string(trace.rows.size()) +
        " does not match T + 1 = " + std::to_string(trace.header.params.T + 1));
  }
  const long long expected_calls =
      2LL * trace.header.n * trace.header.params.T;
  if (trace.oracle_calls != expected_calls) {
    throw std::invalid_argument(
        "trace " + path + ": oracle_calls " +
        std::to_string(trace.oracle_calls) + " != 2nT = " +
        std::to_string(expected_calls));
  }
  if (eps_seen != delta_seen) {
    throw std::invalid_argument("trace " + path +
                                ": eps and delta must appear together");
  }
  if (eps_seen) {
    const PrivacyBudget budget =
        PrivacyBudget::checked(*trace.header.eps, *trace.header.delta);
    const double expected = noise_scale(trace.header.params.clip,
                                        trace.header.n, trace.header.params.T,
                                        budget);
    const double err = std::abs(trace.header.params.sigma - expected);
    if (err > 1e-12 * std::max(expected, 1e-300)) {
      throw std::invalid_argument(
          "trace " + path + ": stored sigma " +
          fmt_double(trace.header.params.sigma) +
          " disagrees with recomputed " + fmt_double(expected));
    }
  }
  return trace;
}

}  // namespace zodp
