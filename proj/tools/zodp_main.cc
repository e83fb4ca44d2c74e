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

// Command line front end. Exit codes: 0 on success, 1 when a run or a
// statistical check fails, 2 for usage and configuration errors.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zodp/harness.h"
#include "zodp/validation.h"

namespace {

constexpr const char* kConfigHelp = R"(Config file keys:
  schema_version            must be 1
  problem.family            logistic | quadratic | metadata
  problem.d                 ambient dimension
  problem.r                 logistic subspace dimension
  problem.n                 sample count
  problem.seed              data generation seed (logistic, quadratic)
  problem.feature_scale     logistic feature norm cap (default 1)
  problem.start_radius      distance of the start point from the optimum
  problem.spectrum          quadratic eigenvalues, nonincreasing
  problem.region_radius     quadratic trust region (0 = automatic)
  problem.lipschitz         metadata family: Lipschitz constant L
  problem.smoothness        metadata family: smoothness constant
  problem.effective_rank    metadata family: effective rank r
  algorithm                 alg1 | dpzero | zo-gd
  budget.eps, budget.delta  privacy budget (omit for noise-free runs)
  derivation                auto | alg1_smooth | alg1_rank | dpzero | none
  lambda_scale              smoothing radius as a fraction of its bound
  params.alpha/T/lambda/C   explicit hyperparameter overrides
  seeds                     run seeds (required for run and sweep)
  output_dir                where traces and summaries are written
  trace.snapshot_stride     keep every k-th iterate as an output candidate
  trace.grad_log_stride     measure the gradient norm every k-th row
  trace.write_traces        write per-seed trace CSVs (default true)
  sweep.d_list              dimensions for the sweep command
  sweep.algorithms          algorithms for the sweep command)";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

zodp::ExperimentConfig load_config(const std::string& path,
                                   const std::vector<std::string>& overrides,
                                   const std::string& out_dir) {
  std::string text = read_file(path);
  for (const std::string& assignment : overrides) {
    text = zodp::apply_override(text, assignment);
  }
  zodp::ExperimentConfig cfg = zodp::parse_config(text, path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return cfg;
}

std::string params_to_json(const zodp::HyperParams& hp, int n) {
  nlohmann::json doc;
  doc["algorithm"] = zodp::algorithm_name(hp.algorithm);
  doc["alpha"] = hp.alpha;
  doc["T"] = hp.T;
  doc["lambda"] = hp.lambda;
  doc["C"] = std::isfinite(hp.clip) ? nlohmann::json(hp.clip)
                                    : nlohmann::json("inf");
  doc["sigma"] = hp.sigma;
  if (hp.l_tilde > 0) doc["l_tilde"] = hp.l_tilde;
  doc["sensitivity"] = std::isfinite(hp.clip)
                           ? nlohmann::json(zodp::sensitivity_bound(hp.clip, n))
                           : nlohmann::json("inf");
  return doc.dump(2) + "\n";
}

int do_run(const zodp::ExperimentConfig& cfg, bool force) {
  const zodp::RunSummary summary = zodp::run_experiment(cfg, force, &std::cerr);
  std::cout << zodp::summary_to_json(summary);
  return 0;
}

int do_sweep(const zodp::ExperimentConfig& cfg, bool force) {
  const zodp::SweepResult result = zodp::sweep_dimension(cfg, force, &std::cerr);
  nlohmann::json doc;
  doc["schema_version"] = 1;
  nlohmann::json entries = nlohmann::json::array();
  for (const zodp::RunSummary& s : result.summaries) {
    entries.push_back(nlohmann::json::parse(zodp::summary_to_json(s)));
  }
  doc["summaries"] = std::move(entries);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int do_params(const zodp::ExperimentConfig& cfg) {
  const zodp::HyperParams hp = zodp::resolve_params(cfg);
  std::cout << params_to_json(hp, cfg.problem.n);
  return 0;
}

int do_validate(std::uint64_t seed, bool quick, bool corrupt,
                const std::string& out_path) {
  const zodp::SphereSampler sampler =
      corrupt ? zodp::gaussian_sampler() : zodp::default_sphere_sampler();
  const std::vector<zodp::CheckReport> reports =
      zodp::run_default_checks(seed, quick, sampler);

  const std::string jsonl = zodp::reports_to_jsonl(reports);
  if (out_path.empty()) {
    std::cout << jsonl;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << jsonl;
  }

  bool all_pass = true;
  for (const zodp::CheckReport& r : reports) {
    std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " ("
              << r.sample_count << " samples)\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private zeroth-order optimization toolkit"};
  app.require_subcommand(1);
  app.footer(kConfigHelp);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool force = false;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Run one experiment over its seeds");
  run_cmd->add_option("--config", config_path, "experiment config JSON")
      ->required();
  run_cmd->add_option("--set", overrides,
                      "dotted-path config override, e.g. problem.d=512");
  run_cmd->add_option("--out", out_dir, "replaces output_dir from the config");
  run_cmd->add_flag("--force", force, "overwrite existing output files");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Sweep dimensions and fit log-log slopes");
  sweep_cmd->add_option("--config", config_path, "experiment config JSON")
      ->required();
  sweep_cmd->add_option("--set", overrides, "dotted-path config override");
  sweep_cmd->add_option("--out", out_dir,
                        "replaces output_dir from the config");
  sweep_cmd->add_flag("--force", force, "overwrite existing output files");

  CLI::App* params_cmd = app.add_subcommand(
      "params", "Print the derived hyperparameters without running");
  params_cmd->add_option("--config", config_path, "experiment config JSON")
      ->required();
  params_cmd->add_option("--set", overrides, "dotted-path config override");

  std::uint64_t val_seed = 1;
  bool quick = false;
  bool corrupt = false;
  std::string val_out;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Run the statistical check suite");
  validate_cmd->add_option("--seed", val_seed, "top-level check seed");
  validate_cmd->add_flag("--quick", quick, "smaller Monte Carlo sample sizes");
  validate_cmd->add_option("--out", val_out, "write JSONL reports here");
  validate_cmd->add_flag("--corrupt-sampler", corrupt)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run_cmd) {
      return do_run(load_config(config_path, overrides, out_dir), force);
    }
    if (*sweep_cmd) {
      return do_sweep(load_config(config_path, overrides, out_dir), force);
    }
    if (*params_cmd) {
      return do_params(load_config(config_path, overrides, ""));
    }
    return do_validate(val_seed, quick, corrupt, val_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
