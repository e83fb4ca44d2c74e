// Copyright 2026 The zodp Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line binary, driven through std::system.
// The binary path is injected by the build as ZODP_CLI_PATH.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const char* cli_path() { return ZODP_CLI_PATH; }

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "zodp_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(cli_path()) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

const char* kDerivationConfig = R"({
  "schema_version": 1,
  "problem": {"family": "metadata", "d": 1024, "n": 1000,
              "lipschitz": 1.0, "smoothness": 1.0, "effective_rank": 4.0},
  "algorithm": "dpzero",
  "budget": {"eps": 2.0, "delta": 1e-5}
})";

const char* kRunConfig = R"({
  "schema_version": 1,
  "problem": {"family": "logistic", "d": 12, "r": 2, "n": 30, "seed": 4,
              "feature_scale": 1.0, "start_radius": 1.0},
  "algorithm": "dpzero",
  "budget": {"eps": 2.0, "delta": 1e-5},
  "seeds": [1, 2]
})";

TEST_SUITE_BEGIN("cli");

TEST_CASE("params reproduces the derived hyperparameters exactly") {
  const fs::path cfg = write_config("params.json", kDerivationConfig);
  const CliResult r = run_cli("params --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["algorithm"] == "dpzero");
  CHECK(doc["alpha"].get<double>() ==
        doctest::Approx(1.0 / 24).epsilon(1e-15));
  CHECK(doc["T"].get<int>() == 429);
  CHECK(doc["lambda"].get<double>() ==
        doctest::Approx(1.8038240522617652e-06).epsilon(1e-13));
  CHECK(doc["C"].get<double>() ==
        doctest::Approx(21.375368301415282).epsilon(1e-13));
  CHECK(doc["sigma"].get<double>() ==
        doctest::Approx(4.374973865011569).epsilon(1e-13));
  CHECK(doc["l_tilde"].get<double>() ==
        doctest::Approx(5.3438420753538205).epsilon(1e-13));
  CHECK(doc["sensitivity"].get<double>() ==
        doctest::Approx(2 * 21.375368301415282 / 1000).epsilon(1e-13));
}

TEST_CASE("--set overrides reach the parsed config") {
  const fs::path cfg = write_config("override.json", kDerivationConfig);
  const CliResult r = run_cli("params --config " + cfg.string() +
                              " --set budget.eps=4 --set problem.d=100");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  // eps doubled and d changed, so T and sigma move away from the baseline.
  CHECK(doc["T"].get<int>() != 429);
}

TEST_CASE("config and usage errors exit with status 2") {
  const fs::path bad_delta = write_config("bad_delta.json", R"({
    "schema_version": 1,
    "problem": {"family": "logistic", "d": 8, "r": 2, "n": 10, "seed": 0},
    "budget": {"eps": 1.0, "delta": 1.5}
  })");
  CliResult r = run_cli("params --config " + bad_delta.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("delta") != std::string::npos);

  const fs::path bad_rank = write_config("bad_rank.json", R"({
    "schema_version": 1,
    "problem": {"family": "logistic", "d": 4, "r": 9, "n": 10, "seed": 0}
  })");
  r = run_cli("params --config " + bad_rank.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("problem.r") != std::string::npos);

  const fs::path ok = write_config("ok.json", kDerivationConfig);
  r = run_cli("params --config " + ok.string() + " --set nonsense");
  CHECK(r.exit_code == 2);

  r = run_cli("params --config " + ok.string() + " --bogus-flag");
  CHECK(r.exit_code == 2);

  r = run_cli("");
  CHECK(r.exit_code == 2);

  r = run_cli("params --config /nonexistent/path.json");
  CHECK(r.exit_code == 2);
}

TEST_CASE("help exits cleanly and documents the config schema") {
  CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  for (const char* word : {"run", "sweep", "params", "validate"}) {
    CHECK(r.out.find(word) != std::string::npos);
  }
  // The footer documents every accepted config key.
  for (const char* key : {"schema_version", "lambda_scale", "derivation",
                          "budget.eps", "sweep.d_list"}) {
    CHECK(r.out.find(key) != std::string::npos);
  }
  r = run_cli("run --help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("--config") != std::string::npos);
}

TEST_CASE("run writes deterministic artifacts behind a force guard") {
  const fs::path cfg = write_config("run.json", kRunConfig);
  const fs::path out_dir = scratch_dir() / "run_out";

  CliResult r = run_cli("run --config " + cfg.string() + " --out " +
                        out_dir.string());
  REQUIRE(r.exit_code == 0);
  const nlohmann::json summary = nlohmann::json::parse(r.out);
  CHECK(summary["algorithm"] == "dpzero");
  CHECK(summary["seeds"].size() == 2);
  CHECK(summary["mean_final_grad_norm_sq"].is_number());
  const std::string summary_bytes = slurp(out_dir / "summary.json");
  REQUIRE(!summary_bytes.empty());

  r = run_cli("run --config " + cfg.string() + " --out " + out_dir.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("--force") != std::string::npos);

  r = run_cli("run --config " + cfg.string() + " --out " + out_dir.string() +
              " --force");
  CHECK(r.exit_code == 0);
  CHECK(slurp(out_dir / "summary.json") == summary_bytes);
}

TEST_CASE("validate reports pass lines and fails corrupted samplers") {
  CliResult r = run_cli("validate --quick --seed 1");
  REQUIRE(r.exit_code == 0);
  int reports = 0;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const nlohmann::json doc = nlohmann::json::parse(line);
    CHECK(doc["pass"].get<bool>());
    ++reports;
  }
  CHECK(reports == 8);
  CHECK(r.err.find("[PASS]") != std::string::npos);
  CHECK(r.err.find("[FAIL]") == std::string::npos);

  r = run_cli("validate --quick --seed 1 --corrupt-sampler");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("[FAIL] sphere_moments") != std::string::npos);
}

TEST_SUITE_END();

}  // namespace
