// t2bfa: fuzzify climate data, optimize one weight vector, sweep frontiers, compute metrics and
// report. Exit codes: 0 success, 1 invalid input, 2 runtime failure. Failures print one line
// "error: <Code>: <message>" on stderr.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "t2bfa/error.hpp"
#include "t2bfa/irrigation.hpp"
#include "t2bfa/runner.hpp"

namespace {

namespace fs = std::filesystem;
using namespace t2bfa;

int fail(std::string_view code, const std::string& message, int status) {
  std::cerr << "error: " << code << ": " << message << "\n";
  return status;
}

runner::RunConfig config_from(const std::string& path) {
  return path.empty() ? runner::RunConfig{} : runner::load_run_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type-2 fuzzy / bacterial foraging irrigation optimizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string weights_text;
  std::string climate_path;
  bool sphere = false;
  std::vector<std::string> positional;

  auto* fuzzify = app.add_subcommand("fuzzify", "Fit type-2 fuzzy models to the climate table");
  fuzzify->add_option("--config", config_path, "Run config JSON");
  fuzzify->add_option("--climate", climate_path, "Climate CSV (overrides the config)");
  fuzzify->add_option("--out", out_dir, "Output directory");

  auto* optimize = app.add_subcommand("optimize", "Single solver run at one weight vector");
  optimize->add_option("--config", config_path, "Run config JSON");
  optimize->add_option("--weights", weights_text, "Weights w1,w2,w3 summing to 1");
  optimize->add_option("--seed", seed, "Solver seed");
  optimize->add_option("--out", out_dir, "Output directory");
  optimize->add_flag("--sphere-self-test", sphere, "Run the sphere sanity check instead");

  auto* frontier = app.add_subcommand("frontier", "Weight sweep producing a frontier bundle");
  frontier->add_option("--config", config_path, "Run config JSON");
  frontier->add_option("--seed", seed, "Master seed");
  frontier->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  frontier->add_option("--out", out_dir, "Bundle directory");

  auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a frontier CSV");
  metrics->add_option("csv", positional, "Frontier CSV")->required()->expected(1);
  metrics->add_option("--out", out_dir, "Write the JSON to this file");

  auto* report = app.add_subcommand("report", "Rank frontier bundles");
  report->add_option("bundles", positional, "Bundle directories")->required();
  report->add_option("--out", out_dir, "Write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(to_string(ErrorCode::InvalidConfig), e.what(), 1);
  }

  try {
    if (*fuzzify) {
      auto cfg = config_from(config_path);
      if (!climate_path.empty()) cfg.climate_csv = climate_path;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      runner::cmd_fuzzify(cfg, std::cout);
    } else if (*optimize) {
      auto cfg = config_from(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (sphere) {
        runner::cmd_sphere_self_test(cfg.bfa, seed.value_or(cfg.bfa.seed), std::cout);
      } else {
        if (weights_text.empty()) throw Error(ErrorCode::InvalidWeights, "--weights is required");
        cfg.validate();
        runner::cmd_optimize(cfg, irrigation::parse_weights(weights_text), seed.value_or(cfg.bfa.seed), std::cout);
      }
    } else if (*frontier) {
      auto cfg = config_from(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (seed) cfg.master_seed = *seed;
      if (workers) cfg.workers = *workers;
      runner::cmd_frontier(cfg, std::cout);
    } else if (*metrics) {
      const auto text = runner::metrics_json_text(runner::cmd_metrics(positional.front()));
      if (!out_dir.empty()) runner::write_text_file(out_dir, text);
      std::cout << text;
    } else if (*report) {
      std::vector<fs::path> dirs(positional.begin(), positional.end());
      const auto text = runner::cmd_report(dirs);
      if (!out_dir.empty()) runner::write_text_file(out_dir, text);
      std::cout << text;
    }
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.detail(), is_validation_error(e.code()) ? 1 : 2);
  } catch (const nlohmann::json::exception& e) {
    return fail(to_string(ErrorCode::InvalidConfig), e.what(), 1);
  } catch (const fs::filesystem_error& e) {
    return fail(to_string(ErrorCode::IoFailure), e.what(), 2);
  } catch (const std::exception& e) {
    return fail("Internal", e.what(), 2);
  }
  return 0;
}
