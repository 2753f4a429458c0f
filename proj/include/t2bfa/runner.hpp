#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "t2bfa/bfa.hpp"
#include "t2bfa/fuzzy_type2.hpp"
#include "t2bfa/irrigation.hpp"
#include "t2bfa/pareto.hpp"

// Experiment plumbing behind the t2bfa command line. Every command reads files, computes, and
// writes its outputs from the calling thread only, so output bytes never depend on scheduling.
namespace t2bfa::runner {

namespace fs = std::filesystem;

struct RunConfig {
  fs::path climate_csv;  // required by fuzzify and whenever grade_context is set
  irrigation::ProblemSpec problem;
  bfa::BfaConfig bfa;
  fs::path output_dir = "t2bfa_out";
  std::optional<irrigation::GradeContext> grade_context;
  double grid_step = 0.1;
  double grid_minimum = 0.1;
  int runs_per_weight = 5;
  std::uint64_t master_seed = 0;
  double noise_pad = irrigation::kDefaultNoisePad;
  int workers = 1;

  /// Throws InvalidConfig for bad counts or pad, FileNotFound for a missing climate file.
  void validate() const;
};

/// Parses a run config. Relative paths, including "problem" / "bfa" given as file names, resolve
/// against `base_dir`. Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, const fs::path& base_dir);
RunConfig load_run_config(const fs::path& path);

nlohmann::json read_json_file(const fs::path& path);
std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view content);

/// Problem with the grade context applied (noise intervals narrowed), or the configured problem
/// unchanged when there is no context.
irrigation::ProblemSpec effective_problem(const RunConfig& cfg);

struct FuzzifyOutput {
  fuzzy::Type2FuzzyVariable temperature;
  fuzzy::Type2FuzzyVariable insolation;
};

/// Writes temperature_model.json and insolation_model.json into the output directory.
FuzzifyOutput cmd_fuzzify(const RunConfig& cfg, std::ostream& log);

struct OptimizeOutput {
  pareto::SolutionPoint point;
  bfa::RunTrace trace;
  std::size_t evaluations = 0;
};

/// One solver run at `weights` with `seed`. Writes solution.csv and trace.csv.
OptimizeOutput cmd_optimize(const RunConfig& cfg, const irrigation::WeightVector& weights, std::uint64_t seed,
                            std::ostream& log);

inline constexpr double kSphereThreshold = -1e-2;

/// Maximizes -|x|^2 on [-5, 5]^4 with the configured solver settings. Throws SelfTestFailed when
/// the best fitness stays below kSphereThreshold.
double cmd_sphere_self_test(const bfa::BfaConfig& cfg, std::uint64_t seed, std::ostream& log);

struct BundleFiles {
  static constexpr const char* frontier = "frontier.csv";
  static constexpr const char* pareto = "frontier_pareto.csv";
  static constexpr const char* metrics = "metrics.json";
  static constexpr const char* manifest = "manifest.json";
  static constexpr const char* summary = "summary.txt";
  static constexpr const char* traces = "traces";
};

/// Full sweep. Writes the bundle (raw and Pareto-filtered frontier CSVs, metrics, manifest,
/// summary and one trace per weight for the winning run) and returns the metrics.
pareto::FrontierMetrics cmd_frontier(const RunConfig& cfg, std::ostream& log);

/// Recomputes metrics from a frontier CSV. The grade context is taken from a manifest.json
/// next to the CSV when one exists.
pareto::FrontierMetrics cmd_metrics(const fs::path& frontier_csv);

/// JSON text exactly as written into bundles.
std::string metrics_json_text(const pareto::FrontierMetrics& m);

/// Best / median / worst table with objectives, decisions, noise and F as rows.
std::string ranking_table(const pareto::Frontier& frontier);

/// Ranks bundles by dominance (descending) and lists diversity, the ranking tables and the
/// deviation notes. Every number is recomputed from the bundle CSVs. Throws IncompleteBundle
/// when a bundle lacks a file or its metrics disagree with its CSV.
std::string cmd_report(const std::vector<fs::path>& bundles);

/// Number formatting used in every text output.
std::string num(double v);

}  // namespace t2bfa::runner
