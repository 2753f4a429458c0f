#include <algorithm>
#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "t2bfa/error.hpp"
#include "t2bfa/runner.hpp"
#include "t2bfa/text.hpp"

using namespace t2bfa;
using namespace t2bfa::runner;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("t2bfa_runner_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoFailure;
}

RunConfig small_config(const fs::path& out) {
  auto cfg = run_config_from_json(json::parse(R"({
      "climate_csv": "climate_table1.csv",
      "bfa": {"total_iterations": 2},
      "weight_grid": {"step": 0.5, "minimum": 0.0},
      "runs_per_weight": 1,
      "master_seed": 7
    })"),
                                  T2BFA_DATA_DIR);
  cfg.output_dir = out;
  return cfg;
}

std::size_t data_rows(const std::string& csv) {
  return static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
}

void write_bundle(const fs::path& dir, const std::string& label, std::vector<double> Fs) {
  pareto::Frontier f;
  const auto grid = pareto::weight_grid(0.5, 0.0);
  for (std::size_t i = 0; i < Fs.size(); ++i) {
    pareto::SolutionPoint p;
    p.weights = grid[i];
    p.objectives = {Fs[i], 1.0 + static_cast<double>(i), 2.0};
    p.aggregate_F = Fs[i];
    f.points.push_back(p);
  }
  write_text_file(dir / BundleFiles::frontier, pareto::frontier_csv(f.points));
  write_text_file(dir / BundleFiles::metrics, metrics_json_text(pareto::compute_metrics(f)));
  json manifest{{"label", label}, {"grade_context", nullptr}, {"problem", irrigation::ProblemSpec{}}};
  write_text_file(dir / BundleFiles::manifest, manifest.dump(2) + "\n");
}

}  // namespace

TEST_CASE("run config parsing") {
  const auto cfg = run_config_from_json(json::object(), "");
  CHECK(cfg.runs_per_weight == 5);
  CHECK(cfg.grid_step == 0.1);
  CHECK(cfg.bfa == bfa::BfaConfig{});
  CHECK(cfg.problem == irrigation::ProblemSpec{});

  CHECK(code_of([] { run_config_from_json(json{{"colour", 1}}, ""); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { run_config_from_json(json{{"runs_per_weight", "five"}}, ""); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { run_config_from_json(json::array(), ""); }) == ErrorCode::InvalidConfig);

  const auto f1 = load_run_config(fs::path(T2BFA_CONFIG_DIR) / "frontier1.json");
  REQUIRE(f1.grade_context);
  CHECK(f1.grade_context->temperature_secondary.lo == 0.17169);
  CHECK(f1.bfa.population == 25);
  CHECK(f1.problem.mode == irrigation::VariableMode::Coded);
  CHECK(fs::exists(f1.climate_csv));
  CHECK_NOTHROW(f1.validate());

  RunConfig missing;
  missing.climate_csv = "/nonexistent/climate.csv";
  CHECK(code_of([&] { missing.validate(); }) == ErrorCode::FileNotFound);
  RunConfig no_climate;
  no_climate.grade_context = irrigation::GradeContext{};
  CHECK(code_of([&] { no_climate.validate(); }) == ErrorCode::InvalidConfig);
  RunConfig bad_pad;
  bad_pad.noise_pad = 0.0;
  CHECK(code_of([&] { bad_pad.validate(); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { load_run_config("/nonexistent/run.json"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("effective problem applies the grade context") {
  const auto f1 = load_run_config(fs::path(T2BFA_CONFIG_DIR) / "frontier1.json");
  const auto p = effective_problem(f1);
  CHECK(p.z_a.midpoint() == doctest::Approx(292.15).epsilon(1e-4));
  CHECK(p.z_b.lo == doctest::Approx(117.2).epsilon(1e-3));
  CHECK(effective_problem(RunConfig{}) == irrigation::ProblemSpec{});
}

TEST_CASE("fuzzify writes both models") {
  const auto dir = scratch("fuzzify");
  auto cfg = small_config(dir);
  std::ostringstream log;
  const auto out = cmd_fuzzify(cfg, log);
  CHECK(out.temperature.annual_domain() == Interval{265.2, 309.1});
  CHECK(out.insolation.annual_domain() == Interval{14, 336});
  CHECK(log.str().find("annual (265.2, 309.1)") != std::string::npos);
  const auto j = read_json_file(dir / "temperature_model.json");
  CHECK(j.get<fuzzy::Type2FuzzyVariable>() == out.temperature);

  std::string flat = "month,temp_max,temp_min,temp_avg,insol_max,insol_min,insol_avg\n";
  for (int m = 1; m <= 12; ++m) flat += std::to_string(m) + ",290,290,290,100,100,100\n";
  write_text_file(dir / "flat.csv", flat);
  cfg.climate_csv = dir / "flat.csv";
  CHECK(code_of([&] { cmd_fuzzify(cfg, log); }) == ErrorCode::DegenerateRange);
}

TEST_CASE("optimize is deterministic") {
  const auto dir = scratch("optimize");
  auto cfg = small_config(dir / "a");
  std::ostringstream log;
  const irrigation::WeightVector w(0.1, 0.1, 0.8);
  const auto a = cmd_optimize(cfg, w, 99, log);
  cfg.output_dir = dir / "b";
  const auto b = cmd_optimize(cfg, w, 99, log);
  CHECK(read_text_file(dir / "a" / "solution.csv") == read_text_file(dir / "b" / "solution.csv"));
  CHECK(read_text_file(dir / "a" / "trace.csv") == read_text_file(dir / "b" / "trace.csv"));
  CHECK(a.point.aggregate_F == irrigation::aggregate(a.point.objectives, w));
  CHECK(a.point.seed == 99);
  CHECK(b.evaluations == a.evaluations);
}

TEST_CASE("sphere self-test") {
  std::ostringstream log;
  CHECK(cmd_sphere_self_test(bfa::BfaConfig{}, 1, log) >= kSphereThreshold);
  CHECK(log.str().find("PASS") != std::string::npos);
  bfa::BfaConfig weak;
  weak.population = 2;
  weak.total_iterations = weak.elimination_steps = weak.reproduction_steps = weak.chemotactic_steps = 1;
  weak.swim_length = 1;
  CHECK(code_of([&] { cmd_sphere_self_test(weak, 1, log); }) == ErrorCode::SelfTestFailed);
}

TEST_CASE("frontier bundle") {
  const auto dir = scratch("frontier");
  const auto cfg = small_config(dir / "run1" / "bundle");
  std::ostringstream log;
  const auto m = cmd_frontier(cfg, log);
  CHECK(m.n_points == 6);

  const auto csv = read_text_file(dir / "run1" / "bundle" / BundleFiles::frontier);
  CHECK(data_rows(csv) == 6);
  const auto manifest = read_json_file(dir / "run1" / "bundle" / BundleFiles::manifest);
  CHECK(manifest.at("total_runs") == 6);
  CHECK(manifest.at("weight_grid").at("n_weights") == 6);
  CHECK(manifest.at("traces").size() == 6);
  for (const auto& t : manifest.at("traces")) CHECK(fs::exists(dir / "run1" / "bundle" / t.get<std::string>()));
  const auto summary = read_text_file(dir / "run1" / "bundle" / BundleFiles::summary);
  CHECK(summary.find("points: 6\n") != std::string::npos);
  CHECK(summary.find("runs: 6 (1 per weight)\n") != std::string::npos);
  CHECK(summary.find(ranking_table(pareto::Frontier{pareto::parse_frontier_csv(csv), {}})) != std::string::npos);
  const auto pareto_rows = data_rows(read_text_file(dir / "run1" / "bundle" / BundleFiles::pareto));
  CHECK(pareto_rows >= 1);
  CHECK(pareto_rows <= 6);

  auto again = cfg;
  again.output_dir = dir / "run2" / "bundle";
  again.workers = 3;
  cmd_frontier(again, log);
  for (const char* file : {BundleFiles::frontier, BundleFiles::pareto, BundleFiles::metrics, BundleFiles::summary}) {
    CHECK(read_text_file(dir / "run1" / "bundle" / file) == read_text_file(dir / "run2" / "bundle" / file));
  }

  CHECK(metrics_json_text(cmd_metrics(dir / "run1" / "bundle" / BundleFiles::frontier)) ==
        read_text_file(dir / "run1" / "bundle" / BundleFiles::metrics));

  const auto report = cmd_report({dir / "run1" / "bundle"});
  CHECK(report.find("\n1,bundle,") != std::string::npos);
  CHECK(report.find("\n2,") == std::string::npos);
  CHECK(report.find("weight grid has 6 points") != std::string::npos);
  CHECK(report.find("1.2022") != std::string::npos);
}

TEST_CASE("metrics from a CSV alone") {
  const auto dir = scratch("metrics");
  write_bundle(dir, "fixture", {1, 2, 3});
  fs::remove(dir / BundleFiles::manifest);
  const auto m = cmd_metrics(dir / BundleFiles::frontier);
  CHECK(m.dominance_mean_F == 2.0);
  CHECK_FALSE(m.grade_context);

  auto lines = std::vector<std::string>{};
  std::istringstream in(read_text_file(dir / BundleFiles::frontier));
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::reverse(lines.begin() + 1, lines.end());
  std::string shuffled;
  for (const auto& l : lines) shuffled += l + "\n";
  write_text_file(dir / "shuffled.csv", shuffled);
  CHECK(metrics_json_text(cmd_metrics(dir / "shuffled.csv")) == metrics_json_text(m));

  write_text_file(dir / "bad.csv", "a,b,c\n");
  CHECK(code_of([&] { cmd_metrics(dir / "bad.csv"); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("report ranks bundles by dominance") {
  const auto dir = scratch("report");
  write_bundle(dir / "a", "low", {1, 1, 1});
  write_bundle(dir / "b", "mid", {2, 2, 2});
  write_bundle(dir / "c", "high", {3, 3, 3});
  const auto text = cmd_report({dir / "a", dir / "b", dir / "c"});
  const auto high = text.find("1,high,");
  const auto mid = text.find("2,mid,");
  const auto low = text.find("3,low,");
  CHECK(high != std::string::npos);
  CHECK(mid != std::string::npos);
  CHECK(low != std::string::npos);
  CHECK(high < mid);
  CHECK(mid < low);
  CHECK(text.find("equation repairs active") != std::string::npos);

  fs::remove(dir / "b" / BundleFiles::metrics);
  CHECK(code_of([&] { cmd_report({dir / "a", dir / "b"}); }) == ErrorCode::IncompleteBundle);
  write_text_file(dir / "a" / BundleFiles::metrics, "{}\n");
  CHECK(code_of([&] { cmd_report({dir / "a"}); }) == ErrorCode::IncompleteBundle);
  CHECK(code_of([] { cmd_report({}); }) == ErrorCode::IncompleteBundle);
}
