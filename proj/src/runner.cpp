#include "t2bfa/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "t2bfa/climate.hpp"
#include "t2bfa/error.hpp"
#include "t2bfa/text.hpp"

namespace t2bfa::runner {

using nlohmann::json;

std::string num(double v) { return text::format_roundtrip(v); }

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

json read_json_file(const fs::path& path) {
  const auto content = read_text_file(path);
  try {
    return json::parse(content);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void RunConfig::validate() const {
  if (runs_per_weight < 1) throw Error(ErrorCode::InvalidConfig, "runs_per_weight must be >= 1");
  if (workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
  if (!(noise_pad > 0.0)) throw Error(ErrorCode::InvalidConfig, "noise_pad must be > 0");
  if (!(grid_step > 0.0) || !(grid_minimum >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "weight_grid needs step > 0 and minimum >= 0");
  }
  if (grade_context && climate_csv.empty()) {
    throw Error(ErrorCode::InvalidConfig, "grade_context needs climate_csv");
  }
  if (!climate_csv.empty() && !fs::exists(climate_csv)) {
    throw Error(ErrorCode::FileNotFound, "climate file not found: " + climate_csv.string());
  }
  problem.validate();
  bfa.validate();
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

template <typename T>
T section(const json& value, const fs::path& base) {
  if (value.is_string()) return read_json_file(resolve(base, value.get<std::string>())).get<T>();
  return value.get<T>();
}

}  // namespace

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  static const std::set<std::string> known{"climate_csv",     "problem",     "bfa",       "output_dir",
                                           "grade_context",   "weight_grid", "runs_per_weight",
                                           "master_seed",     "noise_pad",   "workers"};
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "run config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
  RunConfig cfg;
  try {
    if (j.contains("climate_csv")) cfg.climate_csv = resolve(base_dir, j.at("climate_csv").get<std::string>());
    if (j.contains("problem")) cfg.problem = section<irrigation::ProblemSpec>(j.at("problem"), base_dir);
    if (j.contains("bfa")) cfg.bfa = section<bfa::BfaConfig>(j.at("bfa"), base_dir);
    if (j.contains("output_dir")) cfg.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    if (j.contains("grade_context") && !j.at("grade_context").is_null()) {
      cfg.grade_context = j.at("grade_context").get<irrigation::GradeContext>();
    }
    if (j.contains("weight_grid")) {
      const auto& g = j.at("weight_grid");
      cfg.grid_step = g.value("step", cfg.grid_step);
      cfg.grid_minimum = g.value("minimum", cfg.grid_minimum);
    }
    cfg.runs_per_weight = j.value("runs_per_weight", cfg.runs_per_weight);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.noise_pad = j.value("noise_pad", cfg.noise_pad);
    cfg.workers = j.value("workers", cfg.workers);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  const auto j = read_json_file(path);
  try {
    return run_config_from_json(j, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

namespace {

climate::ClimateTable load_climate(const RunConfig& cfg) {
  if (cfg.climate_csv.empty()) throw Error(ErrorCode::InvalidConfig, "no climate_csv configured");
  return climate::load_climate_csv(cfg.climate_csv.string());
}

}  // namespace

irrigation::ProblemSpec effective_problem(const RunConfig& cfg) {
  if (!cfg.grade_context) return cfg.problem;
  const auto table = load_climate(cfg);
  const auto temperature = fuzzy::build_type2_model(table, climate::Factor::Temperature);
  const auto insolation = fuzzy::build_type2_model(table, climate::Factor::Insolation);
  return irrigation::apply_grade_context(cfg.problem, temperature, insolation, *cfg.grade_context, cfg.noise_pad);
}

FuzzifyOutput cmd_fuzzify(const RunConfig& cfg, std::ostream& log) {
  const auto table = load_climate(cfg);
  FuzzifyOutput out{fuzzy::build_type2_model(table, climate::Factor::Temperature),
                    fuzzy::build_type2_model(table, climate::Factor::Insolation)};
  for (const auto* model : {&out.temperature, &out.insolation}) {
    const auto domain = model->annual_domain();
    const auto fou = fuzzy::sample_fou(*model);
    double widest = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < fou.x.size(); ++i) {
      const double w = fou.upper[i] - fou.lower[i];
      widest = std::max(widest, w);
      total += w;
    }
    log << model->factor_name << ": annual (" << num(domain.lo) << ", " << num(domain.hi) << ")"
        << ", FOU max width " << num(widest) << ", mean width " << num(total / static_cast<double>(fou.x.size()))
        << " over " << fou.x.size() << " points\n";
    write_text_file(cfg.output_dir / (model->factor_name + "_model.json"), json(*model).dump(2) + "\n");
  }
  log << "wrote " << (cfg.output_dir / "temperature_model.json").string() << " and "
      << (cfg.output_dir / "insolation_model.json").string() << "\n";
  return out;
}

OptimizeOutput cmd_optimize(const RunConfig& cfg, const irrigation::WeightVector& weights, std::uint64_t seed,
                            std::ostream& log) {
  const auto problem = effective_problem(cfg);
  const irrigation::IrrigationFitness fitness(problem, weights);
  auto run_cfg = cfg.bfa;
  run_cfg.seed = seed;
  auto result = bfa::run_bfa(fitness, run_cfg);
  OptimizeOutput out{pareto::make_point(problem, weights, result.best_position, seed), std::move(result.trace),
                     result.evaluations};
  const std::vector<pareto::SolutionPoint> rows{out.point};
  write_text_file(cfg.output_dir / "solution.csv", pareto::frontier_csv(rows));
  write_text_file(cfg.output_dir / "trace.csv", bfa::trace_csv(out.trace));
  log << pareto::kFrontierHeader << "\n" << pareto::solution_row(out.point) << "\n";
  log << "evaluations " << out.evaluations << ", feasible "
      << (irrigation::feasible(out.point.design, out.point.noise, problem) ? "yes" : "no") << "\n";
  return out;
}

double cmd_sphere_self_test(const bfa::BfaConfig& cfg, std::uint64_t seed, std::ostream& log) {
  const auto sphere = bfa::sphere_fitness();
  auto run_cfg = cfg;
  run_cfg.seed = seed;
  const auto result = bfa::run_bfa(sphere, run_cfg);
  const bool pass = result.best_fitness >= kSphereThreshold;
  log << "sphere self-test: best " << num(result.best_fitness) << " threshold " << num(kSphereThreshold) << " "
      << (pass ? "PASS" : "FAIL") << "\n";
  if (!pass) {
    throw Error(ErrorCode::SelfTestFailed, "sphere best " + num(result.best_fitness) + " below " + num(kSphereThreshold));
  }
  return result.best_fitness;
}

std::string metrics_json_text(const pareto::FrontierMetrics& m) { return json(m).dump(2) + "\n"; }

std::string ranking_table(const pareto::Frontier& frontier) {
  const auto r = pareto::rank_solutions(frontier);
  const std::array<const pareto::SolutionPoint*, 3> cols{&r.best, &r.median, &r.worst};
  struct Row {
    const char* name;
    double (*get)(const pareto::SolutionPoint&);
  };
  static constexpr Row rows[] = {
      {"w1", [](const pareto::SolutionPoint& p) { return p.weights.w1(); }},
      {"w2", [](const pareto::SolutionPoint& p) { return p.weights.w2(); }},
      {"w3", [](const pareto::SolutionPoint& p) { return p.weights.w3(); }},
      {"f1 power (kW)", [](const pareto::SolutionPoint& p) { return p.objectives.f1; }},
      {"f2 efficiency (%)", [](const pareto::SolutionPoint& p) { return p.objectives.f2; }},
      {"f3 savings (USD)", [](const pareto::SolutionPoint& p) { return p.objectives.f3; }},
      {"x_a", [](const pareto::SolutionPoint& p) { return p.design.x_a; }},
      {"x_b", [](const pareto::SolutionPoint& p) { return p.design.x_b; }},
      {"x_c", [](const pareto::SolutionPoint& p) { return p.design.x_c; }},
      {"x_d", [](const pareto::SolutionPoint& p) { return p.design.x_d; }},
      {"Z_a", [](const pareto::SolutionPoint& p) { return p.noise.z_a; }},
      {"Z_b", [](const pareto::SolutionPoint& p) { return p.noise.z_b; }},
      {"F", [](const pareto::SolutionPoint& p) { return p.aggregate_F; }},
  };
  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  constexpr std::size_t kName = 20;
  constexpr std::size_t kCol = 26;
  std::string out = pad("", kName) + pad("Best", kCol) + pad("Median", kCol) + "Worst\n";
  for (const auto& row : rows) {
    std::string line = pad(row.name, kName);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto cell = num(row.get(*cols[c]));
      line += c + 1 < cols.size() ? pad(cell, kCol) : cell;
    }
    out += line + "\n";
  }
  return out;
}

namespace {

std::string trace_file_name(const irrigation::WeightVector& w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "w_%04lld_%04lld_%04lld.csv", std::llround(w.w1() * 1000.0),
                std::llround(w.w2() * 1000.0), std::llround(w.w3() * 1000.0));
  return buf;
}

std::string frontier_label(const std::optional<irrigation::GradeContext>& ctx, const fs::path& dir) {
  if (ctx && !ctx->label.empty()) return ctx->label;
  auto name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  return name.empty() ? "frontier" : name;
}

std::string summary_text(const std::string& label, const pareto::Frontier& frontier,
                         const pareto::FrontierMetrics& metrics, const json& manifest) {
  std::ostringstream s;
  s << "frontier: " << label << "\n";
  s << "points: " << frontier.points.size() << "\n";
  s << "runs: " << manifest.at("total_runs").get<std::size_t>() << " (" << manifest.at("runs_per_weight").get<int>()
    << " per weight)\n";
  s << "evaluations: " << manifest.at("total_evaluations").get<std::size_t>() << "\n";
  s << "master_seed: " << manifest.at("master_seed").get<std::uint64_t>() << "\n";
  s << "dominance_mean_F: " << num(metrics.dominance_mean_F) << "\n";
  s << "diversity: " << num(metrics.diversity) << "\n\n";
  s << ranking_table(frontier);
  return s.str();
}

}  // namespace

pareto::FrontierMetrics cmd_frontier(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto problem = effective_problem(cfg);
  const auto weights = pareto::weight_grid(cfg.grid_step, cfg.grid_minimum);
  log << "sweeping " << weights.size() << " weights x " << cfg.runs_per_weight << " runs on " << cfg.workers
      << " worker(s)\n";

  std::vector<bfa::RunTrace> traces(weights.size());
  pareto::FrontierRunStats stats;
  const auto start = std::chrono::steady_clock::now();
  auto frontier = pareto::build_frontier(problem, cfg.bfa, weights, cfg.runs_per_weight, cfg.master_seed,
                                         cfg.workers, &stats,
                                         [&](std::size_t i, const bfa::RunTrace& t) { traces[i] = t; });
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  frontier.grade_context = cfg.grade_context;

  for (const auto& p : frontier.points) {
    if (!irrigation::feasible(p.design, p.noise, problem)) {
      throw Error(ErrorCode::NonFiniteResult, "infeasible point at weights " + num(p.weights.w1()) + "," +
                                                  num(p.weights.w2()) + "," + num(p.weights.w3()));
    }
  }

  const auto metrics = pareto::compute_metrics(frontier);
  const auto label = frontier_label(cfg.grade_context, cfg.output_dir);
  json manifest{
      {"label", label},
      {"grade_context", cfg.grade_context ? json(*cfg.grade_context) : json(nullptr)},
      {"weight_grid", {{"step", cfg.grid_step}, {"minimum", cfg.grid_minimum}, {"n_weights", weights.size()}}},
      {"runs_per_weight", cfg.runs_per_weight},
      {"total_runs", stats.runs},
      {"total_evaluations", stats.evaluations},
      {"master_seed", cfg.master_seed},
      {"noise_pad", cfg.noise_pad},
      {"problem", problem},
      {"bfa", cfg.bfa},
  };
  json trace_index = json::array();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto name = trace_file_name(weights[i]);
    trace_index.push_back((fs::path(BundleFiles::traces) / name).generic_string());
    write_text_file(cfg.output_dir / BundleFiles::traces / name, bfa::trace_csv(traces[i]));
  }
  manifest["traces"] = trace_index;

  const auto& dir = cfg.output_dir;
  write_text_file(dir / BundleFiles::frontier, pareto::frontier_csv(frontier.points));
  write_text_file(dir / BundleFiles::pareto, pareto::frontier_csv(pareto::nondominated_filter(frontier.points)));
  write_text_file(dir / BundleFiles::metrics, metrics_json_text(metrics));
  write_text_file(dir / BundleFiles::manifest, manifest.dump(2) + "\n");
  write_text_file(dir / BundleFiles::summary, summary_text(label, frontier, metrics, manifest));

  log << "points " << frontier.points.size() << ", runs " << stats.runs << ", evaluations " << stats.evaluations
      << ", wall time " << num(std::round(elapsed.count() * 100.0) / 100.0) << " s\n";
  log << "dominance_mean_F " << num(metrics.dominance_mean_F) << ", diversity " << num(metrics.diversity) << "\n";
  log << "bundle written to " << dir.string() << "\n";
  return metrics;
}

namespace {

std::optional<irrigation::GradeContext> context_from_manifest(const json& manifest) {
  if (!manifest.contains("grade_context") || manifest.at("grade_context").is_null()) return std::nullopt;
  return manifest.at("grade_context").get<irrigation::GradeContext>();
}

}  // namespace

pareto::FrontierMetrics cmd_metrics(const fs::path& frontier_csv) {
  pareto::Frontier frontier;
  try {
    frontier.points = pareto::parse_frontier_csv(read_text_file(frontier_csv));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SchemaMismatch) throw;
    throw Error(ErrorCode::SchemaMismatch,
                frontier_csv.string() + (e.line() ? ":" + std::to_string(*e.line()) : "") + ": " + e.detail());
  }
  const auto manifest = frontier_csv.parent_path() / BundleFiles::manifest;
  if (fs::exists(manifest)) frontier.grade_context = context_from_manifest(read_json_file(manifest));
  return pareto::compute_metrics(frontier);
}

std::string cmd_report(const std::vector<fs::path>& bundles) {
  if (bundles.empty()) throw Error(ErrorCode::IncompleteBundle, "no bundle directories given");
  struct Entry {
    std::string label;
    pareto::Frontier frontier;
    pareto::FrontierMetrics metrics;
    json manifest;
  };
  std::vector<Entry> entries;
  for (const auto& dir : bundles) {
    for (const char* file : {BundleFiles::frontier, BundleFiles::metrics, BundleFiles::manifest}) {
      if (!fs::exists(dir / file)) {
        throw Error(ErrorCode::IncompleteBundle, (dir / file).string() + " is missing");
      }
    }
    Entry e;
    e.manifest = read_json_file(dir / BundleFiles::manifest);
    e.frontier.points = pareto::parse_frontier_csv(read_text_file(dir / BundleFiles::frontier));
    e.frontier.grade_context = context_from_manifest(e.manifest);
    e.metrics = pareto::compute_metrics(e.frontier);
    if (metrics_json_text(e.metrics) != read_text_file(dir / BundleFiles::metrics)) {
      throw Error(ErrorCode::IncompleteBundle,
                  (dir / BundleFiles::metrics).string() + " does not match " + BundleFiles::frontier);
    }
    e.label = e.manifest.value("label", frontier_label(e.frontier.grade_context, dir));
    entries.push_back(std::move(e));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.metrics.dominance_mean_F != b.metrics.dominance_mean_F) {
      return a.metrics.dominance_mean_F > b.metrics.dominance_mean_F;
    }
    return a.label < b.label;
  });

  std::ostringstream s;
  s << "frontier report\n";
  s << "bundles: " << entries.size() << "\n\n";
  s << "rank,label,dominance_mean_F,diversity,n_points\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    s << i + 1 << "," << e.label << "," << num(e.metrics.dominance_mean_F) << "," << num(e.metrics.diversity) << ","
      << e.metrics.n_points << "\n";
  }
  for (const auto& e : entries) {
    s << "\n== " << e.label << " ==\n";
    if (e.frontier.grade_context) {
      const auto& c = *e.frontier.grade_context;
      auto grade = [](const irrigation::GradeRange& g) {
        return g.lo == g.hi ? num(g.lo) : "[" + num(g.lo) + ", " + num(g.hi) + "]";
      };
      s << "grades: temperature mu " << grade(c.temperature_primary) << " eta " << grade(c.temperature_secondary)
        << "; insolation mu " << grade(c.insolation_primary) << " eta " << grade(c.insolation_secondary) << "\n";
    }
    s << ranking_table(e.frontier);
  }

  constexpr double kEffMax = 17.9509;
  constexpr double kEffMin = 16.7487;
  s << "\ndeviation notes\n";
  for (const auto& e : entries) {
    const auto n = e.frontier.points.size();
    s << "- " << e.label << ": weight grid has " << n << " points; the published frontiers use 35 and do not state"
      << " their grid\n";
    std::vector<std::string> repairs;
    if (e.manifest.contains("problem")) {
      const auto& r = e.manifest.at("problem").at("repairs");
      if (r.value("f2_decimal_constant", false)) repairs.emplace_back("f2 constant read as 0.18507");
      if (r.value("f3_xf_as_xd", false)) repairs.emplace_back("f3 term x_f read as x_d");
    }
    s << "- " << e.label << ": equation repairs active: ";
    if (repairs.empty()) s << "none";
    for (std::size_t i = 0; i < repairs.size(); ++i) s << (i ? "; " : "") << repairs[i];
    s << "\n";
  }
  s << "- efficiency variation: the quoted extremes " << num(kEffMax) << " - " << num(kEffMin) << " give "
    << num(std::round((kEffMax - kEffMin) * 1e4) / 1e4) << " %, not the stated 1.022 %\n";
  s << "- published decision and noise values of the best/median/worst tables are not reproduced: the variable"
    << " coding is unstated and some noise values lie outside the printed bounds\n";
  s << "- runtimes are hardware-bound and kept out of bundles\n";
  return s.str();
}

}  // namespace t2bfa::runner
