#include "t2bfa/pareto.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "t2bfa/error.hpp"
#include "t2bfa/text.hpp"

namespace t2bfa::pareto {

std::vector<WeightVector> weight_grid(double step, double minimum) {
  if (!(step > 0.0) || !(minimum >= 0.0)) throw Error(ErrorCode::InvalidValue, "grid needs step > 0 and minimum >= 0");
  const double parts = std::round(1.0 / step);
  if (parts < 1.0 || std::abs(parts * step - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidValue, "grid step must divide 1 evenly");
  }
  const int n = static_cast<int>(parts);
  const int min_units = static_cast<int>(std::ceil(minimum / step - 1e-9));
  std::vector<WeightVector> grid;
  for (int i = n; i >= 0; --i) {
    for (int j = n - i; j >= 0; --j) {
      const int k = n - i - j;
      if (i < min_units || j < min_units || k < min_units) continue;
      grid.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n, static_cast<double>(k) / n);
    }
  }
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "no weight vector satisfies the minimum");
  return grid;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, const WeightVector& w, int replicate) {
  std::uint64_t h = splitmix64(master_seed);
  for (const double v : w.values()) {
    const auto lattice = static_cast<std::uint64_t>(std::llround(v * 1e6));
    h = splitmix64(h ^ lattice);
  }
  return splitmix64(h ^ static_cast<std::uint64_t>(replicate));
}

SolutionPoint make_point(const irrigation::ProblemSpec& problem, const WeightVector& w,
                         std::span<const double> position, std::uint64_t seed) {
  SolutionPoint p;
  p.weights = w;
  p.design = irrigation::design_of(position);
  p.noise = irrigation::noise_of(position);
  p.objectives = irrigation::eval_objectives(p.design, p.noise, problem);
  p.aggregate_F = irrigation::aggregate(p.objectives, w);
  p.seed = seed;
  return p;
}

Frontier build_frontier(const irrigation::ProblemSpec& problem, const bfa::BfaConfig& cfg,
                        std::span<const WeightVector> weights, int runs_per_weight, std::uint64_t master_seed,
                        int workers, FrontierRunStats* stats, const TraceSink& traces) {
  if (runs_per_weight < 1) throw Error(ErrorCode::InvalidConfig, "runs_per_weight must be >= 1");
  if (weights.empty()) throw Error(ErrorCode::EmptyGrid, "no weight vectors to sweep");
  problem.validate();
  cfg.validate();

  struct Cell {
    std::optional<SolutionPoint> point;
    bfa::RunTrace trace;
    std::size_t evaluations = 0;
    std::optional<std::string> failure;
  };
  std::vector<Cell> cells(weights.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t w = next++; w < weights.size(); w = next++) {
      auto& cell = cells[w];
      try {
        const irrigation::IrrigationFitness fitness(problem, weights[w]);
        double best = -std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < runs_per_weight; ++rep) {
          bfa::BfaConfig run_cfg = cfg;
          run_cfg.seed = cell_seed(master_seed, weights[w], rep);
          auto result = bfa::run_bfa(fitness, run_cfg);
          cell.evaluations += result.evaluations;
          if (result.best_fitness > best) {
            best = result.best_fitness;
            cell.point = make_point(problem, weights[w], result.best_position, run_cfg.seed);
            cell.trace = std::move(result.trace);
          }
        }
      } catch (const std::exception& e) {
        cell.failure = e.what();
      }
    }
  };

  const auto n_threads = static_cast<std::size_t>(std::clamp<int>(workers, 1, static_cast<int>(weights.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }

  Frontier frontier;
  FrontierRunStats local;
  for (std::size_t w = 0; w < cells.size(); ++w) {
    auto& cell = cells[w];
    if (cell.failure) {
      const auto& v = weights[w].values();
      throw Error(ErrorCode::NonFiniteResult,
                  "sweep aborted at weight cell (" + text::format_roundtrip(v[0]) + "," + text::format_roundtrip(v[1]) +
                      "," + text::format_roundtrip(v[2]) + "): " + *cell.failure);
    }
    frontier.points.push_back(*cell.point);
    local.runs += static_cast<std::size_t>(runs_per_weight);
    local.evaluations += cell.evaluations;
    if (traces) traces(w, cell.trace);
  }
  if (stats) *stats = local;
  return frontier;
}

std::vector<std::size_t> nondominated_indices(std::span<const std::vector<double>> objectives) {
  auto dominates = [](const std::vector<double>& a, const std::vector<double>& b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return false;
      if (a[i] > b[i]) strict = true;
    }
    return strict;
  };
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (objectives[i].size() != objectives.front().size()) {
      throw Error(ErrorCode::InvalidValue, "objective vectors differ in dimension");
    }
    bool dominated = false;
    for (std::size_t j = 0; j < objectives.size() && !dominated; ++j) {
      dominated = j != i && dominates(objectives[j], objectives[i]);
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

std::vector<SolutionPoint> nondominated_filter(std::span<const SolutionPoint> points) {
  std::vector<std::vector<double>> objs;
  objs.reserve(points.size());
  for (const auto& p : points) {
    const auto a = p.objectives.as_array();
    objs.emplace_back(a.begin(), a.end());
  }
  std::vector<SolutionPoint> out;
  for (const auto i : nondominated_indices(objs)) out.push_back(points[i]);
  return out;
}

SigmaVector sigma_components(std::span<const double> f, SigmaNorm norm) {
  double denom = 0.0;
  for (const double v : f) denom += v * v;
  if (denom == 0.0) throw Error(ErrorCode::ZeroVector, "sigma vector of the zero objective vector is undefined");
  SigmaVector s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) s.components.push_back((f[i] * f[i] - f[j] * f[j]) / denom);
  }
  if (norm == SigmaNorm::SquaredSum) {
    double sq = 0.0;
    for (const double c : s.components) sq += c * c;
    s.magnitude = std::sqrt(sq);
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (i != j) sum += (f[i] * f[i] - f[j] * f[j]) / denom;
      }
    }
    s.magnitude = std::sqrt(std::abs(sum));
  }
  return s;
}

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void compose(std::size_t remaining, std::size_t slots, std::vector<std::size_t>& prefix,
             std::vector<std::vector<std::size_t>>& out) {
  if (slots == 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t a = remaining + 1; a-- > 0;) {
    prefix.push_back(a);
    compose(remaining - a, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::vector<double>> simplex_lattice(std::size_t n_objectives, std::size_t count) {
  if (n_objectives < 2 || count < 2) throw Error(ErrorCode::InvalidValue, "lattice needs n >= 2 and count >= 2");
  std::size_t divisions = 1;
  while (binomial(divisions + n_objectives - 1, n_objectives - 1) < count) ++divisions;
  if (binomial(divisions + n_objectives - 1, n_objectives - 1) != count) {
    throw Error(ErrorCode::InvalidValue, std::to_string(count) + " is not a simplex-lattice size for " +
                                             std::to_string(n_objectives) + " objectives");
  }
  std::vector<std::vector<std::size_t>> nodes;
  std::vector<std::size_t> prefix;
  compose(divisions, n_objectives, prefix, nodes);
  std::vector<std::vector<double>> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes) {
    std::vector<double> dir;
    for (const auto a : node) dir.push_back(static_cast<double>(a) / static_cast<double>(divisions));
    out.push_back(std::move(dir));
  }
  return out;
}

std::vector<SigmaVector> reference_sigma_lines(std::size_t n_objectives, std::size_t count) {
  std::vector<SigmaVector> refs;
  for (const auto& dir : simplex_lattice(n_objectives, count)) refs.push_back(sigma_components(dir));
  return refs;
}

double diversity_metric(std::span<const SigmaVector> solutions, std::span<const SigmaVector> refs) {
  if (solutions.empty() || refs.empty()) throw Error(ErrorCode::InvalidValue, "diversity needs solutions and references");
  double total = 0.0;
  for (const auto& s : solutions) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& r : refs) {
      if (r.components.size() != s.components.size()) {
        throw Error(ErrorCode::InvalidValue, "sigma vectors differ in dimension");
      }
      double d2 = 0.0;
      for (std::size_t i = 0; i < s.components.size(); ++i) {
        const double diff = s.components[i] - r.components[i];
        d2 += diff * diff;
      }
      nearest = std::min(nearest, std::sqrt(d2));
    }
    total += nearest;
  }
  return 1.0 / (total / static_cast<double>(solutions.size()) + kDiversityGuard);
}

namespace {

// Canonical order used wherever a sum must not depend on the caller's point order.
std::vector<const SolutionPoint*> canonical_order(const Frontier& frontier) {
  std::vector<const SolutionPoint*> ptrs;
  ptrs.reserve(frontier.points.size());
  for (const auto& p : frontier.points) ptrs.push_back(&p);
  std::sort(ptrs.begin(), ptrs.end(), [](const SolutionPoint* a, const SolutionPoint* b) {
    if (a->weights != b->weights) return a->weights < b->weights;
    if (a->aggregate_F != b->aggregate_F) return a->aggregate_F < b->aggregate_F;
    return a->seed < b->seed;
  });
  return ptrs;
}

}  // namespace

double frontier_diversity(const Frontier& frontier, std::span<const SigmaVector> refs) {
  if (frontier.points.empty()) throw Error(ErrorCode::InvalidValue, "empty frontier");
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& p : frontier.points) {
    const auto a = p.objectives.as_array();
    for (std::size_t i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], a[i]);
      hi[i] = std::max(hi[i], a[i]);
    }
  }
  std::vector<SigmaVector> sigmas;
  for (const auto* p : canonical_order(frontier)) {
    const auto a = p->objectives.as_array();
    std::array<double, 3> normalized{};
    for (std::size_t i = 0; i < 3; ++i) normalized[i] = hi[i] > lo[i] ? (a[i] - lo[i]) / (hi[i] - lo[i]) : 0.0;
    if (normalized == std::array<double, 3>{}) continue;
    sigmas.push_back(sigma_components(normalized));
  }
  if (sigmas.empty()) return 0.0;
  return diversity_metric(sigmas, refs);
}

Ranking rank_solutions(const Frontier& frontier) {
  if (frontier.points.empty()) throw Error(ErrorCode::InvalidValue, "cannot rank an empty frontier");
  std::vector<SolutionPoint> sorted = frontier.points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const SolutionPoint& a, const SolutionPoint& b) {
    if (a.aggregate_F != b.aggregate_F) return a.aggregate_F > b.aggregate_F;
    return a.weights < b.weights;
  });
  return {sorted.front(), sorted[(sorted.size() - 1) / 2], sorted.back()};
}

double frontier_dominance(const Frontier& frontier) {
  if (frontier.points.empty()) throw Error(ErrorCode::InvalidValue, "empty frontier");
  double sum = 0.0;
  for (const auto* p : canonical_order(frontier)) sum += p->aggregate_F;
  return sum / static_cast<double>(frontier.points.size());
}

std::string solution_row(const SolutionPoint& p) {
  using text::format_roundtrip;
  std::string row;
  for (const double v : {p.weights.w1(), p.weights.w2(), p.weights.w3(), p.design.x_a, p.design.x_b, p.design.x_c,
                         p.design.x_d, p.noise.z_a, p.noise.z_b, p.objectives.f1, p.objectives.f2, p.objectives.f3,
                         p.aggregate_F}) {
    row += format_roundtrip(v);
    row += ',';
  }
  row += std::to_string(p.seed);
  return row;
}

std::string frontier_csv(std::span<const SolutionPoint> points) {
  std::string out{kFrontierHeader};
  out += '\n';
  for (const auto& p : points) {
    out += solution_row(p);
    out += '\n';
  }
  return out;
}

std::vector<SolutionPoint> parse_frontier_csv(std::string_view csv) {
  std::vector<SolutionPoint> points;
  bool have_header = false;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    const auto raw = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kFrontierHeader) {
        throw Error(ErrorCode::SchemaMismatch, "expected header '" + std::string(kFrontierHeader) + "'", line_no);
      }
      have_header = true;
      continue;
    }
    const auto f = text::split_csv_line(line);
    if (f.size() != 14) {
      throw Error(ErrorCode::SchemaMismatch, "expected 14 columns, found " + std::to_string(f.size()), line_no);
    }
    std::array<double, 13> v{};
    for (std::size_t i = 0; i < 13; ++i) {
      const auto parsed = text::parse_double(f[i]);
      if (!parsed) throw Error(ErrorCode::SchemaMismatch, "cannot parse '" + std::string(f[i]) + "'", line_no);
      v[i] = *parsed;
    }
    const auto seed = text::parse_u64(f[13]);
    if (!seed) throw Error(ErrorCode::SchemaMismatch, "cannot parse seed '" + std::string(f[13]) + "'", line_no);
    SolutionPoint p;
    try {
      p.weights = WeightVector(v[0], v[1], v[2]);
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaMismatch, e.detail(), line_no);
    }
    p.design = {v[3], v[4], v[5], v[6]};
    p.noise = {v[7], v[8]};
    p.objectives = {v[9], v[10], v[11]};
    p.aggregate_F = v[12];
    p.seed = *seed;
    points.push_back(p);
  }
  if (!have_header) throw Error(ErrorCode::SchemaMismatch, "frontier CSV is empty");
  return points;
}

FrontierMetrics compute_metrics(const Frontier& frontier, std::size_t reference_count) {
  const auto refs = reference_sigma_lines(3, reference_count);
  return {frontier_dominance(frontier), frontier_diversity(frontier, refs), frontier.points.size(),
          frontier.grade_context};
}

void to_json(nlohmann::json& j, const FrontierMetrics& m) {
  j = nlohmann::json{{"dominance_mean_F", m.dominance_mean_F}, {"diversity", m.diversity}, {"n_points", m.n_points}};
  if (m.grade_context) {
    j["grade_context"] = *m.grade_context;
  } else {
    j["grade_context"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, FrontierMetrics& m) {
  m.dominance_mean_F = j.at("dominance_mean_F").get<double>();
  m.diversity = j.at("diversity").get<double>();
  m.n_points = j.at("n_points").get<std::size_t>();
  if (j.contains("grade_context") && !j.at("grade_context").is_null()) {
    m.grade_context = j.at("grade_context").get<irrigation::GradeContext>();
  } else {
    m.grade_context.reset();
  }
}

}  // namespace t2bfa::pareto
