#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "t2bfa/bfa.hpp"
#include "t2bfa/irrigation.hpp"

namespace t2bfa::pareto {

using irrigation::WeightVector;

struct SolutionPoint {
  WeightVector weights{1.0, 0.0, 0.0};
  irrigation::DesignVector design;
  irrigation::NoiseVector noise;
  irrigation::ObjectiveTriple objectives;
  double aggregate_F = 0.0;
  std::uint64_t seed = 0;
};

struct Frontier {
  std::vector<SolutionPoint> points;
  std::optional<irrigation::GradeContext> grade_context;
};

/// Every 3-component vector with entries in multiples of `step`, each >= `minimum`, summing to 1.
/// Ordered by w1 descending, then w2 descending. Throws EmptyGrid when nothing qualifies and
/// InvalidValue when 1/step is not an integer.
std::vector<WeightVector> weight_grid(double step = 0.1, double minimum = 0.1);

/// Seed of one (weight, replicate) cell. Hashes the weights' integer lattice coordinates, not
/// their position in the grid, so adding weights leaves other cells untouched.
std::uint64_t cell_seed(std::uint64_t master_seed, const WeightVector& w, int replicate);

struct FrontierRunStats {
  std::size_t runs = 0;
  std::size_t evaluations = 0;
};

/// Optional per-weight callback receiving the winning run's trace.
using TraceSink = std::function<void(std::size_t weight_index, const bfa::RunTrace&)>;

/// For each weight, runs the solver `runs_per_weight` times with cell seeds and keeps the run
/// with the largest aggregate F (earliest replicate on ties). Cells run on up to `workers`
/// threads; results are merged in weight order.
Frontier build_frontier(const irrigation::ProblemSpec& problem, const bfa::BfaConfig& cfg,
                        std::span<const WeightVector> weights, int runs_per_weight, std::uint64_t master_seed,
                        int workers = 1, FrontierRunStats* stats = nullptr, const TraceSink& traces = {});

/// Turns a solver result into a frontier point.
SolutionPoint make_point(const irrigation::ProblemSpec& problem, const WeightVector& w,
                         std::span<const double> position, std::uint64_t seed);

/// Indices of the points not dominated under maximization (>= everywhere, > somewhere), in
/// input order. Duplicates do not dominate each other and are all kept.
std::vector<std::size_t> nondominated_indices(std::span<const std::vector<double>> objectives);
std::vector<SolutionPoint> nondominated_filter(std::span<const SolutionPoint> points);

enum class SigmaNorm {
  SquaredSum,  // sqrt of the sum of squared pair components (default)
  AsPrinted,   // sqrt(|sum over all i != j of sigma(ij)|); vanishes by antisymmetry
};

struct SigmaVector {
  std::vector<double> components;  // pairs (i, j), i < j, in lexicographic order
  double magnitude = 0.0;
};

/// sigma(ij) = (f_i^2 - f_j^2) / sum f_l^2. Throws ZeroVector for the zero vector.
SigmaVector sigma_components(std::span<const double> objectives, SigmaNorm norm = SigmaNorm::SquaredSum);

/// Nodes of the simplex lattice with H divisions, H chosen so the node count equals `count`.
/// Throws InvalidValue when no such H exists or count < 2.
std::vector<std::vector<double>> simplex_lattice(std::size_t n_objectives, std::size_t count);

inline constexpr std::size_t kDefaultReferenceCount = 15;

std::vector<SigmaVector> reference_sigma_lines(std::size_t n_objectives, std::size_t count = kDefaultReferenceCount);

inline constexpr double kDiversityGuard = 1e-12;

/// 1 / (mean distance from each solution sigma to its nearest reference sigma + 1e-12).
double diversity_metric(std::span<const SigmaVector> solutions, std::span<const SigmaVector> refs);

/// Frontier diversity: objectives are min-max normalized to [0, 1] over the frontier, points
/// whose normalized vector is all zero are skipped, and the rest go through
/// diversity_metric(). Returns 0 when no point remains.
double frontier_diversity(const Frontier& frontier, std::span<const SigmaVector> refs);

struct Ranking {
  SolutionPoint best;
  SolutionPoint median;
  SolutionPoint worst;
};

/// Sort by aggregate_F descending (ties: weights ascending); median at index floor((n-1)/2).
Ranking rank_solutions(const Frontier& frontier);

/// Mean aggregate_F. Points are summed in weight order, so the value is independent of the
/// frontier's point order.
double frontier_dominance(const Frontier& frontier);

inline constexpr std::string_view kFrontierHeader = "w1,w2,w3,x_a,x_b,x_c,x_d,Z_a,Z_b,f1,f2,f3,F,seed";

std::string frontier_csv(std::span<const SolutionPoint> points);
std::string solution_row(const SolutionPoint& p);
/// Throws SchemaMismatch on a wrong header, column count or unparsable value.
std::vector<SolutionPoint> parse_frontier_csv(std::string_view text);

struct FrontierMetrics {
  double dominance_mean_F = 0.0;
  double diversity = 0.0;
  std::size_t n_points = 0;
  std::optional<irrigation::GradeContext> grade_context;
};

FrontierMetrics compute_metrics(const Frontier& frontier, std::size_t reference_count = kDefaultReferenceCount);

void to_json(nlohmann::json& j, const FrontierMetrics& m);
void from_json(const nlohmann::json& j, FrontierMetrics& m);

}  // namespace t2bfa::pareto
