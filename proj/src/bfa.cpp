#include "t2bfa/bfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "t2bfa/error.hpp"
#include "t2bfa/text.hpp"

namespace t2bfa::bfa {

void BfaConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  require(population >= 1, "population must be >= 1");
  require(chemotactic_steps >= 1 && swim_length >= 1 && reproduction_steps >= 1 && elimination_steps >= 1 &&
              total_iterations >= 1,
          "all loop limits must be >= 1");
  require(std::isfinite(step_fraction) && step_fraction > 0.0, "step_fraction must be > 0");
  require(elimination_probability >= 0.0 && elimination_probability <= 1.0,
          "elimination_probability must lie in [0, 1]");
  require(attract_depth >= 0.0 && attract_width >= 0.0 && repel_height >= 0.0 && repel_width >= 0.0,
          "swarm signal parameters must be non-negative");
}

void to_json(nlohmann::json& j, const BfaConfig& c) {
  j = nlohmann::json{
      {"population", c.population},
      {"chemotactic_steps", c.chemotactic_steps},
      {"swim_length", c.swim_length},
      {"reproduction_steps", c.reproduction_steps},
      {"elimination_steps", c.elimination_steps},
      {"total_iterations", c.total_iterations},
      {"step_fraction", c.step_fraction},
      {"attract_depth", c.attract_depth},
      {"attract_width", c.attract_width},
      {"repel_height", c.repel_height},
      {"repel_width", c.repel_width},
      {"elimination_probability", c.elimination_probability},
      {"swarming", c.swarming},
      {"boundary", c.boundary == BoundaryMode::Clamp ? "clamp" : "reflect"},
      {"seed", c.seed},
  };
}

void from_json(const nlohmann::json& j, BfaConfig& c) {
  c = BfaConfig{};
  c.population = j.value("population", c.population);
  c.chemotactic_steps = j.value("chemotactic_steps", c.chemotactic_steps);
  c.swim_length = j.value("swim_length", c.swim_length);
  c.reproduction_steps = j.value("reproduction_steps", c.reproduction_steps);
  c.elimination_steps = j.value("elimination_steps", c.elimination_steps);
  c.total_iterations = j.value("total_iterations", c.total_iterations);
  c.step_fraction = j.value("step_fraction", c.step_fraction);
  c.attract_depth = j.value("attract_depth", c.attract_depth);
  c.attract_width = j.value("attract_width", c.attract_width);
  c.repel_height = j.value("repel_height", c.repel_height);
  c.repel_width = j.value("repel_width", c.repel_width);
  c.elimination_probability = j.value("elimination_probability", c.elimination_probability);
  c.swarming = j.value("swarming", c.swarming);
  const auto boundary = j.value("boundary", std::string("clamp"));
  if (boundary == "clamp") {
    c.boundary = BoundaryMode::Clamp;
  } else if (boundary == "reflect") {
    c.boundary = BoundaryMode::Reflect;
  } else {
    throw Error(ErrorCode::InvalidConfig, "boundary must be 'clamp' or 'reflect'");
  }
  c.seed = j.value("seed", c.seed);
  c.validate();
}

std::vector<double> tumble_direction(std::size_t dim, Rng& rng) {
  std::vector<double> d(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : d) {
      v = 2.0 * rng.uniform01() - 1.0;
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double norm = std::sqrt(norm2);
  for (auto& v : d) v /= norm;
  return d;
}

std::vector<double> step_sizes(std::span<const Interval> box, double step_fraction) {
  std::vector<double> c;
  c.reserve(box.size());
  for (const auto& iv : box) c.push_back(step_fraction * iv.width());
  return c;
}

std::vector<double> chemotaxis_displacement(std::span<const double> dir, std::span<const double> steps) {
  std::vector<double> out(dir.size());
  for (std::size_t i = 0; i < dir.size(); ++i) out[i] = steps[i] * dir[i];
  return out;
}

void apply_bounds(std::span<double> position, std::span<const Interval> box, BoundaryMode mode) noexcept {
  for (std::size_t i = 0; i < position.size(); ++i) {
    double& x = position[i];
    const auto& iv = box[i];
    if (mode == BoundaryMode::Reflect) {
      if (x < iv.lo) x = iv.lo + (iv.lo - x);
      if (x > iv.hi) x = iv.hi - (x - iv.hi);
    }
    x = std::clamp(x, iv.lo, iv.hi);
  }
}

Bacterium chemotaxis_move(const Bacterium& b, std::span<const double> dir, std::span<const double> steps,
                          std::span<const Interval> box, BoundaryMode mode) {
  Bacterium out = b;
  for (std::size_t i = 0; i < out.position.size(); ++i) out.position[i] += steps[i] * dir[i];
  apply_bounds(out.position, box, mode);
  return out;
}

double cell_to_cell_signal(std::span<const double> pos, const Swarm& swarm, const BfaConfig& cfg) noexcept {
  // exp() of anything below this is exactly 0 in double precision
  constexpr double kUnderflow = -746.0;
  double attract = 0.0;
  double repel = 0.0;
  for (const auto& other : swarm) {
    double d2 = 0.0;
    for (std::size_t m = 0; m < pos.size(); ++m) {
      const double diff = pos[m] - other.position[m];
      d2 += diff * diff;
    }
    const double ea = -cfg.attract_width * d2;
    if (ea > kUnderflow) attract += -cfg.attract_depth * std::exp(ea);
    const double er = -cfg.repel_width * d2;
    if (er > kUnderflow) repel += cfg.repel_height * std::exp(er);
  }
  return attract + repel;
}

double effective_fitness(std::span<const double> pos, const Swarm& swarm, const FitnessFunction& f,
                         const BfaConfig& cfg) {
  const double raw = f.evaluate(pos);
  if (!cfg.swarming) return raw;
  return raw + cell_to_cell_signal(pos, swarm, cfg);
}

namespace {

struct Evaluated {
  double raw;
  double effective;
};

Evaluated evaluate_at(std::span<const double> pos, const Swarm& swarm, const FitnessFunction& f,
                      const BfaConfig& cfg) {
  const double raw = f.evaluate(pos);
  if (!std::isfinite(raw)) throw Error(ErrorCode::NonFiniteResult, "fitness returned a non-finite value");
  return {raw, cfg.swarming ? raw + cell_to_cell_signal(pos, swarm, cfg) : raw};
}

}  // namespace

SwimOutcome swim_along(const Bacterium& b, std::span<const double> dir, const Swarm& swarm,
                       const FitnessFunction& f, const BfaConfig& cfg, std::span<const double> steps) {
  const auto& box = f.bounds();
  SwimOutcome out;
  out.bacterium = chemotaxis_move(b, dir, steps, box, cfg.boundary);
  auto here = evaluate_at(out.bacterium.position, swarm, f, cfg);
  out.evaluations = 1;
  out.bacterium.last_fitness = here.effective;
  out.bacterium.health += here.effective;
  out.best_raw = here.raw;
  out.best_position = out.bacterium.position;

  while (out.swims < cfg.swim_length) {
    Bacterium trial = chemotaxis_move(out.bacterium, dir, steps, box, cfg.boundary);
    const auto next = evaluate_at(trial.position, swarm, f, cfg);
    ++out.evaluations;
    if (!(next.effective > here.effective)) break;
    here = next;
    out.bacterium.position = std::move(trial.position);
    out.bacterium.last_fitness = here.effective;
    out.bacterium.health += here.effective;
    ++out.swims;
    if (here.raw > out.best_raw) {
      out.best_raw = here.raw;
      out.best_position = out.bacterium.position;
    }
  }
  return out;
}

SwimOutcome swim_loop(const Bacterium& b, const Swarm& swarm, const FitnessFunction& f, const BfaConfig& cfg,
                      std::span<const double> steps, Rng& rng) {
  const auto dir = tumble_direction(b.position.size(), rng);
  return swim_along(b, dir, swarm, f, cfg, steps);
}

namespace {

std::vector<std::size_t> rank_by_health(const Swarm& swarm) {
  std::vector<std::size_t> order(swarm.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return swarm[a].health > swarm[b].health; });
  return order;
}

void split_top_half(Swarm& swarm) {
  const auto order = rank_by_health(swarm);
  const std::size_t half = swarm.size() / 2;
  Swarm next;
  next.reserve(swarm.size());
  for (std::size_t r = 0; r < half; ++r) next.push_back(swarm[order[r]]);
  if (swarm.size() % 2 == 1) next.push_back(swarm[order[half]]);
  for (std::size_t r = 0; r < half; ++r) next.push_back(swarm[order[r]]);
  for (auto& b : next) b.health = 0.0;
  swarm = std::move(next);
}

}  // namespace

void reproduce(Swarm& swarm) {
  if (swarm.size() % 2 != 0) {
    throw Error(ErrorCode::OddPopulation, "reproduction needs an even population, got " + std::to_string(swarm.size()));
  }
  split_top_half(swarm);
}

void reproduce_keep_middle(Swarm& swarm) { split_top_half(swarm); }

std::vector<bool> eliminate_disperse(Swarm& swarm, std::span<const Interval> box, const BfaConfig& cfg, Rng& rng) {
  std::vector<bool> mask(swarm.size(), false);
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    if (rng.uniform01() < cfg.elimination_probability) {
      mask[i] = true;
      for (std::size_t m = 0; m < box.size(); ++m) swarm[i].position[m] = rng.uniform(box[m].lo, box[m].hi);
    }
  }
  return mask;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "iteration,best_fitness,evaluations\n";
  for (const auto& e : trace.entries) {
    out += std::to_string(e.iteration);
    out += ',';
    out += text::format_roundtrip(e.best_fitness);
    out += ',';
    out += std::to_string(e.evaluations);
    out += '\n';
  }
  return out;
}

LambdaFitness sphere_fitness(std::size_t dim, double half_width) {
  return LambdaFitness(std::vector<Interval>(dim, Interval{-half_width, half_width}),
                       [](std::span<const double> x) {
                         double s = 0.0;
                         for (const double v : x) s += v * v;
                         return -s;
                       });
}

BfaResult run_bfa(const FitnessFunction& f, const BfaConfig& cfg) {
  cfg.validate();
  const auto& box = f.bounds();
  if (box.empty()) throw Error(ErrorCode::InvalidConfig, "fitness function has no dimensions");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi)) throw Error(ErrorCode::InvalidConfig, "every search dimension needs lo < hi");
  }
  const auto steps = step_sizes(box, cfg.step_fraction);
  Rng rng(cfg.seed);

  Swarm swarm(static_cast<std::size_t>(cfg.population));
  for (auto& b : swarm) {
    b.position.resize(box.size());
    for (std::size_t m = 0; m < box.size(); ++m) b.position[m] = rng.uniform(box[m].lo, box[m].hi);
  }

  BfaResult result;
  result.best_fitness = -std::numeric_limits<double>::infinity();
  auto consider = [&](double raw, const std::vector<double>& pos) {
    if (raw > result.best_fitness) {
      result.best_fitness = raw;
      result.best_position = pos;
    }
  };
  for (auto& b : swarm) {
    const auto e = evaluate_at(b.position, swarm, f, cfg);
    ++result.evaluations;
    b.last_fitness = e.effective;
    consider(e.raw, b.position);
  }
  result.trace.entries.push_back({0, result.best_fitness, result.evaluations, result.best_position});

  std::size_t iteration = 0;
  for (int t = 0; t < cfg.total_iterations; ++t) {
    for (int ed = 0; ed < cfg.elimination_steps; ++ed) {
      for (int r = 0; r < cfg.reproduction_steps; ++r) {
        for (int c = 0; c < cfg.chemotactic_steps; ++c) {
          const Swarm snapshot = swarm;
          for (auto& b : swarm) {
            auto out = swim_loop(b, snapshot, f, cfg, steps, rng);
            result.evaluations += out.evaluations;
            consider(out.best_raw, out.best_position);
            b = std::move(out.bacterium);
          }
        }
        reproduce_keep_middle(swarm);
        ++iteration;
        result.trace.entries.push_back({iteration, result.best_fitness, result.evaluations, result.best_position});
      }
      eliminate_disperse(swarm, box, cfg, rng);
    }
  }
  return result;
}

}  // namespace t2bfa::bfa
