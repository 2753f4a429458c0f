#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "t2bfa/fitness.hpp"

// Bacterial Foraging Algorithm for bounded maximization.
//
// Loop nesting of run_bfa():
//   N_T outer cycles {
//     N_ed elimination-dispersal events {
//       N_r reproduction steps {
//         N_c chemotactic steps { every bacterium: tumble, then swim up to N_s steps }
//         reproduce
//       }
//       eliminate_disperse
//     }
//   }
// The swarm carries over between outer cycles. Every random draw comes from one
// std::mt19937_64 seeded with BfaConfig::seed, so a seed fixes the whole trajectory.
namespace t2bfa::bfa {

enum class BoundaryMode { Clamp, Reflect };

struct BfaConfig {
  int population = 25;           // S
  int chemotactic_steps = 4;     // N_c
  int swim_length = 5;           // N_s
  int reproduction_steps = 5;    // N_r
  int elimination_steps = 5;     // N_ed
  int total_iterations = 200;    // N_T
  double step_fraction = 0.05;   // C(i) = step_fraction * (hi_i - lo_i)
  double attract_depth = 0.1;    // D_att
  double attract_width = 0.2;    // W_att
  double repel_height = 0.1;     // H_rep
  double repel_width = 10.0;     // W_rep
  double elimination_probability = 0.25;
  bool swarming = true;
  BoundaryMode boundary = BoundaryMode::Clamp;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig on non-positive loop limits, step_fraction <= 0, p_ed outside [0, 1]
  /// or negative signal parameters.
  void validate() const;

  friend bool operator==(const BfaConfig&, const BfaConfig&) = default;
};

void to_json(nlohmann::json& j, const BfaConfig& cfg);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, BfaConfig& cfg);

/// Seeded 64-bit Mersenne Twister with a fixed uniform mapping (top 53 bits), so sequences are
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

struct Bacterium {
  std::vector<double> position;
  double last_fitness = 0.0;  // effective fitness at `position`
  double health = 0.0;        // effective fitness accumulated since the last reproduction
};

using Swarm = std::vector<Bacterium>;

/// Unit vector with raw components uniform on [-1, 1]; all-zero draws are redrawn.
std::vector<double> tumble_direction(std::size_t dim, Rng& rng);

/// Per-dimension chemotactic step C(i).
std::vector<double> step_sizes(std::span<const Interval> box, double step_fraction);

/// Pre-bounds displacement, component i = steps[i] * dir[i].
std::vector<double> chemotaxis_displacement(std::span<const double> dir, std::span<const double> steps);

/// Pulls every coordinate back inside the box.
void apply_bounds(std::span<double> position, std::span<const Interval> box, BoundaryMode mode) noexcept;

/// Moves by C (.) dir, then applies the boundary rule. Fitness and health are carried unchanged.
Bacterium chemotaxis_move(const Bacterium& b, std::span<const double> dir, std::span<const double> steps,
                          std::span<const Interval> box, BoundaryMode mode = BoundaryMode::Clamp);

/// Attractant/repellent potential of the swarm at `pos`, summed over every bacterium
/// (self included): sum -D_att exp(-W_att d^2) + H_rep exp(-W_rep d^2).
double cell_to_cell_signal(std::span<const double> pos, const Swarm& swarm, const BfaConfig& cfg) noexcept;

/// f(pos) plus the swarm signal; exactly f(pos) when swarming is off.
double effective_fitness(std::span<const double> pos, const Swarm& swarm, const FitnessFunction& f,
                         const BfaConfig& cfg);

/// Result of one bacterium's chemotactic step.
struct SwimOutcome {
  Bacterium bacterium;
  int swims = 0;                  // accepted steps after the tumble
  std::size_t evaluations = 0;    // calls to f.evaluate
  double best_raw = 0.0;          // best raw f among the positions the bacterium occupied
  std::vector<double> best_position;
};

/// Tumbles along `dir` (always kept), then keeps stepping in the same direction while the
/// effective fitness strictly improves, at most N_s times. A non-improving trial step is
/// discarded and ends the swim. `swarm` is the signal snapshot.
SwimOutcome swim_along(const Bacterium& b, std::span<const double> dir, const Swarm& swarm,
                       const FitnessFunction& f, const BfaConfig& cfg, std::span<const double> steps);

/// swim_along with a fresh tumble_direction.
SwimOutcome swim_loop(const Bacterium& b, const Swarm& swarm, const FitnessFunction& f, const BfaConfig& cfg,
                      std::span<const double> steps, Rng& rng);

/// Sorts by health (descending, ties to the lower index), duplicates the top half in place of
/// the bottom half and resets health. Throws OddPopulation for odd sizes.
void reproduce(Swarm& swarm);

/// Solver variant of reproduce() that accepts odd sizes: the middle-ranked bacterium survives
/// without a copy. Identical to reproduce() for even sizes.
void reproduce_keep_middle(Swarm& swarm);

/// Relocates each bacterium uniformly inside the box with probability p_ed. One uniform draw
/// per bacterium whatever the outcome. Returns the relocation mask.
std::vector<bool> eliminate_disperse(Swarm& swarm, std::span<const Interval> box, const BfaConfig& cfg, Rng& rng);

struct TraceEntry {
  std::size_t iteration = 0;  // completed chemotactic blocks (one per reproduction step)
  double best_fitness = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> best_position;
};

struct RunTrace {
  std::vector<TraceEntry> entries;
};

/// `iteration,best_fitness,evaluations` with round-trip number formatting.
std::string trace_csv(const RunTrace& trace);

struct BfaResult {
  std::vector<double> best_position;
  double best_fitness = 0.0;  // raw f, swarm signal excluded
  std::size_t evaluations = 0;
  RunTrace trace;
};

/// Runs the full nested loop. The incumbent is the best raw fitness over every position any
/// bacterium occupied.
BfaResult run_bfa(const FitnessFunction& f, const BfaConfig& cfg);

}  // namespace t2bfa::bfa
