#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "t2bfa/fitness.hpp"
#include "t2bfa/fuzzy_type2.hpp"
#include "t2bfa/interval.hpp"

// Solar-powered irrigation design problem: three response-surface objectives over four design
// variables and two environmental noise factors.
namespace t2bfa::irrigation {

struct DesignVector {
  double x_a = 0.0;  // maximum pressure, MPa
  double x_b = 0.0;  // maximum temperature, K
  double x_c = 0.0;  // maximum collector temperature, K
  double x_d = 0.0;  // fluid flowrate, kg/s

  friend bool operator==(const DesignVector&, const DesignVector&) = default;
};

struct NoiseVector {
  double z_a = 0.0;  // ambient temperature, K
  double z_b = 0.0;  // insolation, W/m^2

  friend bool operator==(const NoiseVector&, const NoiseVector&) = default;
};

struct ObjectiveTriple {
  double f1 = 0.0;  // pump power output, kW
  double f2 = 0.0;  // overall efficiency, %
  double f3 = 0.0;  // fiscal savings, USD

  [[nodiscard]] std::array<double, 3> as_array() const noexcept { return {f1, f2, f3}; }

  friend ObjectiveTriple operator+(const ObjectiveTriple& a, const ObjectiveTriple& b) noexcept {
    return {a.f1 + b.f1, a.f2 + b.f2, a.f3 + b.f3};
  }
  friend ObjectiveTriple operator*(double c, const ObjectiveTriple& o) noexcept {
    return {c * o.f1, c * o.f2, c * o.f3};
  }
  friend bool operator==(const ObjectiveTriple&, const ObjectiveTriple&) = default;
};

/// Convex combination weights. Construction throws InvalidWeights unless each weight is
/// finite and >= 0 and they sum to 1 within 1e-12.
class WeightVector {
 public:
  WeightVector(double w1, double w2, double w3);

  [[nodiscard]] double w1() const noexcept { return w_[0]; }
  [[nodiscard]] double w2() const noexcept { return w_[1]; }
  [[nodiscard]] double w3() const noexcept { return w_[2]; }
  [[nodiscard]] const std::array<double, 3>& values() const noexcept { return w_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
  friend auto operator<=>(const WeightVector& a, const WeightVector& b) noexcept { return a.w_ <=> b.w_; }

 private:
  std::array<double, 3> w_;
};

/// Parses "a,b,c".
WeightVector parse_weights(const std::string& text);

enum class VariableMode {
  Raw,    // physical units straight into the polynomials
  Coded,  // each variable mapped linearly from its crisp bound interval onto [-1, 1]
};

/// Readings of two misprints in the published polynomials. Both default to on.
struct EquationRepairs {
  bool f2_decimal_constant = true;  // "018507" read as 0.18507 (off: 18507)
  bool f3_xf_as_xd = true;          // undefined x_f read as x_d (off: term dropped)

  friend bool operator==(const EquationRepairs&, const EquationRepairs&) = default;
};

struct ProblemSpec {
  Interval x_a{0.3, 3.0};
  Interval x_b{450.0, 520.0};
  Interval x_c{520.0, 800.0};
  Interval x_d{0.01, 0.2};
  // Crisp noise bounds; the coded mode always normalizes against these.
  Interval z_a_coding{293.0, 303.0};
  Interval z_b_coding{800.0, 1000.0};
  // Active noise intervals the search and feasibility use. Start equal to the crisp bounds and
  // are narrowed by the fuzzy pipeline.
  Interval z_a{293.0, 303.0};
  Interval z_b{800.0, 1000.0};
  double s1 = 3.24;
  double s3 = 3.23;
  VariableMode mode = VariableMode::Coded;
  EquationRepairs repairs;

  /// Throws InfeasibleSpec when any bound has lo >= hi or a constant is non-finite.
  void validate() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// (x_a, x_b, x_c, x_d) bounds in that order.
std::array<Interval, 4> design_bounds(const ProblemSpec& spec);

/// Objectives oriented for maximization. Throws NonFiniteResult on overflow or NaN input.
ObjectiveTriple eval_objectives(const DesignVector& d, const NoiseVector& z, const ProblemSpec& spec);

double aggregate(const ObjectiveTriple& o, const WeightVector& w) noexcept;

/// Closed-interval containment of design coordinates in their bounds and noise coordinates in
/// the active noise intervals.
bool feasible(const DesignVector& d, const NoiseVector& z, const ProblemSpec& spec) noexcept;

/// A secondary-grade specification. lo == hi denotes a point grade.
struct GradeRange {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kDefaultNoisePad = 0.005;

/// Crisp noise interval implied by secondary grades on the annual curve. A range maps to
/// [invert(hi), invert(lo)] because the curve decreases; a point maps to its preimage widened by
/// pad * annual width on each side. The result is clipped to the annual domain.
Interval noise_interval_from_grades(const fuzzy::Type2FuzzyVariable& model, GradeRange secondary,
                                    double pad = kDefaultNoisePad);

/// Membership-grade context of one frontier: ambient temperature at fixed grades, insolation
/// over grade ranges. Primary grades are recorded for reporting; the noise bounds come from the
/// secondary grades.
struct GradeContext {
  std::string label;
  GradeRange temperature_primary;
  GradeRange temperature_secondary;
  GradeRange insolation_primary;
  GradeRange insolation_secondary;
};

/// Returns `spec` with z_a / z_b replaced by the intervals implied by the context's grades.
ProblemSpec apply_grade_context(ProblemSpec spec, const fuzzy::Type2FuzzyVariable& temperature,
                                const fuzzy::Type2FuzzyVariable& insolation, const GradeContext& ctx,
                                double pad = kDefaultNoisePad);

inline constexpr std::size_t kSearchDimension = 6;

/// Search box (x_a, x_b, x_c, x_d, Z_a, Z_b) with the active noise intervals.
std::vector<Interval> search_box(const ProblemSpec& spec);

DesignVector design_of(std::span<const double> position);
NoiseVector noise_of(std::span<const double> position);

/// Weighted-sum aggregate of the three objectives as a solver fitness.
class IrrigationFitness final : public bfa::FitnessFunction {
 public:
  IrrigationFitness(ProblemSpec spec, WeightVector weights);

  [[nodiscard]] const std::vector<Interval>& bounds() const noexcept override { return bounds_; }
  [[nodiscard]] double evaluate(std::span<const double> position) const override;

  [[nodiscard]] const ProblemSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const WeightVector& weights() const noexcept { return weights_; }

 private:
  ProblemSpec spec_;
  WeightVector weights_;
  std::vector<Interval> bounds_;
};

void to_json(nlohmann::json& j, const ProblemSpec& spec);
void from_json(const nlohmann::json& j, ProblemSpec& spec);
void to_json(nlohmann::json& j, const GradeContext& ctx);
void from_json(const nlohmann::json& j, GradeContext& ctx);

}  // namespace t2bfa::irrigation
