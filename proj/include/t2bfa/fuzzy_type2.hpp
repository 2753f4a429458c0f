#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "t2bfa/climate.hpp"
#include "t2bfa/interval.hpp"

namespace t2bfa::fuzzy {

/// Shape constants of the modified S-curve. The curve is decreasing: grade 1 at or below the
/// low edge, grade 0 at or above the high edge, logistic in between.
struct SCurveShape {
  double B = 1.0;
  double C = 0.001001;
  double alpha = 13.8135;

  friend bool operator==(const SCurveShape&, const SCurveShape&) = default;
};

struct SCurveParams {
  double b_lo = 0.0;
  double b_hi = 1.0;
  double B = 1.0;
  double C = 0.001001;
  double alpha = 13.8135;

  /// Grade of the logistic branch at b_lo, B/(1+C). The piecewise curve jumps from 1 to this.
  [[nodiscard]] double smooth_max() const noexcept;
  /// Grade of the logistic branch at b_hi, B/(1+C e^alpha).
  [[nodiscard]] double smooth_min() const noexcept;
  /// Throws InvalidConfig unless b_lo < b_hi, B, C, alpha > 0 and both branch ends lie in (0, 1].
  void validate() const;

  friend bool operator==(const SCurveParams&, const SCurveParams&) = default;
};

using t2bfa::Interval;

double scurve_grade(double b, const SCurveParams& p) noexcept;

/// Analytic inverse of the logistic branch. Requires smooth_min() < g < smooth_max(),
/// otherwise throws GradeOutOfSmoothRange.
double scurve_invert(double g, const SCurveParams& p);

/// Throws DegenerateRange unless lo < hi.
SCurveParams fit_scurve(double lo, double hi, const SCurveShape& shape = {});

struct Type2FuzzyVariable {
  std::string factor_name;
  std::array<SCurveParams, 12> monthly_primary{};
  SCurveParams annual_secondary{};

  [[nodiscard]] Interval annual_domain() const noexcept {
    return {annual_secondary.b_lo, annual_secondary.b_hi};
  }
  /// Checks every curve and that each monthly range lies inside the annual one.
  void validate() const;

  friend bool operator==(const Type2FuzzyVariable&, const Type2FuzzyVariable&) = default;
};

/// Monthly primaries fitted to each month's (min, max); the secondary to the annual extrema.
Type2FuzzyVariable build_type2_model(const climate::ClimateTable& table, climate::Factor factor,
                                     const SCurveShape& shape = {});

struct GradeBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Lower/upper envelope of the twelve monthly primary grades at x.
GradeBounds fou_bounds(const Type2FuzzyVariable& model, double x) noexcept;

inline constexpr std::size_t kDefaultFouGridPoints = 512;

struct FootprintOfUncertainty {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Samples the envelopes on a uniform grid spanning the annual domain (endpoints included).
FootprintOfUncertainty sample_fou(const Type2FuzzyVariable& model,
                                  std::size_t grid_points = kDefaultFouGridPoints);

struct AlphaPlane {
  double level = 0.0;
  Interval interval;
};

/// Level set {x in annual domain : secondary grade(x) >= level}. The left edge is always the
/// annual low edge; the right edge shrinks as the level rises.
AlphaPlane alpha_plane_cut(const Type2FuzzyVariable& model, double level);

inline constexpr int kDefaultPlaneCount = 11;

/// Planes at levels 0, 1/(n-1), ..., 1. Throws TooFewPlanes for n < 2.
std::vector<AlphaPlane> type_reduce(const Type2FuzzyVariable& model, int n_planes = kDefaultPlaneCount);

/// Credibility level accepted by a decision maker: 0 < epsilon < B/(1+C) of the curve it refers to.
class CredibilityLevel {
 public:
  CredibilityLevel(double epsilon, const SCurveParams& against);
  [[nodiscard]] double value() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

/// Interval of the plane whose level is the smallest one >= eps. Throws EmptyCut when eps
/// exceeds every level, and EmptyCut for an empty plane collection.
Interval defuzzify_interval(std::span<const AlphaPlane> planes, double eps);
Interval defuzzify_interval(std::span<const AlphaPlane> planes, const CredibilityLevel& eps);

struct GradePair {
  double primary = 0.0;
  double secondary = 0.0;
};

/// Primary grade from the given month's curve, secondary from the annual curve.
GradePair grade_pair(const Type2FuzzyVariable& model, double x, int month);

void to_json(nlohmann::json& j, const SCurveParams& p);
void from_json(const nlohmann::json& j, SCurveParams& p);
void to_json(nlohmann::json& j, const Type2FuzzyVariable& v);
void from_json(const nlohmann::json& j, Type2FuzzyVariable& v);

}  // namespace t2bfa::fuzzy
