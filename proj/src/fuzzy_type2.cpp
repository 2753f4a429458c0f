#include "t2bfa/fuzzy_type2.hpp"

#include <algorithm>
#include <cmath>

#include "t2bfa/error.hpp"

namespace t2bfa::fuzzy {

double SCurveParams::smooth_max() const noexcept { return B / (1.0 + C); }

double SCurveParams::smooth_min() const noexcept { return B / (1.0 + C * std::exp(alpha)); }

void SCurveParams::validate() const {
  if (!(std::isfinite(b_lo) && std::isfinite(b_hi) && b_lo < b_hi)) {
    throw Error(ErrorCode::InvalidConfig, "S-curve needs finite b_lo < b_hi");
  }
  if (!(B > 0.0 && C > 0.0 && alpha > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "S-curve constants B, C, alpha must be positive");
  }
  if (!(smooth_max() <= 1.0 && smooth_min() > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "S-curve logistic branch must stay inside (0, 1]");
  }
}

double scurve_grade(double b, const SCurveParams& p) noexcept {
  if (b <= p.b_lo) return 1.0;
  if (b >= p.b_hi) return 0.0;
  const double t = (b - p.b_lo) / (p.b_hi - p.b_lo);
  return p.B / (1.0 + p.C * std::exp(p.alpha * t));
}

double scurve_invert(double g, const SCurveParams& p) {
  if (!(g > p.smooth_min() && g < p.smooth_max())) {
    throw Error(ErrorCode::GradeOutOfSmoothRange,
                "grade " + std::to_string(g) + " is outside the open logistic range (" +
                    std::to_string(p.smooth_min()) + ", " + std::to_string(p.smooth_max()) + ")");
  }
  const double t = std::log((p.B - g) / (g * p.C)) / p.alpha;
  return p.b_lo + (p.b_hi - p.b_lo) * t;
}

SCurveParams fit_scurve(double lo, double hi, const SCurveShape& shape) {
  if (!(lo < hi)) {
    throw Error(ErrorCode::DegenerateRange,
                "cannot fit an S-curve to [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  SCurveParams p{lo, hi, shape.B, shape.C, shape.alpha};
  p.validate();
  return p;
}

void Type2FuzzyVariable::validate() const {
  annual_secondary.validate();
  const auto domain = annual_domain();
  for (std::size_t m = 0; m < monthly_primary.size(); ++m) {
    const auto& p = monthly_primary[m];
    p.validate();
    if (!domain.contains(Interval{p.b_lo, p.b_hi})) {
      throw Error(ErrorCode::InvalidConfig,
                  factor_name + ": month " + std::to_string(m + 1) + " range leaves the annual range");
    }
  }
}

Type2FuzzyVariable build_type2_model(const climate::ClimateTable& table, climate::Factor factor,
                                     const SCurveShape& shape) {
  Type2FuzzyVariable v;
  v.factor_name = std::string(climate::factor_name(factor));
  for (int m = 1; m <= 12; ++m) {
    const auto range = climate::monthly_interval(table, m, factor);
    try {
      v.monthly_primary[static_cast<std::size_t>(m - 1)] = fit_scurve(range.min, range.max, shape);
    } catch (const Error& e) {
      throw Error(e.code(), v.factor_name + " month " + std::to_string(m) + ": " + e.detail());
    }
  }
  const auto annual = climate::annual_extrema(table, factor);
  v.annual_secondary = fit_scurve(annual.min, annual.max, shape);
  return v;
}

GradeBounds fou_bounds(const Type2FuzzyVariable& model, double x) noexcept {
  GradeBounds g{1.0, 0.0};
  for (const auto& p : model.monthly_primary) {
    const double grade = scurve_grade(x, p);
    g.lower = std::min(g.lower, grade);
    g.upper = std::max(g.upper, grade);
  }
  return g;
}

FootprintOfUncertainty sample_fou(const Type2FuzzyVariable& model, std::size_t grid_points) {
  if (grid_points < 2) throw Error(ErrorCode::InvalidConfig, "FOU grid needs at least 2 points");
  const auto domain = model.annual_domain();
  FootprintOfUncertainty fou;
  fou.x.reserve(grid_points);
  fou.lower.reserve(grid_points);
  fou.upper.reserve(grid_points);
  const double span = domain.width();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = (i + 1 == grid_points)
                         ? domain.hi
                         : domain.lo + span * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const auto g = fou_bounds(model, x);
    fou.x.push_back(x);
    fou.lower.push_back(g.lower);
    fou.upper.push_back(g.upper);
  }
  return fou;
}

AlphaPlane alpha_plane_cut(const Type2FuzzyVariable& model, double level) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw Error(ErrorCode::InvalidValue, "alpha-plane level must lie in [0, 1]");
  }
  const auto& s = model.annual_secondary;
  double right = s.b_hi;
  if (level >= s.smooth_max()) {
    // only the saturated point b_lo carries grade >= level
    right = s.b_lo;
  } else if (level > s.smooth_min()) {
    right = std::clamp(scurve_invert(level, s), s.b_lo, s.b_hi);
  }
  return {level, {s.b_lo, right}};
}

std::vector<AlphaPlane> type_reduce(const Type2FuzzyVariable& model, int n_planes) {
  if (n_planes < 2) {
    throw Error(ErrorCode::TooFewPlanes, "type reduction needs at least 2 planes, got " + std::to_string(n_planes));
  }
  std::vector<AlphaPlane> planes;
  planes.reserve(static_cast<std::size_t>(n_planes));
  for (int i = 0; i < n_planes; ++i) {
    planes.push_back(alpha_plane_cut(model, static_cast<double>(i) / static_cast<double>(n_planes - 1)));
  }
  return planes;
}

CredibilityLevel::CredibilityLevel(double epsilon, const SCurveParams& against) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < against.smooth_max())) {
    throw Error(ErrorCode::InvalidValue,
                "credibility level must satisfy 0 < eps < B/(1+C) = " + std::to_string(against.smooth_max()));
  }
}

Interval defuzzify_interval(std::span<const AlphaPlane> planes, double eps) {
  if (planes.empty()) throw Error(ErrorCode::EmptyCut, "no alpha-planes to cut");
  // Levels built as i/(n-1) may sit one ulp off a user-typed decimal.
  constexpr double kLevelSlack = 1e-12;
  const AlphaPlane* chosen = nullptr;
  for (const auto& p : planes) {
    if (p.level + kLevelSlack >= eps && (chosen == nullptr || p.level < chosen->level)) chosen = &p;
  }
  if (chosen == nullptr) {
    throw Error(ErrorCode::EmptyCut, "credibility level " + std::to_string(eps) + " exceeds every plane level");
  }
  return chosen->interval;
}

Interval defuzzify_interval(std::span<const AlphaPlane> planes, const CredibilityLevel& eps) {
  return defuzzify_interval(planes, eps.value());
}

GradePair grade_pair(const Type2FuzzyVariable& model, double x, int month) {
  if (month < 1 || month > 12) {
    throw Error(ErrorCode::MonthOutOfRange, "month " + std::to_string(month) + " is not in 1..12");
  }
  return {scurve_grade(x, model.monthly_primary[static_cast<std::size_t>(month - 1)]),
          scurve_grade(x, model.annual_secondary)};
}

void to_json(nlohmann::json& j, const SCurveParams& p) {
  j = nlohmann::json{{"b_lo", p.b_lo}, {"b_hi", p.b_hi}, {"B", p.B}, {"C", p.C}, {"alpha", p.alpha}};
}

void from_json(const nlohmann::json& j, SCurveParams& p) {
  p.b_lo = j.at("b_lo").get<double>();
  p.b_hi = j.at("b_hi").get<double>();
  p.B = j.at("B").get<double>();
  p.C = j.at("C").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.validate();
}

void to_json(nlohmann::json& j, const Type2FuzzyVariable& v) {
  j = nlohmann::json{{"factor", v.factor_name}, {"monthly", v.monthly_primary}, {"annual", v.annual_secondary}};
}

void from_json(const nlohmann::json& j, Type2FuzzyVariable& v) {
  v.factor_name = j.at("factor").get<std::string>();
  const auto& monthly = j.at("monthly");
  if (!monthly.is_array() || monthly.size() != 12) {
    throw Error(ErrorCode::SchemaMismatch, "fuzzy model needs exactly 12 monthly curves");
  }
  for (std::size_t m = 0; m < 12; ++m) v.monthly_primary[m] = monthly[m].get<SCurveParams>();
  v.annual_secondary = j.at("annual").get<SCurveParams>();
  v.validate();
}

}  // namespace t2bfa::fuzzy
