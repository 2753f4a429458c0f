#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "t2bfa/climate.hpp"
#include "t2bfa/error.hpp"
#include "t2bfa/fuzzy_type2.hpp"

using namespace t2bfa;
using namespace t2bfa::fuzzy;
using climate::Factor;

namespace {

const climate::ClimateTable& table1() {
  static const auto t = climate::load_climate_csv(std::string(T2BFA_DATA_DIR) + "/climate_table1.csv");
  return t;
}

const Type2FuzzyVariable& temperature() {
  static const auto m = build_type2_model(table1(), Factor::Temperature);
  return m;
}

const Type2FuzzyVariable& insolation() {
  static const auto m = build_type2_model(table1(), Factor::Insolation);
  return m;
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

const SCurveParams kUnit{};  // [0, 1] with default shape

}  // namespace

TEST_CASE("scurve branches") {
  CHECK(scurve_grade(-1.0, kUnit) == 1.0);
  CHECK(scurve_grade(2.0, kUnit) == 0.0);
  CHECK(scurve_grade(kUnit.b_lo, kUnit) == 1.0);
  CHECK(scurve_grade(kUnit.b_hi, kUnit) == 0.0);
  // Oracle values from arbitrary-precision evaluation.
  CHECK(scurve_grade(0.5, kUnit) == doctest::Approx(0.500001444662263).epsilon(1e-13));
  CHECK(kUnit.smooth_max() == doctest::Approx(0.999000000999).epsilon(1e-13));
  CHECK(kUnit.smooth_min() == doctest::Approx(0.00100001054679587).epsilon(1e-12));
}

TEST_CASE("scurve inverse") {
  CHECK(scurve_invert(0.5, kUnit) == doctest::Approx(0.500000418333446).epsilon(1e-12));
  CHECK(scurve_invert(kUnit.smooth_max() - 1e-12, kUnit) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(code_of([] { scurve_invert(0.9995, kUnit); }) == ErrorCode::GradeOutOfSmoothRange);
  CHECK(code_of([] { scurve_invert(0.0005, kUnit); }) == ErrorCode::GradeOutOfSmoothRange);
  CHECK(code_of([] { scurve_invert(1.0, kUnit); }) == ErrorCode::GradeOutOfSmoothRange);

  const auto p = fit_scurve(265.2, 309.1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(p.b_lo, p.b_hi);
  for (int i = 0; i < 2000; ++i) {
    const double b = u(rng);
    if (b <= p.b_lo || b >= p.b_hi) continue;
    CHECK(std::abs(scurve_invert(scurve_grade(b, p), p) - b) <= 1e-9 * (p.b_hi - p.b_lo));
  }
}

TEST_CASE("scurve grade range and monotonicity") {
  const auto p = fit_scurve(14, 336);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 350.0);
  for (int i = 0; i < 2000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const double ga = scurve_grade(a, p), gb = scurve_grade(b, p);
    CHECK(ga >= gb);
    CHECK(ga >= 0.0);
    CHECK(ga <= 1.0);
    if (a > p.b_lo && a < p.b_hi) {
      CHECK(ga > 0.0);
      CHECK(ga <= p.smooth_max());
    }
  }
}

TEST_CASE("fit_scurve") {
  const auto t = fit_scurve(265.2, 309.1);
  CHECK(t.b_lo == 265.2);
  CHECK(t.b_hi == 309.1);
  CHECK(t.B == 1.0);
  CHECK(t.C == 0.001001);
  CHECK(t.alpha == 13.8135);
  const auto s = fit_scurve(14, 336);
  CHECK(s.b_lo == 14);
  CHECK(s.b_hi == 336);
  CHECK(code_of([] { fit_scurve(0, 0); }) == ErrorCode::DegenerateRange);
  CHECK(code_of([] { fit_scurve(2, 1); }) == ErrorCode::DegenerateRange);
}

TEST_CASE("type-2 models of the climate table") {
  CHECK(temperature().annual_secondary.b_lo == 265.2);
  CHECK(temperature().annual_secondary.b_hi == 309.1);
  CHECK(insolation().monthly_primary[0].b_lo == 43);
  CHECK(insolation().monthly_primary[0].b_hi == 146);
  CHECK_NOTHROW(temperature().validate());
  for (const auto& m : temperature().monthly_primary) {
    CHECK(temperature().annual_domain().contains(Interval{m.b_lo, m.b_hi}));
  }
}

TEST_CASE("constant climate cannot be fuzzified") {
  std::array<climate::MonthlyClimateRecord, 12> rows{};
  for (int m = 0; m < 12; ++m) rows[m] = {m + 1, 290, 290, 290, 100, 100, 100};
  const climate::ClimateTable flat(rows);
  CHECK(code_of([&] { build_type2_model(flat, Factor::Temperature); }) == ErrorCode::DegenerateRange);
}

TEST_CASE("FOU bounds") {
  const auto below = fou_bounds(temperature(), 200.0);
  CHECK(below.lower == 1.0);
  CHECK(below.upper == 1.0);
  const auto above = fou_bounds(temperature(), 400.0);
  CHECK(above.lower == 0.0);
  CHECK(above.upper == 0.0);

  // Brute force over the twelve monthly curves fitted straight from the table.
  double lo = 1.0, hi = 0.0;
  for (int m = 1; m <= 12; ++m) {
    const auto iv = climate::monthly_interval(table1(), m, Factor::Temperature);
    const double g = scurve_grade(280.0, fit_scurve(iv.min, iv.max));
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  const auto at280 = fou_bounds(temperature(), 280.0);
  CHECK(at280.lower == lo);
  CHECK(at280.upper == hi);
  CHECK(at280.lower < at280.upper);
}

TEST_CASE("FOU envelope contains every monthly curve on the 512-point grid") {
  for (const auto* model : {&temperature(), &insolation()}) {
    const auto fou = sample_fou(*model);
    REQUIRE(fou.x.size() == 512);
    CHECK(fou.x.front() == model->annual_domain().lo);
    CHECK(fou.x.back() == model->annual_domain().hi);
    for (std::size_t i = 0; i < fou.x.size(); ++i) {
      CHECK(0.0 <= fou.lower[i]);
      CHECK(fou.lower[i] <= fou.upper[i]);
      CHECK(fou.upper[i] <= 1.0);
      for (const auto& p : model->monthly_primary) {
        const double g = scurve_grade(fou.x[i], p);
        CHECK(fou.lower[i] <= g);
        CHECK(g <= fou.upper[i]);
      }
    }
  }
}

TEST_CASE("alpha-plane cuts") {
  const auto& m = temperature();
  const auto full = alpha_plane_cut(m, 0.0);
  CHECK(full.interval == m.annual_domain());
  const auto top = alpha_plane_cut(m, 1.0);
  CHECK(top.interval.lo == m.annual_secondary.b_lo);
  CHECK(top.interval.hi == m.annual_secondary.b_lo);
  const auto half = alpha_plane_cut(m, 0.5);
  CHECK(half.interval.lo == m.annual_secondary.b_lo);
  CHECK(half.interval.hi == scurve_invert(0.5, m.annual_secondary));
  CHECK(scurve_grade(half.interval.hi, m.annual_secondary) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(code_of([&] { alpha_plane_cut(m, 1.5); }) == ErrorCode::InvalidValue);
  CHECK(code_of([&] { alpha_plane_cut(m, -0.1); }) == ErrorCode::InvalidValue);
}

TEST_CASE("type reduction levels and nesting") {
  const auto two = type_reduce(temperature(), 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].level == 0.0);
  CHECK(two[1].level == 1.0);
  CHECK(code_of([] { type_reduce(temperature(), 1); }) == ErrorCode::TooFewPlanes);

  for (const auto* model : {&temperature(), &insolation()}) {
    const auto planes = type_reduce(*model, 11);
    REQUIRE(planes.size() == 11);
    for (std::size_t i = 0; i < planes.size(); ++i) {
      CHECK(planes[i].level == doctest::Approx(0.1 * static_cast<double>(i)).epsilon(1e-15));
      CHECK(planes[i].interval.lo <= planes[i].interval.hi);
      for (std::size_t j = i; j < planes.size(); ++j) CHECK(planes[i].interval.contains(planes[j].interval));
    }
  }
}

TEST_CASE("defuzzification picks the epsilon cut") {
  const auto& m = temperature();
  const auto planes = type_reduce(m, 11);
  CHECK(defuzzify_interval(planes, 0.0) == planes.front().interval);
  CHECK(defuzzify_interval(planes, 0.95) == planes.back().interval);
  CHECK(defuzzify_interval(planes, 0.5) == alpha_plane_cut(m, 0.5).interval);
  CHECK(defuzzify_interval(planes, 0.45) == planes[5].interval);
  CHECK(defuzzify_interval(planes, CredibilityLevel(0.3, m.annual_secondary)) == planes[3].interval);
  CHECK(code_of([&] { defuzzify_interval(planes, 1.01); }) == ErrorCode::EmptyCut);
  CHECK(code_of([] { defuzzify_interval(std::vector<AlphaPlane>{}, 0.5); }) == ErrorCode::EmptyCut);
  CHECK_THROWS_AS(CredibilityLevel(0.0, m.annual_secondary), Error);
  CHECK_THROWS_AS(CredibilityLevel(0.9995, m.annual_secondary), Error);
  for (int k = 1; k < 100; ++k) {
    const auto iv = defuzzify_interval(planes, k / 100.0);
    CHECK(m.annual_domain().contains(iv));
  }
}

TEST_CASE("grade pairs") {
  const auto& m = temperature();
  for (int month = 1; month <= 12; ++month) {
    const auto low = grade_pair(m, 260.0, month);
    CHECK(low.primary == 1.0);
    CHECK(low.secondary == 1.0);
    const auto high = grade_pair(m, 320.0, month);
    CHECK(high.primary == 0.0);
    CHECK(high.secondary == 0.0);
  }
  const auto g = grade_pair(m, 291.26, 6);
  CHECK(g.secondary == scurve_grade(291.26, m.annual_secondary));
  CHECK(g.primary == scurve_grade(291.26, m.monthly_primary[5]));
  CHECK(g.secondary > 0.0);
  CHECK(g.secondary < 1.0);
  CHECK(code_of([&] { grade_pair(m, 290.0, 13); }) == ErrorCode::MonthOutOfRange);
}

TEST_CASE("model JSON round trip") {
  const nlohmann::json j = insolation();
  CHECK(j.at("monthly").size() == 12);
  CHECK(j.at("factor") == "insolation");
  CHECK(j.get<Type2FuzzyVariable>() == insolation());
  const nlohmann::json pj = kUnit;
  CHECK(pj.get<SCurveParams>() == kUnit);
}
