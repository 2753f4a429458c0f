#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "paper_tables.hpp"
#include "t2bfa/climate.hpp"
#include "t2bfa/error.hpp"
#include "t2bfa/fuzzy_type2.hpp"
#include "t2bfa/irrigation.hpp"

using namespace t2bfa;
using namespace t2bfa::irrigation;

namespace {

const climate::ClimateTable& table1() {
  static const auto t = climate::load_climate_csv(std::string(T2BFA_DATA_DIR) + "/climate_table1.csv");
  return t;
}

const fuzzy::Type2FuzzyVariable& temperature() {
  static const auto m = fuzzy::build_type2_model(table1(), climate::Factor::Temperature);
  return m;
}

const fuzzy::Type2FuzzyVariable& insolation() {
  static const auto m = fuzzy::build_type2_model(table1(), climate::Factor::Insolation);
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

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

}  // namespace

TEST_CASE("coded mode at the centre leaves only constant terms") {
  const ProblemSpec spec;
  const auto o = eval_objectives({1.65, 485, 660, 0.105}, {298, 900}, spec);
  // Exact rational / arbitrary-precision oracle values.
  CHECK(close(o.f2, 8.046528981, 1e-14));
  CHECK(close(o.f1, 43352.917274810669775, 1e-13));
  CHECK(close(o.f3, 296675914.5846707271, 1e-13));
}

TEST_CASE("coded mode at a corner") {
  const ProblemSpec spec;
  const auto o = eval_objectives({3, 450, 660, 0.2}, {298, 900}, spec);
  CHECK(close(o.f1, 67228.562860998339316, 1e-13));
  CHECK(close(o.f2, 8.114789912, 1e-13));
  CHECK(close(o.f3, 460094742.52787080751, 1e-13));
}

TEST_CASE("raw mode golden triple") {
  ProblemSpec spec;
  spec.mode = VariableMode::Raw;
  const auto o = eval_objectives({1, 500, 600, 0.1}, {300, 900}, spec);
  CHECK(close(o.f1, -73013957.102846753529, 1e-12));
  CHECK(close(o.f2, 255.133707881, 1e-12));
  CHECK(close(o.f3, -508043962457.81942248, 1e-12));
}

TEST_CASE("scale exponents") {
  ProblemSpec spec;
  const DesignVector d{1.2, 470, 600, 0.05};
  const NoiseVector z{295, 850};
  const auto base = eval_objectives(d, z, spec);
  spec.s1 += std::log10(2.0);
  spec.s3 += std::log10(2.0);
  const auto doubled = eval_objectives(d, z, spec);
  CHECK(close(doubled.f1, 2.0 * base.f1, 1e-12));
  CHECK(close(doubled.f3, 2.0 * base.f3, 1e-12));
  CHECK(doubled.f2 == base.f2);
}

TEST_CASE("equation repairs can be switched off") {
  ProblemSpec spec;
  spec.repairs.f2_decimal_constant = false;
  const auto o = eval_objectives({1.65, 485, 660, 0.105}, {298, 900}, spec);
  CHECK(close(o.f2, 43.4783 * 18507, 1e-14));
  ProblemSpec no_xf;
  no_xf.repairs.f3_xf_as_xd = false;
  const DesignVector d{1, 470, 700, 0.18};
  CHECK(eval_objectives(d, {298, 900}, no_xf).f3 != eval_objectives(d, {298, 900}, ProblemSpec{}).f3);
}

TEST_CASE("evaluation is pure and rejects non-finite input") {
  const ProblemSpec spec;
  const DesignVector d{0.9, 481, 701, 0.07};
  const NoiseVector z{297, 901};
  CHECK(eval_objectives(d, z, spec) == eval_objectives(d, z, spec));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { eval_objectives({nan, 481, 701, 0.07}, z, spec); }) == ErrorCode::NonFiniteResult);
}

TEST_CASE("weights") {
  const WeightVector w(0.1, 0.1, 0.8);
  CHECK(w.w3() == 0.8);
  CHECK(code_of([] { WeightVector(0.4, 0.4, 0.4); }) == ErrorCode::InvalidWeights);
  CHECK(code_of([] { WeightVector(-0.1, 0.3, 0.8); }) == ErrorCode::InvalidWeights);
  CHECK(code_of([] { WeightVector(std::nan(""), 0.5, 0.5); }) == ErrorCode::InvalidWeights);
  CHECK(parse_weights("0.1,0.1,0.8") == w);
  CHECK(code_of([] { parse_weights("0.5,0.5"); }) == ErrorCode::InvalidWeights);
  CHECK(code_of([] { parse_weights("0.5,x,0.5"); }) == ErrorCode::MalformedNumber);
}

TEST_CASE("aggregate reproduces the published F values") {
  for (const auto& s : kPublishedSolutions) {
    CAPTURE(s.label);
    const WeightVector w(s.weights[0], s.weights[1], s.weights[2]);
    const ObjectiveTriple o{s.objectives[0], s.objectives[1], s.objectives[2]};
    CHECK(std::abs(aggregate(o, w) - s.F) <= 0.5);
  }
  CHECK(aggregate({20.6787, 17.1771, 148004}, {0.1, 0.1, 0.8}) == doctest::Approx(118406.98558).epsilon(1e-12));
  CHECK(aggregate({3.5, -2, 7}, {1, 0, 0}) == 3.5);
}

TEST_CASE("aggregate is linear and scale-equivariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e5, 1e5);
  const WeightVector w(0.2, 0.3, 0.5);
  for (int i = 0; i < 200; ++i) {
    const ObjectiveTriple a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const double lhs = aggregate(a, w) + aggregate(b, w);
    CHECK(std::abs(lhs - aggregate(a + b, w)) <= 1e-9 * std::max(1.0, std::abs(lhs)));
  }
  std::vector<ObjectiveTriple> candidates;
  for (int i = 0; i < 100; ++i) candidates.push_back({u(rng), u(rng), u(rng)});
  auto argmax = [&](double c) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (aggregate(c * candidates[i], w) > aggregate(c * candidates[best], w)) best = i;
    }
    return best;
  };
  CHECK(argmax(1.0) == argmax(7.5));
  CHECK(argmax(1.0) == argmax(0.01));
}

TEST_CASE("design bounds") {
  const auto b = design_bounds(ProblemSpec{});
  CHECK(b[0] == Interval{0.3, 3});
  CHECK(b[1] == Interval{450, 520});
  CHECK(b[2] == Interval{520, 800});
  CHECK(b[3] == Interval{0.01, 0.2});
  ProblemSpec custom;
  custom.x_b = {400, 410};
  CHECK(design_bounds(custom)[1] == Interval{400, 410});
  custom.x_c = {5, 5};
  CHECK(code_of([&] { custom.validate(); }) == ErrorCode::InfeasibleSpec);
}

TEST_CASE("feasibility uses closed intervals") {
  const ProblemSpec spec;
  CHECK(feasible({1.65, 485, 660, 0.105}, {298, 900}, spec));
  CHECK_FALSE(feasible({0.29, 485, 660, 0.105}, {298, 900}, spec));
  CHECK(feasible({0.3, 520, 800, 0.01}, {293, 1000}, spec));
  CHECK_FALSE(feasible({1.65, 485, 660, 0.105}, {292.99, 900}, spec));
}

TEST_CASE("noise intervals from grades") {
  const auto& t = temperature();
  const double x = fuzzy::scurve_invert(0.17169, t.annual_secondary);
  const auto point = noise_interval_from_grades(t, {0.17169, 0.17169}, 0.0);
  CHECK(point.lo == point.hi);
  CHECK(point.lo == x);
  const auto padded = noise_interval_from_grades(t, {0.17169, 0.17169});
  CHECK(padded.lo == doctest::Approx(x - 0.005 * 43.9));
  CHECK(padded.hi == doctest::Approx(x + 0.005 * 43.9));
  CHECK(padded.midpoint() == doctest::Approx(292.15).epsilon(1e-4));

  const auto& s = insolation();
  const auto range = noise_interval_from_grades(s, {0.02907, 0.92274});
  CHECK(Interval{14, 336}.contains(range));
  CHECK(fuzzy::scurve_grade(range.lo, s.annual_secondary) == doctest::Approx(0.92274).epsilon(1e-12));
  CHECK(fuzzy::scurve_grade(range.hi, s.annual_secondary) == doctest::Approx(0.02907).epsilon(1e-12));
  CHECK(range.lo == doctest::Approx(117.2).epsilon(1e-3));
  CHECK(range.hi == doctest::Approx(256.8).epsilon(1e-3));

  CHECK(code_of([&] { noise_interval_from_grades(s, {0.9, 0.1}); }) == ErrorCode::EmptyInterval);
  CHECK(code_of([&] { noise_interval_from_grades(s, {0.1, 0.9999}); }) == ErrorCode::GradeOutOfSmoothRange);
  CHECK(code_of([&] { noise_interval_from_grades(s, {0.5, 0.5}, -0.1); }) == ErrorCode::InvalidValue);

  const auto wide = noise_interval_from_grades(t, {0.999, 0.999}, 0.5);
  CHECK(t.annual_domain().contains(wide));
  CHECK(wide.lo == t.annual_domain().lo);
}

TEST_CASE("grade context narrows the noise intervals") {
  GradeContext ctx{"frontier1", {0.8967, 0.8967}, {0.17169, 0.17169}, {0.25264, 0.39913}, {0.02907, 0.92274}};
  const auto spec = apply_grade_context(ProblemSpec{}, temperature(), insolation(), ctx);
  CHECK(spec.z_a == noise_interval_from_grades(temperature(), ctx.temperature_secondary));
  CHECK(spec.z_b == noise_interval_from_grades(insolation(), ctx.insolation_secondary));
  CHECK(spec.z_a_coding == Interval{293, 303});
  CHECK(spec.x_a == ProblemSpec{}.x_a);
  CHECK(code_of([&] { apply_grade_context(ProblemSpec{}, temperature(), insolation(), ctx, 0.0); }) ==
        ErrorCode::InfeasibleSpec);
}

TEST_CASE("search box and fitness") {
  ProblemSpec spec;
  spec.z_b = {120, 250};
  const auto box = search_box(spec);
  REQUIRE(box.size() == kSearchDimension);
  CHECK(box[0] == spec.x_a);
  CHECK(box[5] == Interval{120, 250});
  const std::vector<double> pos{1, 470, 600, 0.1, 296, 200};
  CHECK(design_of(pos) == DesignVector{1, 470, 600, 0.1});
  CHECK(noise_of(pos) == NoiseVector{296, 200});
  const WeightVector w(0.3, 0.3, 0.4);
  const IrrigationFitness f(spec, w);
  CHECK(f.dimension() == 6);
  CHECK(f.evaluate(pos) == aggregate(eval_objectives(design_of(pos), noise_of(pos), spec), w));
}

TEST_CASE("JSON round trips") {
  ProblemSpec spec;
  spec.mode = VariableMode::Raw;
  spec.z_a = {294, 296};
  spec.s3 = 3.0;
  spec.repairs.f3_xf_as_xd = false;
  const nlohmann::json j = spec;
  CHECK(j.get<ProblemSpec>() == spec);
  CHECK(nlohmann::json::object().get<ProblemSpec>() == ProblemSpec{});

  const auto ctx = nlohmann::json::parse(R"({"label":"f3","temperature":{"primary":0.9871,"secondary":0.06648},
      "insolation":{"primary":[0.25264,0.39913],"secondary":[0.02907,0.92274]}})")
                       .get<GradeContext>();
  CHECK(ctx.temperature_secondary.lo == 0.06648);
  CHECK(ctx.temperature_secondary.hi == 0.06648);
  CHECK(ctx.insolation_secondary.hi == 0.92274);
  const nlohmann::json back = ctx;
  const auto again = back.get<GradeContext>();
  CHECK(again.label == "f3");
  CHECK(again.insolation_primary.lo == 0.25264);
}
