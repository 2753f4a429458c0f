#include "t2bfa/irrigation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "t2bfa/error.hpp"
#include "t2bfa/text.hpp"

namespace t2bfa::irrigation {

WeightVector::WeightVector(double w1, double w2, double w3) : w_{w1, w2, w3} {
  for (const double w : w_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::InvalidWeights, "weights must be finite and non-negative");
    }
  }
  const double sum = w1 + w2 + w3;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidWeights, "weights must sum to 1, got " + text::format_roundtrip(sum));
  }
}

WeightVector parse_weights(const std::string& s) {
  const auto fields = text::split_csv_line(s);
  if (fields.size() != 3) throw Error(ErrorCode::InvalidWeights, "expected three comma-separated weights");
  std::array<double, 3> w{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = text::parse_double(fields[i]);
    if (!v) throw Error(ErrorCode::MalformedNumber, "cannot parse weight '" + std::string(fields[i]) + "'");
    w[i] = *v;
  }
  return {w[0], w[1], w[2]};
}

void ProblemSpec::validate() const {
  const std::array<std::pair<const char*, Interval>, 8> named{{{"x_a", x_a},
                                                               {"x_b", x_b},
                                                               {"x_c", x_c},
                                                               {"x_d", x_d},
                                                               {"Z_a coding", z_a_coding},
                                                               {"Z_b coding", z_b_coding},
                                                               {"Z_a", z_a},
                                                               {"Z_b", z_b}}};
  for (const auto& [name, iv] : named) {
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi)) {
      throw Error(ErrorCode::InfeasibleSpec, std::string(name) + " bound needs lo < hi");
    }
  }
  if (!std::isfinite(s1) || !std::isfinite(s3)) {
    throw Error(ErrorCode::InfeasibleSpec, "scale exponents must be finite");
  }
}

std::array<Interval, 4> design_bounds(const ProblemSpec& spec) { return {spec.x_a, spec.x_b, spec.x_c, spec.x_d}; }

namespace {

double code(double v, const Interval& iv) noexcept { return (2.0 * v - (iv.lo + iv.hi)) / (iv.hi - iv.lo); }

}  // namespace

ObjectiveTriple eval_objectives(const DesignVector& d, const NoiseVector& z, const ProblemSpec& spec) {
  double xa = d.x_a, xb = d.x_b, xc = d.x_c, xd = d.x_d, za = z.z_a, zb = z.z_b;
  if (spec.mode == VariableMode::Coded) {
    xa = code(xa, spec.x_a);
    xb = code(xb, spec.x_b);
    xc = code(xc, spec.x_c);
    xd = code(xd, spec.x_d);
    za = code(za, spec.z_a_coding);
    zb = code(zb, spec.z_b_coding);
  }

  // Coefficients exactly as published; outer minus signs dropped for maximization.
  const double p1 = 24.947 + 16.011 * xd + 1.306 * xb + 0.820 * xb * xd - 0.785 * za - 0.497 * xd * za +
                    0.228 * xa * xb + 0.212 * xa - 0.15 * xb * xb + 0.13 * xa * xd - 0.11 * xa * xa -
                    0.034 * xb * za + 0.002 * xa * za;

  const double f2_constant = spec.repairs.f2_decimal_constant ? 0.18507 : 18507.0;
  // two separate x_c terms, kept verbatim
  const double p2 = 43.4783 * (f2_constant + 0.01041 * xc + 0.0038 * zb - 0.00366 * za - 0.0035 * xc - 0.00157 * xb);

  const double xf = spec.repairs.f3_xf_as_xd ? xd : 0.0;
  const double p3 = 174695.73 + 112114.69 * xf + 9133.8 * xb + 5733.05 * xb * xd - 5487.76 * za -
                    3478.84 * xd * za + 1586.48 * xa * xb + 1486.84 * xa - 1067.42 * xb * xb +
                    916.26 * xa * xd - 768.9 * xa * xa - 242.88 * xb * za + 152.4 * xa * za;

  const ObjectiveTriple out{p1 * std::pow(10.0, spec.s1), p2, p3 * std::pow(10.0, spec.s3)};
  if (!std::isfinite(out.f1) || !std::isfinite(out.f2) || !std::isfinite(out.f3)) {
    throw Error(ErrorCode::NonFiniteResult, "objective evaluation produced a non-finite value");
  }
  return out;
}

double aggregate(const ObjectiveTriple& o, const WeightVector& w) noexcept {
  return w.w1() * o.f1 + w.w2() * o.f2 + w.w3() * o.f3;
}

bool feasible(const DesignVector& d, const NoiseVector& z, const ProblemSpec& spec) noexcept {
  return spec.x_a.contains(d.x_a) && spec.x_b.contains(d.x_b) && spec.x_c.contains(d.x_c) &&
         spec.x_d.contains(d.x_d) && spec.z_a.contains(z.z_a) && spec.z_b.contains(z.z_b);
}

Interval noise_interval_from_grades(const fuzzy::Type2FuzzyVariable& model, GradeRange secondary, double pad) {
  if (!(pad >= 0.0) || !std::isfinite(pad)) throw Error(ErrorCode::InvalidValue, "pad must be a non-negative fraction");
  if (secondary.lo > secondary.hi) {
    throw Error(ErrorCode::EmptyInterval, "grade range has lo > hi");
  }
  const auto& curve = model.annual_secondary;
  const auto domain = model.annual_domain();
  Interval out;
  if (secondary.lo == secondary.hi) {
    const double x = fuzzy::scurve_invert(secondary.lo, curve);
    const double half = pad * domain.width();
    out = {x - half, x + half};
  } else {
    out = {fuzzy::scurve_invert(secondary.hi, curve), fuzzy::scurve_invert(secondary.lo, curve)};
  }
  out.lo = std::max(out.lo, domain.lo);
  out.hi = std::min(out.hi, domain.hi);
  if (out.lo > out.hi) throw Error(ErrorCode::EmptyInterval, "noise interval is empty after clipping");
  return out;
}

ProblemSpec apply_grade_context(ProblemSpec spec, const fuzzy::Type2FuzzyVariable& temperature,
                                const fuzzy::Type2FuzzyVariable& insolation, const GradeContext& ctx, double pad) {
  spec.z_a = noise_interval_from_grades(temperature, ctx.temperature_secondary, pad);
  spec.z_b = noise_interval_from_grades(insolation, ctx.insolation_secondary, pad);
  // a zero-pad point grade collapses the interval, which leaves nothing to search
  if (!(spec.z_a.lo < spec.z_a.hi) || !(spec.z_b.lo < spec.z_b.hi)) {
    throw Error(ErrorCode::InfeasibleSpec, "grade context yields a degenerate noise interval; use pad > 0");
  }
  return spec;
}

std::vector<Interval> search_box(const ProblemSpec& spec) {
  return {spec.x_a, spec.x_b, spec.x_c, spec.x_d, spec.z_a, spec.z_b};
}

DesignVector design_of(std::span<const double> p) { return {p[0], p[1], p[2], p[3]}; }

NoiseVector noise_of(std::span<const double> p) { return {p[4], p[5]}; }

IrrigationFitness::IrrigationFitness(ProblemSpec spec, WeightVector weights)
    : spec_(std::move(spec)), weights_(weights), bounds_(search_box(spec_)) {}

double IrrigationFitness::evaluate(std::span<const double> position) const {
  return aggregate(eval_objectives(design_of(position), noise_of(position), spec_), weights_);
}

// JSON ----------------------------------------------------------------------------------------

namespace {

nlohmann::json interval_json(const Interval& iv) { return nlohmann::json::array({iv.lo, iv.hi}); }

Interval interval_from(const nlohmann::json& j, const char* name) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::SchemaMismatch, std::string(name) + " must be a [lo, hi] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void read_interval(const nlohmann::json& obj, const char* key, Interval& out) {
  if (obj.contains(key)) out = interval_from(obj.at(key), key);
}

nlohmann::json grade_json(const GradeRange& g) {
  if (g.lo == g.hi) return g.lo;
  return nlohmann::json::array({g.lo, g.hi});
}

GradeRange grade_from(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::SchemaMismatch, "membership grade must be a number or a [lo, hi] pair");
}

}  // namespace

void to_json(nlohmann::json& j, const ProblemSpec& s) {
  j = nlohmann::json{
      {"mode", s.mode == VariableMode::Coded ? "coded" : "raw"},
      {"design_bounds",
       {{"x_a", interval_json(s.x_a)},
        {"x_b", interval_json(s.x_b)},
        {"x_c", interval_json(s.x_c)},
        {"x_d", interval_json(s.x_d)}}},
      {"noise_coding", {{"Z_a", interval_json(s.z_a_coding)}, {"Z_b", interval_json(s.z_b_coding)}}},
      {"noise_interval", {{"Z_a", interval_json(s.z_a)}, {"Z_b", interval_json(s.z_b)}}},
      {"s1", s.s1},
      {"s3", s.s3},
      {"repairs",
       {{"f2_decimal_constant", s.repairs.f2_decimal_constant}, {"f3_xf_as_xd", s.repairs.f3_xf_as_xd}}},
  };
}

void from_json(const nlohmann::json& j, ProblemSpec& s) {
  s = ProblemSpec{};
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "coded") {
      s.mode = VariableMode::Coded;
    } else if (mode == "raw") {
      s.mode = VariableMode::Raw;
    } else {
      throw Error(ErrorCode::SchemaMismatch, "mode must be 'coded' or 'raw'");
    }
  }
  if (j.contains("design_bounds")) {
    const auto& b = j.at("design_bounds");
    read_interval(b, "x_a", s.x_a);
    read_interval(b, "x_b", s.x_b);
    read_interval(b, "x_c", s.x_c);
    read_interval(b, "x_d", s.x_d);
  }
  if (j.contains("noise_coding")) {
    read_interval(j.at("noise_coding"), "Z_a", s.z_a_coding);
    read_interval(j.at("noise_coding"), "Z_b", s.z_b_coding);
    s.z_a = s.z_a_coding;
    s.z_b = s.z_b_coding;
  }
  if (j.contains("noise_interval")) {
    read_interval(j.at("noise_interval"), "Z_a", s.z_a);
    read_interval(j.at("noise_interval"), "Z_b", s.z_b);
  }
  if (j.contains("s1")) s.s1 = j.at("s1").get<double>();
  if (j.contains("s3")) s.s3 = j.at("s3").get<double>();
  if (j.contains("repairs")) {
    const auto& r = j.at("repairs");
    if (r.contains("f2_decimal_constant")) s.repairs.f2_decimal_constant = r.at("f2_decimal_constant").get<bool>();
    if (r.contains("f3_xf_as_xd")) s.repairs.f3_xf_as_xd = r.at("f3_xf_as_xd").get<bool>();
  }
  s.validate();
}

void to_json(nlohmann::json& j, const GradeContext& c) {
  j = nlohmann::json{
      {"label", c.label},
      {"temperature", {{"primary", grade_json(c.temperature_primary)}, {"secondary", grade_json(c.temperature_secondary)}}},
      {"insolation", {{"primary", grade_json(c.insolation_primary)}, {"secondary", grade_json(c.insolation_secondary)}}},
  };
}

void from_json(const nlohmann::json& j, GradeContext& c) {
  c.label = j.value("label", std::string{});
  const auto& t = j.at("temperature");
  const auto& s = j.at("insolation");
  c.temperature_primary = t.contains("primary") ? grade_from(t.at("primary")) : GradeRange{};
  c.temperature_secondary = grade_from(t.at("secondary"));
  c.insolation_primary = s.contains("primary") ? grade_from(s.at("primary")) : GradeRange{};
  c.insolation_secondary = grade_from(s.at("secondary"));
}

}  // namespace t2bfa::irrigation
