#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "t2bfa/interval.hpp"

namespace t2bfa::bfa {

/// A bounded objective the solver maximizes. evaluate() must be pure and finite on the box.
class FitnessFunction {
 public:
  virtual ~FitnessFunction() = default;

  [[nodiscard]] virtual const std::vector<Interval>& bounds() const noexcept = 0;
  [[nodiscard]] virtual double evaluate(std::span<const double> position) const = 0;

  [[nodiscard]] std::size_t dimension() const noexcept { return bounds().size(); }
};

/// Adapts a callable to FitnessFunction; handy for fixtures and self-tests.
class LambdaFitness final : public FitnessFunction {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  LambdaFitness(std::vector<Interval> bounds, Fn fn) : bounds_(std::move(bounds)), fn_(std::move(fn)) {}

  [[nodiscard]] const std::vector<Interval>& bounds() const noexcept override { return bounds_; }
  [[nodiscard]] double evaluate(std::span<const double> position) const override { return fn_(position); }

 private:
  std::vector<Interval> bounds_;
  Fn fn_;
};

/// Maximize -||x||^2 on [-half_width, half_width]^dim. Optimum 0 at the origin.
LambdaFitness sphere_fitness(std::size_t dim = 4, double half_width = 5.0);

}  // namespace t2bfa::bfa
