#pragma once

namespace t2bfa {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(const Interval& inner) const noexcept {
    return lo <= inner.lo && inner.hi <= hi;
  }
  [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  [[nodiscard]] double width() const noexcept { return hi - lo; }
  [[nodiscard]] double midpoint() const noexcept { return lo + 0.5 * (hi - lo); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace t2bfa
