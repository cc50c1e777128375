#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spread {

using NodeId = std::uint32_t;
using Seconds = std::int64_t;

inline constexpr Seconds kSecondsPerDay = 86400;

constexpr Seconds days(double d) { return static_cast<Seconds>(d * kSecondsPerDay); }

/// Planar coordinates in meters (x east, y north) in a dataset-local projection.
struct Position {
  double x = 0.0;
  double y = 0.0;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Thrown when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation timestamps 0, step, 2*step, ... up to and including `end`.
std::vector<Seconds> evaluation_grid(Seconds end, Seconds step = kSecondsPerDay);

/// Shortest decimal text that parses back to the same double ("nan" for NaN).
std::string format_double(double v);

}  // namespace spread
