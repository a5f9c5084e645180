#pragma once

#include <limits>

namespace divergelab {

/// Nonnegative real or +inf. Infinity is a tag, never a float sentinel in reports.
struct DivergenceValue {
  double value = 0.0;
  bool finite = true;

  static DivergenceValue of(double v) { return {v, true}; }
  static DivergenceValue infinite() { return {std::numeric_limits<double>::infinity(), false}; }

  friend bool operator==(const DivergenceValue&, const DivergenceValue&) = default;
};

}  // namespace divergelab
