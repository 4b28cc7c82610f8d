#pragma once

#include <span>

#include "trsr/tensor.hpp"

namespace trsr {

struct InterpolationOperator {
  /// queries x knots; interpolated values = weights * knot_values.
  Matrix weights;
  /// Fewer than four knots: piecewise linear instead of a cubic spline.
  bool linear = false;
};

/// Linear operator of the not-a-knot cubic spline through `knots` (strictly
/// increasing), evaluated at `queries`. Queries outside the knot range use the
/// nearest end piece. With fewer than four knots the spline is
/// underdetermined and piecewise linear interpolation is used instead; a
/// single knot yields a constant.
InterpolationOperator interpolation_operator(std::span<const double> knots, std::span<const double> queries);

}  // namespace trsr
