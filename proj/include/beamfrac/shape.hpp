#pragma once

#include "beamfrac/types.hpp"

namespace beamfrac {

/// Slot order of the four Hermite shape functions and of element DOF blocks:
/// [position node 1, tangent node 1, position node 2, tangent node 2].
enum Slot : int { kP1 = 0, kT1 = 1, kP2 = 2, kT2 = 3 };

inline bool is_tangent_slot(int a) { return a == kT1 || a == kT2; }

/// Hermite cubic shape functions on the bi-unit interval evaluated at xi.
///
/// `value`/`d1`/`d2`/`d3` hold the raw functions and their parametric
/// (d/dxi) derivatives in slot order. The tangent-slot functions interpolate
/// with an extra length factor L/2 (the element map is s = (L/2)(1+xi));
/// the dof_* accessors fold in that factor plus the chain rule d/ds =
/// (2/L) d/dxi, so that r^(k)(s) = sum_a dof_dk(a) * x_a.
struct ShapeEval {
  std::array<double, 4> value;
  std::array<double, 4> d1;
  std::array<double, 4> d2;
  std::array<double, 4> d3;
  double length;

  double dof_value(int a) const { return scale(a) * value[a]; }
  double dof_d1(int a) const { return scale(a) * d1[a] * (2.0 / length); }
  double dof_d2(int a) const {
    const double c = 2.0 / length;
    return scale(a) * d2[a] * c * c;
  }
  double dof_d3(int a) const {
    const double c = 2.0 / length;
    return scale(a) * d3[a] * c * c * c;
  }

 private:
  double scale(int a) const { return is_tangent_slot(a) ? 0.5 * length : 1.0; }
};

/// Evaluates the Hermite basis at xi in [-1, 1] for an element of reference
/// length L. Throws std::domain_error outside the interval and
/// std::invalid_argument for a non-positive length.
ShapeEval shape_functions(double xi, double L);

}  // namespace beamfrac
