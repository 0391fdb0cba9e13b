#include "beamfrac/shape.hpp"

namespace beamfrac {

// Basis on [-1, 1] in slot order {p1, t1, p2, t2}:
//   N_p1 = (2 + xi)(1 - xi)^2 / 4      N_p2 = (2 - xi)(1 + xi)^2 / 4
//   N_t1 = (1 + xi)(1 - xi)^2 / 4      N_t2 = -(1 - xi)(1 + xi)^2 / 4
// Position functions are 1 at their own node with zero parametric slope;
// tangent functions vanish at both nodes and (L/2) N_t has unit arc-length
// slope at its own node.
ShapeEval shape_functions(double xi, double L) {
  if (!(L > 0.0)) {
    throw std::invalid_argument("shape_functions: element length must be positive");
  }
  if (!(xi >= -1.0 && xi <= 1.0)) {
    throw std::domain_error("shape_functions: xi outside [-1, 1]");
  }

  ShapeEval sh;
  sh.length = L;
  const double om = 1.0 - xi;  // one minus
  const double op = 1.0 + xi;  // one plus

  sh.value[kP1] = 0.25 * (2.0 + xi) * om * om;
  sh.value[kT1] = 0.25 * op * om * om;
  sh.value[kP2] = 0.25 * (2.0 - xi) * op * op;
  sh.value[kT2] = -0.25 * om * op * op;

  sh.d1[kP1] = -0.75 * om * op;
  sh.d1[kT1] = 0.25 * om * (om - 2.0 * op);
  sh.d1[kP2] = 0.75 * om * op;
  sh.d1[kT2] = 0.25 * op * (op - 2.0 * om);

  sh.d2[kP1] = 1.5 * xi;
  sh.d2[kT1] = 0.5 * (3.0 * xi - 1.0);
  sh.d2[kP2] = -1.5 * xi;
  sh.d2[kT2] = 0.5 * (3.0 * xi + 1.0);

  sh.d3[kP1] = 1.5;
  sh.d3[kT1] = 1.5;
  sh.d3[kP2] = -1.5;
  sh.d3[kT2] = 1.5;

  return sh;
}

}  // namespace beamfrac
