#pragma once

#include "beamfrac/shape.hpp"
#include "beamfrac/types.hpp"

namespace beamfrac {

/// Circular cross-section and elastic constants of a uniform beam.
struct MaterialSection {
  double E = 0.0;    // Young's modulus [Pa]
  double rho = 0.0;  // mass density [kg/m^3]
  double R = 0.0;    // cross-section radius [m]
  double A = 0.0;    // area pi R^2 [m^2]
  double I = 0.0;    // second moment pi R^4 / 4 [m^4]

  double EA() const { return E * A; }
  double EI() const { return E * I; }
  /// Longitudinal wave speed sqrt(E/rho).
  double wave_speed() const;
};

/// Builds a section from E, rho and R; validates positivity.
MaterialSection make_section(double E, double rho, double R);

/// Nodal unknowns of one element: end positions and end tangents.
struct ElementDofs {
  Vec3 p1, t1, p2, t2;
  double L = 0.0;  // reference length

  /// Gathers the slot (p1, t1, p2, t2) as a vector.
  const Vec3& slot(int a) const {
    switch (a) {
      case kP1: return p1;
      case kT1: return t1;
      case kP2: return p2;
      default: return t2;
    }
  }
};

/// Pointwise state of the centerline at one quadrature or interface point.
///
/// Primes denote arc-length derivatives of the interpolated curve. The
/// auxiliary vectors t1..t6 and the projector G1 are the building blocks of
/// the internal force density and the interface terms:
///   t1 = g1 * eps                     (axial strain times unit tangent)
///   t2, t3: bending force-density vectors conjugate to N' and N''
///   t4 = r' / |r'|^2
///   t6 = t4 x kappa'                  (shear force density / EI)
///   G1 = (I - g1 g1^T) / |r'|         (tangent-variation projector)
struct LocalKinematics {
  Vec3 r, r1, r2, r3;  // r and its first three arc-length derivatives
  double norm_r1 = 0.0;
  double eps = 0.0;  // |r'| - 1
  Vec3 g1;           // unit tangent
  Vec3 kappa;        // r' x r'' / |r'|^2
  Vec3 t1, t2, t3, t4, t6;
  Mat3 G1;
};

/// Interpolates the element state at xi. Throws DegenerateElementError when
/// |r'| falls below `floor` (dimensionless; r' is a stretch ratio near 1).
LocalKinematics interpolate(const ElementDofs& e, double xi,
                            double floor = 1e-12);

/// Axial force resultant EA eps g1.
Vec3 axial_force(const LocalKinematics& k, const MaterialSection& sec);

/// Bending moment resultant EI kappa (always orthogonal to r').
Vec3 bending_moment(const LocalKinematics& k, const MaterialSection& sec);

/// Full internal force vector at a point: EA t1 + EI t6 + t4 x m_dist, where
/// m_dist is the distributed moment at that point (zero in most cases).
Vec3 internal_force_vector(const LocalKinematics& k, const MaterialSection& sec,
                           const Vec3& m_dist = Vec3::Zero());

/// Directional-derivative blocks of the auxiliary vectors with respect to the
/// element DOFs. Each pairs with a shape-function derivative order: the
/// derivative of v with respect to DOF slot b is
///   dv/dx_b = d1 * dof_d1(b) + d2 * dof_d2(b) + d3 * dof_d3(b).
struct KinematicGradients {
  Mat3 t1_d1;
  Mat3 t2_d1, t2_d2;
  Mat3 t3_d1, t3_d2;
  Mat3 t4_d1;
  Mat3 t6_d1, t6_d2, t6_d3;
  Mat3 g1_d1;        // = G1
  Mat3 m_d1, m_d2;   // bending moment EI kappa
};

/// Evaluates all gradient blocks at the given point state.
KinematicGradients kinematic_gradients(const LocalKinematics& k,
                                       const MaterialSection& sec);

}  // namespace beamfrac
