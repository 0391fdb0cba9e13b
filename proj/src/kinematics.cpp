#include "beamfrac/kinematics.hpp"

#include <cmath>

namespace beamfrac {

double MaterialSection::wave_speed() const { return std::sqrt(E / rho); }

MaterialSection make_section(double E, double rho, double R) {
  if (!(E > 0.0) || !(rho > 0.0) || !(R > 0.0)) {
    throw std::invalid_argument("make_section: E, rho, R must be positive");
  }
  MaterialSection s;
  s.E = E;
  s.rho = rho;
  s.R = R;
  s.A = M_PI * R * R;
  s.I = 0.25 * M_PI * R * R * R * R;
  return s;
}

LocalKinematics interpolate(const ElementDofs& e, double xi, double floor) {
  const ShapeEval sh = shape_functions(xi, e.L);

  LocalKinematics k;
  k.r.setZero();
  k.r1.setZero();
  k.r2.setZero();
  k.r3.setZero();
  for (int a = 0; a < 4; ++a) {
    const Vec3& x = e.slot(a);
    k.r += sh.dof_value(a) * x;
    k.r1 += sh.dof_d1(a) * x;
    k.r2 += sh.dof_d2(a) * x;
    k.r3 += sh.dof_d3(a) * x;
  }

  k.norm_r1 = k.r1.norm();
  if (!(k.norm_r1 > floor)) {
    throw DegenerateElementError("interpolate: |r'| below degeneracy floor");
  }
  const double n = k.norm_r1;
  const double n2 = n * n;
  const double n4 = n2 * n2;
  const double n6 = n4 * n2;

  k.eps = n - 1.0;
  k.g1 = k.r1 / n;
  k.kappa = k.r1.cross(k.r2) / n2;

  const double pp = k.r1.dot(k.r2);   // r' . r''
  const double ppp = k.r1.dot(k.r3);  // r' . r'''
  const double cc = k.r2.dot(k.r2);   // r'' . r''

  k.t1 = k.g1 * k.eps;
  k.t2 = 2.0 * k.r1 * (pp * pp) / n6 - (k.r1 * cc + k.r2 * pp) / n4;
  k.t3 = k.r2 / n2 - k.r1 * pp / n4;
  k.t4 = k.r1 / n2;
  k.t6 = 2.0 * k.r2 * pp / n4 + k.r1 * ppp / n4 -
         (2.0 * k.r1 * (pp * pp) / n6 + k.r3 / n2);
  k.G1 = Mat3::Identity() / n - (k.r1 * k.r1.transpose()) / (n2 * n);
  return k;
}

Vec3 axial_force(const LocalKinematics& k, const MaterialSection& sec) {
  return sec.EA() * k.t1;
}

Vec3 bending_moment(const LocalKinematics& k, const MaterialSection& sec) {
  return sec.EI() * k.kappa;
}

Vec3 internal_force_vector(const LocalKinematics& k, const MaterialSection& sec,
                           const Vec3& m_dist) {
  return sec.EA() * k.t1 + sec.EI() * k.t6 + k.t4.cross(m_dist);
}

KinematicGradients kinematic_gradients(const LocalKinematics& k,
                                       const MaterialSection& sec) {
  const Vec3& r1 = k.r1;
  const Vec3& r2 = k.r2;
  const Vec3& r3 = k.r3;
  const double n = k.norm_r1;
  const double n2 = n * n;
  const double n3 = n2 * n;
  const double n4 = n2 * n2;
  const double n6 = n4 * n2;
  const double n8 = n4 * n4;
  const double pp = r1.dot(r2);
  const double ppp = r1.dot(r3);
  const double cc = r2.dot(r2);
  const Mat3 Id = Mat3::Identity();
  const Mat3 r1r1 = r1 * r1.transpose();
  const Mat3 r1r2 = r1 * r2.transpose();
  const Mat3 r2r1 = r2 * r1.transpose();
  const Mat3 r2r2 = r2 * r2.transpose();

  KinematicGradients g;

  g.t1_d1 = ((n - 1.0) / n) * Id + r1r1 / n3;

  g.t2_d1 = (2.0 * pp * pp / n6 - cc / n4) * Id +
            (4.0 * cc / n6 - 12.0 * pp * pp / n8) * r1r1 +
            (4.0 * pp / n6) * r1r2 + (4.0 * pp / n6) * r2r1 - r2r2 / n4;
  g.t2_d2 = -(pp / n4) * Id + (4.0 * pp / n6) * r1r1 - (2.0 / n4) * r1r2 -
            r2r1 / n4;

  g.t3_d1 = -(pp / n4) * Id + (4.0 * pp / n6) * r1r1 - (2.0 / n4) * r2r1 -
            r1r2 / n4;
  g.t3_d2 = Id / n2 - r1r1 / n4;

  g.t4_d1 = Id / n2 - 2.0 * r1r1 / n4;

  g.t6_d1 = (ppp / n4 - 2.0 * pp * pp / n6) * Id +
            (12.0 * pp * pp / n8 - 4.0 * ppp / n6) * r1r1 -
            (4.0 * pp / n6) * r1r2 - (8.0 * pp / n6) * r2r1 +
            (2.0 / n4) * r2r2 + (r1 * r3.transpose()) / n4 +
            2.0 * (r3 * r1.transpose()) / n4;
  g.t6_d2 = (2.0 * pp / n4) * Id - (4.0 * pp / n6) * r1r1 +
            (2.0 / n4) * r2r1;
  g.t6_d3 = -Id / n2 + r1r1 / n4;

  g.g1_d1 = k.G1;

  // m_perp = EI r' x r'' / n^2:  d(m)/dx_b = EI [-S(r'') dt4 N_b' + S(t4) N_b'']
  g.m_d1 = sec.EI() * (-skew(r2) * g.t4_d1);
  g.m_d2 = sec.EI() * skew(k.t4);

  return g;
}

}  // namespace beamfrac
