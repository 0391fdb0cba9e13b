#include <cmath>
#include <random>
#include <vector>

#include "beamfrac/assembly.hpp"
#include "doctest.h"

using namespace beamfrac;

namespace {

Problem make_problem(int elements, bool with_cohesive, double L = 1.0) {
  Problem pb;
  pb.mesh = uniform_mesh(L, elements);
  pb.section = make_section(10e9, 2000.0, 0.02);
  pb.penalties = {10.0, 10.0};
  if (with_cohesive) {
    pb.cohesive = make_cohesive_params(50e6, 200.0, 1.0, pb.section);
  }
  return pb;
}

VecX stretched_state(const Problem& pb, double lambda) {
  VecX x = reference_state(pb.mesh);
  for (int n = 0; n < pb.mesh.node_count(); ++n) {
    x[pb.mesh.pos_dof(n, 0)] *= lambda;
    x[pb.mesh.tan_dof(n, 0)] = lambda;
  }
  return x;
}

// Exact data of a circular arc of curvature kappa in the xy plane.
VecX arc_state(const Problem& pb, double kappa) {
  VecX x = VecX::Zero(pb.mesh.dof_count());
  const double a = 1.0 / kappa;
  for (int n = 0; n < pb.mesh.node_count(); ++n) {
    const double s = pb.mesh.node_s[n];
    const Vec3 p(a * std::sin(s * kappa), a * (1.0 - std::cos(s * kappa)), 0.0);
    const Vec3 t(std::cos(s * kappa), std::sin(s * kappa), 0.0);
    for (int d = 0; d < 3; ++d) {
      x[pb.mesh.pos_dof(n, d)] = p[d];
      x[pb.mesh.tan_dof(n, d)] = t[d];
    }
  }
  return x;
}

// Smooth non-trivial deformation for objectivity probes.
VecX wavy_state(const Problem& pb, double amp) {
  VecX x = reference_state(pb.mesh);
  const double L = pb.mesh.total_length;
  for (int n = 0; n < pb.mesh.node_count(); ++n) {
    const double s = pb.mesh.node_s[n];
    const double c = 2.0 * M_PI / L;
    x[pb.mesh.pos_dof(n, 1)] += amp * std::sin(c * s);
    x[pb.mesh.pos_dof(n, 2)] += 0.5 * amp * std::sin(2.0 * c * s);
    x[pb.mesh.tan_dof(n, 1)] += amp * c * std::cos(c * s);
    x[pb.mesh.tan_dof(n, 2)] += amp * c * std::cos(2.0 * c * s);
  }
  return x;
}

VecX rigid_transform(const Problem& pb, const VecX& x, const Mat3& Q,
                     const Vec3& c) {
  VecX y = x;
  for (int n = 0; n < pb.mesh.node_count(); ++n) {
    Vec3 p, t;
    for (int d = 0; d < 3; ++d) {
      p[d] = x[pb.mesh.pos_dof(n, d)];
      t[d] = x[pb.mesh.tan_dof(n, d)];
    }
    const Vec3 pr = Q * p + c;
    const Vec3 tr = Q * t;
    for (int d = 0; d < 3; ++d) {
      y[pb.mesh.pos_dof(n, d)] = pr[d];
      y[pb.mesh.tan_dof(n, d)] = tr[d];
    }
  }
  return y;
}

Mat3 rotation(double angle, const Vec3& axis) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace

TEST_CASE("rigid motions of the reference produce zero residual") {
  for (bool cohesive : {false, true}) {
    Problem pb = make_problem(5, cohesive);
    std::vector<InterfaceState> states = pb.make_interface_states();
    const VecX x0 = reference_state(pb.mesh);
    const VecX xr =
        rigid_transform(pb, x0, rotation(0.7, Vec3(1.0, 2.0, -1.0)),
                        Vec3(0.3, -0.2, 0.9));
    const VecX r = assemble_residual(pb, xr, states, 0.0);
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-9 * pb.section.EA());
  }
}

TEST_CASE("uniform stretch patch test across DG interfaces") {
  Problem pb = make_problem(6, false);
  std::vector<InterfaceState> states = pb.make_interface_states();
  const double eps = 2e-3;
  const VecX x = stretched_state(pb, 1.0 + eps);
  const VecX r = assemble_residual(pb, x, states, 0.0);
  const double fN = pb.section.EA() * eps;
  const int last = pb.mesh.node_count() - 1;
  for (int i = 0; i < r.size(); ++i) {
    double expect = 0.0;
    if (i == pb.mesh.pos_dof(0, 0)) expect = -fN;
    if (i == pb.mesh.pos_dof(last, 0)) expect = fN;
    CHECK(std::abs(r[i] - expect) < 1e-9 * fN);
  }
}

TEST_CASE("interface forces transform objectively under rigid motions") {
  Problem pb = make_problem(4, true);
  const VecX x = wavy_state(pb, 0.05);
  const Mat3 Q = rotation(1.1, Vec3(0.2, 1.0, 0.5));
  const Vec3 c(2.0, -1.0, 0.4);
  const VecX xr = rigid_transform(pb, x, Q, c);

  std::vector<InterfaceState> sa = pb.make_interface_states();
  std::vector<InterfaceState> sb = pb.make_interface_states();
  const VecX fb = assemble_internal_bulk(pb, x) +
                  assemble_interface_forces(pb, x, sa, 0.0);
  const VecX fr = assemble_internal_bulk(pb, xr) +
                  assemble_interface_forces(pb, xr, sb, 0.0);
  const VecX frot =
      rigid_transform(pb, fb, Q, Vec3::Zero());  // forces rotate, not shift
  CHECK((fr - frot).lpNorm<Eigen::Infinity>() <
        1e-9 * std::max(1.0, fb.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("interface force blocks are equal and opposite on positions") {
  Problem pb = make_problem(4, true);
  VecX x = wavy_state(pb, 0.04);
  std::vector<InterfaceState> states = pb.make_interface_states();
  double wp, wt;
  interface_penalty_weights(pb, 1, wp, wt);
  CHECK(wp == doctest::Approx(pb.penalties.beta_p * pb.section.EA() /
                              pb.mesh.element_length[1]));
  CHECK(wt == doctest::Approx(pb.penalties.beta_t * pb.section.EI() /
                              pb.mesh.element_length[1]));

  SUBCASE("intact branch") {
    const InterfaceEval ev = eval_interface(pb, x, 1, &states[1], 0.0);
    const InterfaceForce f = interface_force_blocks(pb, ev, states[1], wp, wt);
    CHECK((f.pos[0] + f.pos[1]).norm() < 1e-12 * std::max(1.0, f.pos[0].norm()));
    CHECK(f.pos[0].norm() > 0.0);
  }

  SUBCASE("cohesive branch with a real opening") {
    // Open interface 1 by shifting everything right of it along the axis.
    const double gap = 0.3 * pb.cohesive->Delta_c;
    for (int n = pb.mesh.plus_node(1); n < pb.mesh.node_count(); ++n) {
      x[pb.mesh.pos_dof(n, 0)] += gap;
    }
    InterfaceState& st = states[1];
    st.alpha_intact = false;
    st.delta_max = 0.5 * pb.cohesive->Delta_c;
    st.f_max = 0.5 * pb.cohesive->f_c;
    const InterfaceEval ev = eval_interface(pb, x, 1, &st, 0.0);
    REQUIRE(ev.jumps.delta_par > 0.0);
    const InterfaceForce f = interface_force_blocks(pb, ev, st, wp, wt);
    CHECK((f.pos[0] + f.pos[1]).norm() < 1e-12 * std::max(1.0, f.pos[0].norm()));
    // The axial part follows the secant law at this opening.
    const CohesiveTractions ct =
        cohesive_tractions(ev.jumps, *pb.cohesive, pb.section.R, st);
    CHECK(ct.f_eff > 0.0);
    CHECK(f.pos[1].dot(ev.jumps.normal) > 0.0);  // plus side pulled back
  }
}

TEST_CASE("fully failed open interface contributes nothing") {
  Problem pb = make_problem(4, true);
  VecX x = reference_state(pb.mesh);
  const double gap = 3.0 * pb.cohesive->Delta_c;
  for (int n = pb.mesh.plus_node(1); n < pb.mesh.node_count(); ++n) {
    x[pb.mesh.pos_dof(n, 0)] += gap;
  }
  std::vector<InterfaceState> states = pb.make_interface_states();
  InterfaceState& st = states[1];
  st.alpha_intact = false;
  st.gamma_active = false;
  st.delta_max = 4.0 * pb.cohesive->Delta_c;
  st.f_max = 0.0;
  double wp, wt;
  interface_penalty_weights(pb, 1, wp, wt);
  const InterfaceEval ev = eval_interface(pb, x, 1, &st, 0.0);
  REQUIRE(ev.jumps.delta_par > 0.0);
  const InterfaceForce f = interface_force_blocks(pb, ev, st, wp, wt);
  for (int s = 0; s < 2; ++s) {
    CHECK(f.pos[s].norm() == doctest::Approx(0.0));
    CHECK(f.tan[s].norm() == doctest::Approx(0.0));
  }
  const EnergyReport en = assemble_energies(pb, x, states, 0.0);
  CHECK(en.penalty == doctest::Approx(0.0));
  CHECK(en.cohesive_stored == doctest::Approx(0.0));

  SUBCASE("closing the gap re-engages a compressive penalty force") {
    VecX xc = reference_state(pb.mesh);
    const double overlap = 1e-5;
    for (int n = pb.mesh.plus_node(1); n < pb.mesh.node_count(); ++n) {
      xc[pb.mesh.pos_dof(n, 0)] -= overlap;
    }
    const InterfaceEval evc = eval_interface(pb, xc, 1, &st, 0.0);
    REQUIRE(evc.jumps.delta_par < 0.0);
    const InterfaceForce fc = interface_force_blocks(pb, evc, st, wp, wt);
    // Residual convention: a negative plus-side entry drives the Newton /
    // dynamic update outward, undoing the overlap.
    CHECK(fc.pos[1].dot(evc.jumps.normal) < 0.0);
    CHECK(fc.pos[1].norm() == doctest::Approx(wp * overlap).epsilon(1e-9));
    const EnergyReport enc = assemble_energies(pb, xc, states, 0.0);
    CHECK(enc.penalty ==
          doctest::Approx(0.5 * wp * overlap * overlap).epsilon(1e-9));
  }
}

TEST_CASE("mass matrices conserve the total mass") {
  Problem pb = make_problem(5, false, 2.0);
  const double total = pb.section.rho * pb.section.A * pb.mesh.total_length;

  const SpMat M = assemble_mass(pb);
  VecX ux = VecX::Zero(pb.mesh.dof_count());
  for (int n = 0; n < pb.mesh.node_count(); ++n) {
    ux[pb.mesh.pos_dof(n, 0)] = 1.0;
  }
  CHECK(ux.dot(M * ux) == doctest::Approx(total).epsilon(1e-12));

  const VecX ml = lumped_mass(pb);
  CHECK(ml.minCoeff() > 0.0);
  CHECK(ux.dot(ml.cwiseProduct(ux)) == doctest::Approx(total).epsilon(1e-12));
  // Per element: position entries sum to rho A h_e (one axis).
  double first = 0.0;
  for (int n : {pb.mesh.left_node(0), pb.mesh.right_node(0)}) {
    first += ml[pb.mesh.pos_dof(n, 0)];
  }
  CHECK(first == doctest::Approx(pb.section.rho * pb.section.A *
                                 pb.mesh.element_length[0]));
}

TEST_CASE("strain energies of canonical states") {
  Problem pb = make_problem(8, false);
  std::vector<InterfaceState> states = pb.make_interface_states();

  SUBCASE("uniform stretch") {
    const double eps = 1e-3;
    const VecX x = stretched_state(pb, 1.0 + eps);
    const EnergyReport en = assemble_energies(pb, x, states, 0.0);
    const double expect =
        0.5 * pb.section.EA() * eps * eps * pb.mesh.total_length;
    CHECK(en.elastic == doctest::Approx(expect).epsilon(1e-10));
    CHECK(en.penalty == doctest::Approx(0.0));
  }

  SUBCASE("circular arc bending") {
    const double kappa = 1.2;
    const VecX x = arc_state(pb, kappa);
    const EnergyReport en = assemble_energies(pb, x, states, 0.0);
    const double expect =
        0.5 * pb.section.EI() * kappa * kappa * pb.mesh.total_length;
    // Hermite sampling of the circle is inexact; the energy converges fast.
    CHECK(en.elastic == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("external force vector shapes") {
  Problem pb = make_problem(4, false);
  const VecX x = reference_state(pb.mesh);
  const int last = pb.mesh.node_count() - 1;

  SUBCASE("end moment touches only the loaded end's tangent slots") {
    pb.loads.end_moment[1] = [](double) { return Vec3(0.0, 0.0, 2.5); };
    const VecX f = assemble_external(pb, x, 0.0);
    for (int i = 0; i < f.size(); ++i) {
      const bool allowed = i >= pb.mesh.tan_dof(last, 0);
      if (!allowed) CHECK(f[i] == doctest::Approx(0.0));
    }
    CHECK(f.segment(pb.mesh.tan_dof(last, 0), 3).norm() > 0.0);
  }

  SUBCASE("point force enters one position block") {
    pb.loads.point_forces.push_back(
        {3, [](double) { return Vec3(0.0, 4.0, 0.0); }});
    const VecX f = assemble_external(pb, x, 0.0);
    CHECK(f[pb.mesh.pos_dof(3, 1)] == doctest::Approx(4.0));
    CHECK(f.norm() == doctest::Approx(4.0));
  }

  SUBCASE("constant distributed force integrates to its resultant") {
    pb.loads.distributed_force = [](double, double) {
      return Vec3(0.0, 3.0, 0.0);
    };
    const VecX f = assemble_external(pb, x, 0.0);
    double total = 0.0;
    for (int n = 0; n < pb.mesh.node_count(); ++n) {
      total += f[pb.mesh.pos_dof(n, 1)];
    }
    CHECK(total == doctest::Approx(3.0 * pb.mesh.total_length));
  }
}

TEST_CASE("state updates fire on a stretched fracture-enabled beam") {
  Problem pb = make_problem(4, true);
  std::vector<InterfaceState> states = pb.make_interface_states();
  // Stretch just past the strength: EA eps > f_c.
  const double eps = 1.01 * pb.cohesive->f_c / pb.section.EA();
  const VecX x = stretched_state(pb, 1.0 + eps);
  update_interface_states(pb, x, states, 0.25);
  for (const InterfaceState& st : states) {
    CHECK_FALSE(st.alpha_intact);
    CHECK(st.initiation_time == doctest::Approx(0.25));
  }
  // Subcritical stretch leaves fresh states intact.
  std::vector<InterfaceState> fresh = pb.make_interface_states();
  const VecX x2 = stretched_state(pb, 1.0 + 0.9 * eps);
  update_interface_states(pb, x2, fresh, 0.5);
  for (const InterfaceState& st : fresh) CHECK(st.alpha_intact);
}

TEST_CASE("parallel_for covers the index range exactly once") {
  std::vector<int> hits(257, 0);
  parallel_for(257, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK(thread_count() >= 1);
}
