#include <cmath>

#include "beamfrac/assembly.hpp"

namespace beamfrac {

namespace {

using Mat12 = Eigen::Matrix<double, 12, 12>;

// --------------------------------------------------------------------------
// Bulk tangent of one element (12x12, slot-major 3-vector blocks).
// --------------------------------------------------------------------------
Mat12 element_bulk_stiffness(const Problem& pb, const ElementDofs& el) {
  Mat12 K = Mat12::Zero();
  const double EA = pb.section.EA();
  const double EI = pb.section.EI();
  for (int g = 0; g < GaussRule::n; ++g) {
    const ShapeEval sh = shape_functions(GaussRule::xi[g], el.L);
    const LocalKinematics k =
        interpolate(el, GaussRule::xi[g], pb.degeneracy_floor);
    const KinematicGradients gr = kinematic_gradients(k, pb.section);
    const double w = GaussRule::w[g] * 0.5 * el.L;
    const Mat3 R11 = EA * gr.t1_d1 + EI * gr.t2_d1;  // pairs N_a' x N_b'
    const Mat3& R21 = gr.t3_d1;                      // N_a'' x N_b' (times EI)
    const Mat3& R12 = gr.t2_d2;                      // N_a' x N_b'' (times EI)
    const Mat3& R22 = gr.t3_d2;                      // N_a'' x N_b''
    for (int a = 0; a < 4; ++a) {
      const double a1 = sh.dof_d1(a);
      const double a2 = sh.dof_d2(a);
      for (int b = 0; b < 4; ++b) {
        const double b1 = sh.dof_d1(b);
        const double b2 = sh.dof_d2(b);
        K.block<3, 3>(3 * a, 3 * b) +=
            w * ((a1 * R11 + a2 * EI * R21) * b1 +
                 (a1 * R12 + a2 * R22) * EI * b2);
      }
    }
  }
  return K;
}

// --------------------------------------------------------------------------
// Interface tangent. Rows: 12 scalars on (minus node, plus node) x
// (pos, tan). Columns: 24 scalars over both adjacent elements' DOFs.
// --------------------------------------------------------------------------
using MatIface = Eigen::Matrix<double, 12, 24>;

// d(G1 * w)/d r' contracted with a fixed vector w, at side kinematics k.
Mat3 dG1_contraction(const LocalKinematics& k, const Vec3& w) {
  const double n = k.norm_r1;
  const double n3 = n * n * n;
  const double n5 = n3 * n * n;
  const double rw = k.r1.dot(w);
  return -(w * k.r1.transpose()) / n3 - (rw / n3) * Mat3::Identity() -
         (k.r1 * w.transpose()) / n3 +
         (3.0 * rw / n5) * (k.r1 * k.r1.transpose());
}

MatIface interface_stiffness_intact(const Problem& pb, const InterfaceEval& ev,
                                    double wp, double wt, double t, int iface) {
  MatIface K = MatIface::Zero();
  const LocalKinematics* side[2] = {&ev.minus, &ev.plus};
  const double sgn[2] = {-1.0, 1.0};
  const double end_xi[2] = {1.0, -1.0};

  Vec3 m_dist = Vec3::Zero();
  if (pb.loads.distributed_moment) {
    m_dist = pb.loads.distributed_moment(pb.mesh.interface_s(iface), t);
  }
  const Mat3 skew_md = skew(m_dist);
  const double EA = pb.section.EA();
  const double EI = pb.section.EI();

  KinematicGradients gr[2];
  ShapeEval sh[2];
  for (int s = 0; s < 2; ++s) {
    gr[s] = kinematic_gradients(*side[s], pb.section);
    sh[s] = shape_functions(end_xi[s],
                            pb.mesh.element_length[iface + s]);
  }
  const Mat3 skew_mm = skew(ev.mean_m);

  for (int A = 0; A < 2; ++A) {
    const Mat3 skew_t4A = skew(side[A]->t4);
    const Mat3 DA = dG1_contraction(*side[A], ev.theta);
    for (int B = 0; B < 2; ++B) {
      for (int b = 0; b < 4; ++b) {
        const double c0 = sh[B].dof_value(b);
        const double c1 = sh[B].dof_d1(b);
        const double c2 = sh[B].dof_d2(b);
        const double c3 = sh[B].dof_d3(b);

        // d<f>/dx_b: half of side B's full-force linearization.
        Mat3 dF = 0.5 * (EA * gr[B].t1_d1 * c1 +
                         EI * (gr[B].t6_d1 * c1 + gr[B].t6_d2 * c2 +
                               gr[B].t6_d3 * c3) -
                         skew_md * gr[B].t4_d1 * c1);
        // Position penalty couples only the two interface-node positions.
        dF += (wp * sgn[B] * c0) * Mat3::Identity();
        K.block<3, 3>(6 * A, 3 * (4 * B + b)) = sgn[A] * dF;

        // Tangent row: moment consistency + tangent penalty.
        Mat3 dM = -skew_t4A * 0.5 * (gr[B].m_d1 * c1 + gr[B].m_d2 * c2);
        Mat3 dT5 = sgn[B] * side[A]->G1 * side[B]->G1 * c1;
        if (A == B) {
          dM += skew_mm * gr[A].t4_d1 * c1;
          dT5 += DA * c1;
        }
        K.block<3, 3>(6 * A + 3, 3 * (4 * B + b)) =
            sgn[A] * (dM + wt * dT5);
      }
    }
  }
  return K;
}

// Local central-difference tangent of the interface force block; used for
// every interface past initiation, where the branch structure makes the
// closed form unwieldy. The state is frozen (copied) during probing.
MatIface interface_stiffness_fd(const Problem& pb, const VecX& x,
                                const InterfaceState& st, int iface, double wp,
                                double wt, double t) {
  MatIface K = MatIface::Zero();
  VecX xp = x;
  const int d0 = pb.mesh.elem_dof0(iface);
  auto force12 = [&](const VecX& xs) {
    InterfaceState probe = st;
    const InterfaceEval ev = eval_interface(pb, xs, iface, &probe, t);
    Eigen::Matrix<double, 12, 1> f;
    const InterfaceForce blk = interface_force_blocks(pb, ev, st, wp, wt);
    f.segment<3>(0) = blk.pos[0];
    f.segment<3>(3) = blk.tan[0];
    f.segment<3>(6) = blk.pos[1];
    f.segment<3>(9) = blk.tan[1];
    return f;
  };
  for (int c = 0; c < 24; ++c) {
    const int gdof = d0 + c;
    const double h = 1e-7 * std::max(1.0, std::abs(x[gdof]));
    xp[gdof] = x[gdof] + h;
    const auto fp = force12(xp);
    xp[gdof] = x[gdof] - h;
    const auto fm = force12(xp);
    xp[gdof] = x[gdof];
    K.col(c) = (fp - fm) / (2.0 * h);
  }
  return K;
}

}  // namespace

SpMat assemble_stiffness(const Problem& pb, const VecX& x,
                         std::vector<InterfaceState>& states, double t) {
  const BeamMesh& mesh = pb.mesh;
  std::vector<Triplet> trip;
  trip.reserve(mesh.element_count * 144 + mesh.interface_count() * 288);

  // Bulk blocks.
  for (int e = 0; e < mesh.element_count; ++e) {
    const ElementDofs el = gather_element(mesh, x, e);
    Mat12 K = element_bulk_stiffness(pb, el);

    // Distributed external moments contribute a configuration tangent that
    // is subtracted from the system matrix.
    if (pb.loads.distributed_moment) {
      const double s0 = mesh.node_s[mesh.left_node(e)];
      for (int g = 0; g < GaussRule::n; ++g) {
        const double xi = GaussRule::xi[g];
        const ShapeEval sh = shape_functions(xi, el.L);
        const LocalKinematics k = interpolate(el, xi, pb.degeneracy_floor);
        const KinematicGradients gr = kinematic_gradients(k, pb.section);
        const double s = s0 + 0.5 * el.L * (1.0 + xi);
        const Mat3 sm = skew(pb.loads.distributed_moment(s, t));
        const double w = GaussRule::w[g] * 0.5 * el.L;
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            K.block<3, 3>(3 * a, 3 * b) -=
                w * sh.dof_d1(a) * (sm * gr.t4_d1) * sh.dof_d1(b);
          }
        }
      }
    }

    const int d0 = mesh.elem_dof0(e);
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        if (K(i, j) != 0.0) trip.emplace_back(d0 + i, d0 + j, K(i, j));
      }
    }
  }

  // Interface blocks.
  for (int i = 0; i < mesh.interface_count(); ++i) {
    double wp, wt;
    interface_penalty_weights(pb, i, wp, wt);
    MatIface K;
    if (states[i].alpha_intact) {
      const InterfaceEval ev = eval_interface(pb, x, i, &states[i], t);
      K = interface_stiffness_intact(pb, ev, wp, wt, t, i);
    } else {
      K = interface_stiffness_fd(pb, x, states[i], i, wp, wt, t);
    }
    const int rows[4] = {
        mesh.pos_dof(mesh.minus_node(i), 0), mesh.tan_dof(mesh.minus_node(i), 0),
        mesh.pos_dof(mesh.plus_node(i), 0), mesh.tan_dof(mesh.plus_node(i), 0)};
    const int c0 = mesh.elem_dof0(i);
    for (int rblk = 0; rblk < 4; ++rblk) {
      for (int rd = 0; rd < 3; ++rd) {
        for (int c = 0; c < 24; ++c) {
          const double v = K(3 * rblk + rd, c);
          if (v != 0.0) trip.emplace_back(rows[rblk] + rd, c0 + c, v);
        }
      }
    }
  }

  // Boundary external moments: subtract the follower tangent.
  for (int side = 0; side < 2; ++side) {
    if (!pb.loads.end_moment[side]) continue;
    const int elem = side == 0 ? 0 : mesh.element_count - 1;
    const int node = side == 0 ? mesh.left_node(0) : mesh.right_node(elem);
    const double xi = side == 0 ? -1.0 : 1.0;
    const ElementDofs el = gather_element(mesh, x, elem);
    const ShapeEval sh = shape_functions(xi, el.L);
    const LocalKinematics k = interpolate(el, xi, pb.degeneracy_floor);
    const KinematicGradients gr = kinematic_gradients(k, pb.section);
    const Mat3 sm = skew(pb.loads.end_moment[side](t));
    const int d0 = mesh.elem_dof0(elem);
    for (int b = 0; b < 4; ++b) {
      const Mat3 blk = -(sm * gr.t4_d1) * sh.dof_d1(b);
      for (int rd = 0; rd < 3; ++rd) {
        for (int cd = 0; cd < 3; ++cd) {
          if (blk(rd, cd) != 0.0) {
            trip.emplace_back(mesh.tan_dof(node, rd), d0 + 3 * b + cd,
                              blk(rd, cd));
          }
        }
      }
    }
  }

  SpMat K(mesh.dof_count(), mesh.dof_count());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

}  // namespace beamfrac
