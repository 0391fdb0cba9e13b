#include "beamfrac/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace beamfrac {

// ===========================================================================
// Parallel helpers
// ===========================================================================

int thread_count() {
  static const int n = [] {
    const char* env = std::getenv("BEAMFRAC_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return std::clamp(v, 1, 64);
  }();
  return n;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &error, &error_mutex] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ===========================================================================
// Interface evaluation
// ===========================================================================

void interface_penalty_weights(const Problem& pb, int iface, double& wp,
                               double& wt) {
  const double hl = pb.mesh.element_length[iface];
  const double hr = pb.mesh.element_length[iface + 1];
  wp = pb.penalties.beta_p * 0.5 * (pb.section.EA() / hl + pb.section.EA() / hr);
  wt = pb.penalties.beta_t * 0.5 * (pb.section.EI() / hl + pb.section.EI() / hr);
}

InterfaceEval eval_interface(const Problem& pb, const VecX& x, int iface,
                             InterfaceState* state, double t) {
  InterfaceEval ev;
  const ElementDofs el = gather_element(pb.mesh, x, iface);
  const ElementDofs er = gather_element(pb.mesh, x, iface + 1);
  ev.minus = interpolate(el, 1.0, pb.degeneracy_floor);
  ev.plus = interpolate(er, -1.0, pb.degeneracy_floor);

  ev.jump_r = ev.plus.r - ev.minus.r;
  ev.theta = ev.plus.g1 - ev.minus.g1;

  Vec3 m_dist = Vec3::Zero();
  if (pb.loads.distributed_moment) {
    m_dist = pb.loads.distributed_moment(pb.mesh.interface_s(iface), t);
  }
  ev.mean_f = 0.5 * (internal_force_vector(ev.minus, pb.section, m_dist) +
                     internal_force_vector(ev.plus, pb.section, m_dist));
  ev.mean_m = 0.5 * (bending_moment(ev.minus, pb.section) +
                     bending_moment(ev.plus, pb.section));

  if (pb.cohesive && state) {
    ev.jumps =
        compute_jumps(ev.minus, ev.plus, *pb.cohesive, pb.section.R, *state);
    ev.has_cohesive_jumps = true;
  }
  return ev;
}

// ===========================================================================
// Mass
// ===========================================================================

namespace {

// Scalar element mass in slot order, with the L/2 tangent scaling folded in
// (equals the classical Hermite beam consistent mass).
Eigen::Matrix4d element_mass_scalar(double rho, double A, double L) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int g = 0; g < GaussRule::n; ++g) {
    ShapeEval sh = shape_functions(GaussRule::xi[g], L);
    const double w = GaussRule::w[g] * 0.5 * L * rho * A;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        m(a, b) += w * sh.dof_value(a) * sh.dof_value(b);
      }
    }
  }
  return m;
}

}  // namespace

SpMat assemble_mass(const Problem& pb) {
  const BeamMesh& mesh = pb.mesh;
  std::vector<Triplet> trip;
  trip.reserve(mesh.element_count * 48);
  for (int e = 0; e < mesh.element_count; ++e) {
    const Eigen::Matrix4d m = element_mass_scalar(
        pb.section.rho, pb.section.A, mesh.element_length[e]);
    const int d0 = mesh.elem_dof0(e);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        for (int d = 0; d < 3; ++d) {
          trip.emplace_back(d0 + 3 * a + d, d0 + 3 * b + d, m(a, b));
        }
      }
    }
  }
  SpMat M(mesh.dof_count(), mesh.dof_count());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

VecX lumped_mass(const Problem& pb) {
  const BeamMesh& mesh = pb.mesh;
  VecX d = VecX::Zero(mesh.dof_count());
  for (int e = 0; e < mesh.element_count; ++e) {
    const double L = mesh.element_length[e];
    const Eigen::Matrix4d m =
        element_mass_scalar(pb.section.rho, pb.section.A, L);
    const double total = pb.section.rho * pb.section.A * L;
    const double scale = total / (m(kP1, kP1) + m(kP2, kP2));
    const int d0 = mesh.elem_dof0(e);
    for (int a = 0; a < 4; ++a) {
      for (int dim = 0; dim < 3; ++dim) {
        d[d0 + 3 * a + dim] += scale * m(a, a);
      }
    }
  }
  return d;
}

// ===========================================================================
// Internal bulk force
// ===========================================================================

VecX assemble_internal_bulk(const Problem& pb, const VecX& x) {
  const BeamMesh& mesh = pb.mesh;
  VecX f = VecX::Zero(mesh.dof_count());
  const double EA = pb.section.EA();
  const double EI = pb.section.EI();
  // Elements share no nodes, so every element writes disjoint slots.
  parallel_for(mesh.element_count, [&](int e) {
    const ElementDofs el = gather_element(mesh, x, e);
    const int d0 = mesh.elem_dof0(e);
    for (int g = 0; g < GaussRule::n; ++g) {
      const ShapeEval sh = shape_functions(GaussRule::xi[g], el.L);
      const LocalKinematics k = interpolate(el, GaussRule::xi[g],
                                            pb.degeneracy_floor);
      const double w = GaussRule::w[g] * 0.5 * el.L;
      const Vec3 fd1 = w * (EA * k.t1 + EI * k.t2);
      const Vec3 fd2 = w * EI * k.t3;
      for (int a = 0; a < 4; ++a) {
        const Vec3 fa = sh.dof_d1(a) * fd1 + sh.dof_d2(a) * fd2;
        for (int dim = 0; dim < 3; ++dim) f[d0 + 3 * a + dim] += fa[dim];
      }
    }
  });
  return f;
}

// ===========================================================================
// Interface forces
// ===========================================================================

InterfaceForce interface_force_blocks(const Problem& pb,
                                      const InterfaceEval& ev,
                                      const InterfaceState& st, double wp,
                                      double wt) {
  InterfaceForce out;
  const LocalKinematics* side[2] = {&ev.minus, &ev.plus};
  const double sign[2] = {-1.0, 1.0};

  if (st.alpha_intact) {
    const Vec3 fpos = ev.mean_f + wp * ev.jump_r;
    for (int s = 0; s < 2; ++s) {
      const Vec3 t5 = side[s]->G1 * ev.theta;
      out.pos[s] = sign[s] * fpos;
      out.tan[s] = sign[s] * (ev.mean_m.cross(side[s]->t4) + wt * t5);
    }
    return out;
  }

  // Post-initiation branch: cohesive tractions, perpendicular DG retention
  // while gamma is active, unilateral axial penalty on recontact.
  const InterfaceJumps& j = ev.jumps;
  const Vec3& n = j.normal;
  const Vec3 f_par = ev.mean_f.dot(n) * n;
  const Vec3 f_perp = ev.mean_f - f_par;
  const Vec3 c_par = j.delta_par * n;
  const Vec3 c_perp = ev.jump_r - c_par;
  const CohesiveTractions ct =
      cohesive_tractions(j, *pb.cohesive, pb.section.R, st);

  Vec3 fpos = ct.f_par;
  if (st.gamma_active) fpos += f_perp + wp * c_perp;
  // Recontact transmits compression through the position penalty alone,
  // gated by the live overlap: the force is continuous at grazing contact,
  // while a force gated by the end-of-step flag lags the crossing by one
  // step and pumps energy through contact chatter.
  if (st.delta_max > 0.0 && j.delta_par < 0.0) fpos += wp * c_par;
  for (int s = 0; s < 2; ++s) {
    out.pos[s] = sign[s] * fpos;
    out.tan[s] = sign[s] * (side[s]->G1 * ct.m_perp);
  }
  return out;
}

VecX assemble_interface_forces(const Problem& pb, const VecX& x,
                               std::vector<InterfaceState>& states, double t) {
  const BeamMesh& mesh = pb.mesh;
  VecX f = VecX::Zero(mesh.dof_count());
  // Each interface writes only its own two duplicated nodes.
  parallel_for(mesh.interface_count(), [&](int i) {
    InterfaceEval ev = eval_interface(pb, x, i, &states[i], t);
    double wp, wt;
    interface_penalty_weights(pb, i, wp, wt);
    const InterfaceForce blk =
        interface_force_blocks(pb, ev, states[i], wp, wt);
    const int nd[2] = {mesh.minus_node(i), mesh.plus_node(i)};
    for (int s = 0; s < 2; ++s) {
      for (int dim = 0; dim < 3; ++dim) {
        f[mesh.pos_dof(nd[s], dim)] += blk.pos[s][dim];
        f[mesh.tan_dof(nd[s], dim)] += blk.tan[s][dim];
      }
    }
  });
  return f;
}

// ===========================================================================
// External force
// ===========================================================================

VecX assemble_external(const Problem& pb, const VecX& x, double t) {
  const BeamMesh& mesh = pb.mesh;
  const LoadSpec& lo = pb.loads;
  VecX f = VecX::Zero(mesh.dof_count());

  if (lo.distributed_force || lo.distributed_moment) {
    for (int e = 0; e < mesh.element_count; ++e) {
      const ElementDofs el = gather_element(mesh, x, e);
      const int d0 = mesh.elem_dof0(e);
      const double s0 = mesh.node_s[mesh.left_node(e)];
      for (int g = 0; g < GaussRule::n; ++g) {
        const double xi = GaussRule::xi[g];
        const ShapeEval sh = shape_functions(xi, el.L);
        const double s = s0 + 0.5 * el.L * (1.0 + xi);
        const double w = GaussRule::w[g] * 0.5 * el.L;
        Vec3 fv = Vec3::Zero();
        Vec3 mv = Vec3::Zero();
        if (lo.distributed_force) fv = lo.distributed_force(s, t);
        if (lo.distributed_moment) {
          const LocalKinematics k = interpolate(el, xi, pb.degeneracy_floor);
          mv = lo.distributed_moment(s, t).cross(k.t4);
        }
        for (int a = 0; a < 4; ++a) {
          const Vec3 fa = w * (sh.dof_value(a) * fv + sh.dof_d1(a) * mv);
          for (int dim = 0; dim < 3; ++dim) f[d0 + 3 * a + dim] += fa[dim];
        }
      }
    }
  }

  // Boundary terms: N_a collapses onto the end node position, N_a' onto the
  // end node tangent (both with unit coefficient).
  for (int side = 0; side < 2; ++side) {
    const int elem = side == 0 ? 0 : mesh.element_count - 1;
    const int node = side == 0 ? mesh.left_node(0) : mesh.right_node(elem);
    if (lo.end_force[side]) {
      const Vec3 fb = lo.end_force[side](t);
      for (int dim = 0; dim < 3; ++dim) f[mesh.pos_dof(node, dim)] += fb[dim];
    }
    if (lo.end_moment[side]) {
      const ElementDofs el = gather_element(mesh, x, elem);
      const LocalKinematics k =
          interpolate(el, side == 0 ? -1.0 : 1.0, pb.degeneracy_floor);
      const Vec3 mb = lo.end_moment[side](t).cross(k.t4);
      for (int dim = 0; dim < 3; ++dim) f[mesh.tan_dof(node, dim)] += mb[dim];
    }
  }

  for (const PointForce& pf : lo.point_forces) {
    const Vec3 fv = pf.force(t);
    for (int dim = 0; dim < 3; ++dim) f[mesh.pos_dof(pf.node, dim)] += fv[dim];
  }
  return f;
}

VecX assemble_residual(const Problem& pb, const VecX& x,
                       std::vector<InterfaceState>& states, double t) {
  return assemble_internal_bulk(pb, x) +
         assemble_interface_forces(pb, x, states, t) -
         assemble_external(pb, x, t);
}

// ===========================================================================
// Energies and state update
// ===========================================================================

EnergyReport assemble_energies(const Problem& pb, const VecX& x,
                               std::vector<InterfaceState>& states, double t) {
  EnergyReport rep;
  const double EA = pb.section.EA();
  const double EI = pb.section.EI();
  for (int e = 0; e < pb.mesh.element_count; ++e) {
    const ElementDofs el = gather_element(pb.mesh, x, e);
    for (int g = 0; g < GaussRule::n; ++g) {
      const LocalKinematics k =
          interpolate(el, GaussRule::xi[g], pb.degeneracy_floor);
      const double w = GaussRule::w[g] * 0.5 * el.L;
      rep.elastic +=
          w * (0.5 * EA * k.eps * k.eps + 0.5 * EI * k.kappa.squaredNorm());
    }
  }
  for (int i = 0; i < pb.mesh.interface_count(); ++i) {
    InterfaceState& st = states[i];
    const InterfaceEval ev = eval_interface(pb, x, i, &st, t);
    double wp, wt;
    interface_penalty_weights(pb, i, wp, wt);
    if (st.alpha_intact) {
      rep.penalty += 0.5 * wp * ev.jump_r.squaredNorm() +
                     0.5 * wt * ev.theta.squaredNorm();
      continue;
    }
    const InterfaceJumps& j = ev.jumps;
    const Vec3 c_par = j.delta_par * j.normal;
    const Vec3 c_perp = ev.jump_r - c_par;
    if (st.gamma_active) rep.penalty += 0.5 * wp * c_perp.squaredNorm();
    if (st.delta_max > 0.0 && j.delta_par < 0.0) {
      rep.penalty += 0.5 * wp * c_par.squaredNorm();
    }
    const double f_now = effective_force(j.Delta, *pb.cohesive, st);
    rep.cohesive_stored += 0.5 * f_now * j.Delta;
    rep.dissipated +=
        std::max(0.0, st.cohesive_work - 0.5 * f_now * j.Delta);
  }
  return rep;
}

void update_interface_states(const Problem& pb, const VecX& x,
                             std::vector<InterfaceState>& states, double t) {
  if (!pb.cohesive) return;
  for (int i = 0; i < pb.mesh.interface_count(); ++i) {
    const InterfaceEval ev = eval_interface(pb, x, i, &states[i], t);
    double wp, wt;
    interface_penalty_weights(pb, i, wp, wt);
    update_state(states[i], ev.jumps, ev.mean_f, ev.mean_m, *pb.cohesive,
                 pb.section.R, t, wp, wt);
  }
}

}  // namespace beamfrac
