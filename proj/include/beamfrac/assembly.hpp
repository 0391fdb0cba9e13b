#pragma once

#include <vector>

#include "beamfrac/mesh.hpp"
#include "beamfrac/types.hpp"

namespace beamfrac {

/// Everything the interface terms need at one inter-element interface:
/// end states of both sides, raw jumps, and the mean force/moment resultants.
struct InterfaceEval {
  LocalKinematics minus, plus;
  Vec3 jump_r;   // r(plus) - r(minus)
  Vec3 theta;    // g1(plus) - g1(minus)
  Vec3 mean_f;   // <EA t1 + EI t6 + t4 x m_dist>
  Vec3 mean_m;   // <EI kappa>
  InterfaceJumps jumps;  // cohesive jumps; valid when the problem has a
                         // cohesive model (normal resolved via state cache)
  bool has_cohesive_jumps = false;
};

/// Evaluates interface `iface` at state x. `state` may be null only for
/// problems without a cohesive model (the normal cache lives in the state).
InterfaceEval eval_interface(const Problem& pb, const VecX& x, int iface,
                             InterfaceState* state, double t);

/// Mean penalty weights of interface `iface`: beta_p <EA/h> and beta_t <EI/h>.
void interface_penalty_weights(const Problem& pb, int iface, double& wp,
                               double& wt);

/// Interface force on the (minus node, plus node) x (position, tangent)
/// blocks; equal and opposite across the two sides for the position parts.
struct InterfaceForce {
  Vec3 pos[2] = {Vec3::Zero(), Vec3::Zero()};
  Vec3 tan[2] = {Vec3::Zero(), Vec3::Zero()};
};

/// Branch-resolved interface force for one interface at the given evaluation
/// and frozen state. wp/wt are the penalty weights of that interface.
InterfaceForce interface_force_blocks(const Problem& pb,
                                      const InterfaceEval& ev,
                                      const InterfaceState& st, double wp,
                                      double wt);

/// Consistent mass matrix (block diagonal across elements; exact quadrature).
SpMat assemble_mass(const Problem& pb);

/// Row-sum-preserving (HRZ) lumped mass diagonal. Position entries sum to the
/// element mass; tangent entries are scaled by the same per-element factor.
VecX lumped_mass(const Problem& pb);

/// Bulk internal force from the strain-energy density.
VecX assemble_internal_bulk(const Problem& pb, const VecX& x);

/// Interface coupling forces: DG consistency + stabilization while intact,
/// blended to cohesive tractions (with perpendicular DG retention and
/// recontact reactivation) after initiation. Updates the per-interface
/// normal caches as a side effect.
VecX assemble_interface_forces(const Problem& pb, const VecX& x,
                               std::vector<InterfaceState>& states, double t);

/// External force vector at parameter t (configuration-dependent through the
/// moment terms).
VecX assemble_external(const Problem& pb, const VecX& x, double t);

/// Residual f_int + f_jump - f_ext.
VecX assemble_residual(const Problem& pb, const VecX& x,
                       std::vector<InterfaceState>& states, double t);

/// Newton matrix K_int + K_jump - K_ext (nonsymmetric). Interfaces past
/// initiation contribute a local finite-difference tangent of their force
/// block; everything else is the closed-form linearization.
SpMat assemble_stiffness(const Problem& pb, const VecX& x,
                         std::vector<InterfaceState>& states, double t);

/// Mechanical energy bookkeeping at a given state (kinetic and external work
/// are accumulated by the drivers, not here).
struct EnergyReport {
  double kinetic = 0.0;
  double elastic = 0.0;          // bulk strain energy
  double penalty = 0.0;          // interface stabilization energy
  double cohesive_stored = 0.0;  // recoverable part of the cohesive springs
  double dissipated = 0.0;       // path integral minus recoverable part
  double external_work = 0.0;
  double mechanical() const {
    return kinetic + elastic + penalty + cohesive_stored;
  }
};

/// Fills the state-dependent energy terms (elastic, penalty, cohesive).
EnergyReport assemble_energies(const Problem& pb, const VecX& x,
                               std::vector<InterfaceState>& states, double t);

/// Advances all interface states after a converged step / time step.
void update_interface_states(const Problem& pb, const VecX& x,
                             std::vector<InterfaceState>& states, double t);

/// Number of worker threads honored by the parallel loops; reads
/// BEAMFRAC_THREADS once (default 1, clamped to [1, 64]).
int thread_count();

/// Deterministic parallel loop: the index range is split into contiguous
/// chunks and every index writes only to its own output slots, so results
/// are bitwise independent of the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace beamfrac
