#pragma once

#include <functional>
#include <vector>

#include "beamfrac/assembly.hpp"
#include "beamfrac/mesh.hpp"

namespace beamfrac {

/// Index bookkeeping for Dirichlet elimination: free/constrained DOF sets
/// derived from a problem's Dirichlet list.
struct DofPartition {
  std::vector<int> free_dofs;       // ascending global DOF ids
  std::vector<int> full_to_free;    // -1 for constrained
  std::vector<int> constrained;     // global DOF ids with BCs (ascending)

  int n_free() const { return static_cast<int>(free_dofs.size()); }
};

DofPartition make_partition(const Problem& pb);

/// Writes the Dirichlet values at parameter t into x.
void apply_dirichlet(const Problem& pb, VecX& x, double t);

/// Extracts the free-free submatrix of K.
SpMat reduce_matrix(const SpMat& K, const DofPartition& part);

struct NewtonSettings {
  int load_steps = 50;
  int max_iters = 50;
  double tol_rel = 1e-8;
  /// Absolute residual floor as a multiple of EA (force scale).
  double tol_abs_scale = 1e-10;
};

/// One converged load step of the quasi-static solve.
struct QuasiStaticRecord {
  double load_factor = 0.0;
  VecX x;
  VecX residual;  // full residual; entries at constrained DOFs are reactions
  int iterations = 0;
};

/// Load-stepped Newton with full linearization and Dirichlet elimination.
/// Starts from x0 (reference state when null). Interface states advance once
/// per converged step. Throws StepFailureError when a step exhausts
/// max_iters and LinearSolveError on a singular tangent.
std::vector<QuasiStaticRecord> newton_quasistatic(
    const Problem& pb, std::vector<InterfaceState>& states,
    const NewtonSettings& settings, const VecX* x0 = nullptr,
    const std::function<void(const QuasiStaticRecord&)>& on_step = nullptr);

struct TimestepEstimate {
  double omega_max = 0.0;
  double dt_crit = 0.0;  // 2 / omega_max
};

/// Largest magnitude eigenfrequency of M_lumped^{-1} (K_int + K_jump) on the
/// free DOFs at state x, and the central-difference critical step 2/omega.
/// Dense solve for small systems, Arnoldi iteration above `dense_limit`.
TimestepEstimate stable_timestep(const Problem& pb, const VecX& x,
                                 std::vector<InterfaceState>& states,
                                 double t = 0.0, int dense_limit = 3000);

/// State carried by the explicit integrator.
struct DynamicState {
  VecX x, v, a;
  double t = 0.0;
};

/// Per-step view handed to the dynamics callback after each completed step.
struct StepContext {
  int step = 0;
  const DynamicState& state;
  const VecX& residual;  // full residual at the new state
  double external_work = 0.0;  // cumulative, loads plus support reactions
};

/// Initializes accelerations consistently with the loads at st.t.
void init_dynamics(const Problem& pb, std::vector<InterfaceState>& states,
                   DynamicState& st);

/// Central-difference Newmark (beta = 0, gamma = 1/2) march of n_steps.
/// Dirichlet programs are imposed on positions; their velocities and
/// accelerations follow by central differencing of the program. Interface
/// states advance once per step. Throws DivergenceError on non-finite state.
void run_dynamics(const Problem& pb, std::vector<InterfaceState>& states,
                  DynamicState& st, double dt, int n_steps,
                  const std::function<void(const StepContext&)>& per_step =
                      nullptr);

}  // namespace beamfrac
