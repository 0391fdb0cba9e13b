#pragma once

#include "beamfrac/kinematics.hpp"
#include "beamfrac/types.hpp"

namespace beamfrac {

/// Resultant cohesive law constants. f_c and Delta_c are derived so that the
/// triangular envelope dissipates exactly Gc * A at full separation.
struct CohesiveParams {
  double sigma_c = 0.0;  // strength [Pa]
  double Gc = 0.0;       // fracture energy [N/m]
  double alpha = 1.0;    // mode-mixity weight on the rotation jump
  double f_c = 0.0;      // peak force sigma_c * A [N]
  double Delta_c = 0.0;  // full-separation opening 2 Gc / sigma_c [m]
  /// When false, the initiation check drops the bending term (sensitivity
  /// switch; the force term alone then governs).
  bool bending_in_initiation = true;
};

/// Builds cohesive params from strength, fracture energy, mixity and section.
CohesiveParams make_cohesive_params(double sigma_c, double Gc, double alpha,
                                    const MaterialSection& sec);

/// Kinematic jumps across one inter-element interface.
/// jump convention: plus side minus minus side.
struct InterfaceJumps {
  Vec3 jump_r;       // position jump
  Vec3 theta;        // tangent jump g1+ - g1- (orthogonal to normal)
  Vec3 normal;       // mean-tangent direction
  double delta_par;  // jump_r . normal (signed axial opening)
  double Delta;      // effective separation sqrt(<d>+^2 + (alpha R |theta|)^2)
};

/// Persistent per-interface fracture state. alpha_intact is the DG/cohesive
/// blend switch (1 until initiation), gamma_active the perpendicular-coupling
/// switch (1 until Delta reaches Delta_c). State changes once per converged
/// step or time step, never inside an iteration.
struct InterfaceState {
  bool alpha_intact = true;
  bool gamma_active = true;
  double delta_max = 0.0;  // largest effective separation seen
  double f_max = 0.0;      // envelope force at delta_max
  bool recontact = false;  // axial closure after initiation
  Vec3 cached_normal = Vec3::Zero();
  bool has_cached_normal = false;
  // Bookkeeping for energy output: path integral of f dDelta and the last
  // sampled (Delta, f) pair that anchors the trapezoid rule.
  double cohesive_work = 0.0;
  double last_delta = 0.0;
  double last_force = 0.0;
  double initiation_time = -1.0;  // < 0 until initiation
  double failure_time = -1.0;     // < 0 until full failure
};

/// Computes the interface jumps from both side states. When the mean tangent
/// degenerates the last cached normal is used; with no cache available a
/// DegenerateNormalError is thrown. On success the cache is refreshed.
InterfaceJumps compute_jumps(const LocalKinematics& minus,
                             const LocalKinematics& plus,
                             const CohesiveParams& p, double R,
                             InterfaceState& state);

/// Scalar effective cohesive force at separation Delta: the linear softening
/// envelope on loading (Delta >= delta_max), the secant unloading line
/// otherwise. Clamped at zero beyond full separation.
double effective_force(double Delta, const CohesiveParams& p,
                       const InterfaceState& state);

/// Axial cohesive force and perpendicular cohesive moment resultants.
/// Both vanish in the Delta -> 0 limit by convention.
struct CohesiveTractions {
  Vec3 f_par = Vec3::Zero();
  Vec3 m_perp = Vec3::Zero();
  double f_eff = 0.0;
};
CohesiveTractions cohesive_tractions(const InterfaceJumps& j,
                                     const CohesiveParams& p, double R,
                                     const InterfaceState& state);

/// Resultant-based initiation check on the mean internal force and moment:
/// sqrt(<f.n>+^2 + |m/(alpha R)|^2) >= f_c (bending term optional).
bool initiation_check(const Vec3& mean_f, const Vec3& mean_m,
                      const InterfaceJumps& j, const CohesiveParams& p,
                      double R);

/// Smallest damage seed compatible with the interface stiffness bound: the
/// secant slope f_max/delta_max of a freshly initiated interface must not
/// exceed the DG penalty stiffness it replaces (axial wp, bending wt), or the
/// post-initiation system would be stiffer than the one the stable time step
/// was sized for.
double initiation_seed_floor(const CohesiveParams& p, double R, double wp,
                             double wt);

/// Advances the interface state after a converged step / completed time step
/// at time `t`. Applies initiation, damage growth, full failure, recontact
/// flagging and the dissipation bookkeeping. `wp`/`wt` are the interface
/// penalty weights; they bound the secant stiffness at initiation via
/// initiation_seed_floor.
void update_state(InterfaceState& state, const InterfaceJumps& j,
                  const Vec3& mean_f, const Vec3& mean_m,
                  const CohesiveParams& p, double R, double t, double wp,
                  double wt);

}  // namespace beamfrac
