#include "beamfrac/cohesive.hpp"

#include <algorithm>
#include <cmath>

namespace beamfrac {

CohesiveParams make_cohesive_params(double sigma_c, double Gc, double alpha,
                                    const MaterialSection& sec) {
  if (!(sigma_c > 0.0) || !(Gc > 0.0) || !(alpha >= 0.0)) {
    throw std::invalid_argument(
        "make_cohesive_params: sigma_c, Gc must be positive and alpha >= 0");
  }
  CohesiveParams p;
  p.sigma_c = sigma_c;
  p.Gc = Gc;
  p.alpha = alpha;
  p.f_c = sigma_c * sec.A;
  p.Delta_c = 2.0 * Gc / sigma_c;
  return p;
}

InterfaceJumps compute_jumps(const LocalKinematics& minus,
                             const LocalKinematics& plus,
                             const CohesiveParams& p, double R,
                             InterfaceState& state) {
  InterfaceJumps j;
  j.jump_r = plus.r - minus.r;
  j.theta = plus.g1 - minus.g1;

  const Vec3 mean_g1 = 0.5 * (plus.g1 + minus.g1);
  const double mn = mean_g1.norm();
  if (mn > 1e-12) {
    j.normal = mean_g1 / mn;
    state.cached_normal = j.normal;
    state.has_cached_normal = true;
  } else if (state.has_cached_normal) {
    j.normal = state.cached_normal;
  } else {
    throw DegenerateNormalError(
        "compute_jumps: mean tangent vanished with no cached normal");
  }

  j.delta_par = j.jump_r.dot(j.normal);
  const double dpos = std::max(j.delta_par, 0.0);
  const double rot = p.alpha * R * j.theta.norm();
  j.Delta = std::sqrt(dpos * dpos + rot * rot);
  return j;
}

double effective_force(double Delta, const CohesiveParams& p,
                       const InterfaceState& state) {
  if (Delta >= state.delta_max) {
    return std::max(0.0, (1.0 - Delta / p.Delta_c) * p.f_c);
  }
  if (state.delta_max <= 0.0) {
    return p.f_c;
  }
  return (Delta / state.delta_max) * state.f_max;
}

CohesiveTractions cohesive_tractions(const InterfaceJumps& j,
                                     const CohesiveParams& p, double R,
                                     const InterfaceState& state) {
  CohesiveTractions ct;
  ct.f_eff = effective_force(j.Delta, p, state);
  if (j.Delta <= 0.0) {
    return ct;  // zero-opening limit: no tractions by convention
  }
  const double dpos = std::max(j.delta_par, 0.0);
  ct.f_par = ct.f_eff * (dpos / j.Delta) * j.normal;
  ct.m_perp = (p.alpha * p.alpha * ct.f_eff * R * R / j.Delta) * j.theta;
  return ct;
}

bool initiation_check(const Vec3& mean_f, const Vec3& mean_m,
                      const InterfaceJumps& j, const CohesiveParams& p,
                      double R) {
  const double fn = std::max(mean_f.dot(j.normal), 0.0);
  double f_eq_sq = fn * fn;
  if (p.bending_in_initiation) {
    const Vec3 mb = mean_m / (p.alpha * R);
    f_eq_sq += mb.squaredNorm();
  }
  return std::sqrt(f_eq_sq) >= p.f_c;
}

double initiation_seed_floor(const CohesiveParams& p, double R, double wp,
                             double wt) {
  double floor = 0.0;
  if (wp > 0.0) floor = std::max(floor, p.f_c / wp);
  if (wt > 0.0) {
    floor = std::max(floor, p.alpha * p.alpha * R * R * p.f_c / wt);
  }
  return floor;
}

void update_state(InterfaceState& state, const InterfaceJumps& j,
                  const Vec3& mean_f, const Vec3& mean_m,
                  const CohesiveParams& p, double R, double t, double wp,
                  double wt) {
  if (state.alpha_intact) {
    if (initiation_check(mean_f, mean_m, j, p, R)) {
      state.alpha_intact = false;
      state.initiation_time = t;
      // Seed damage no lower than the stiffness-bound floor so the secant
      // reload line is never stiffer than the DG coupling it replaces.
      state.delta_max =
          std::max(std::max(j.Delta, 0.0), initiation_seed_floor(p, R, wp, wt));
      state.f_max =
          std::max(0.0, (1.0 - state.delta_max / p.Delta_c) * p.f_c);
      if (state.delta_max >= p.Delta_c) {
        state.gamma_active = false;
        state.failure_time = t;
      }
      state.last_delta = j.Delta;
      state.last_force = effective_force(j.Delta, p, state);
    }
    return;
  }

  const double f_now = effective_force(j.Delta, p, state);
  state.cohesive_work +=
      0.5 * (state.last_force + f_now) * (j.Delta - state.last_delta);
  state.last_delta = j.Delta;
  state.last_force = f_now;

  if (j.Delta > state.delta_max) {
    state.delta_max = j.Delta;
    state.f_max = std::max(0.0, (1.0 - state.delta_max / p.Delta_c) * p.f_c);
    if (state.gamma_active && state.delta_max >= p.Delta_c) {
      state.gamma_active = false;
      state.failure_time = t;
    }
  }
  state.recontact = (j.delta_par < 0.0 && state.delta_max > 0.0);
}

}  // namespace beamfrac
