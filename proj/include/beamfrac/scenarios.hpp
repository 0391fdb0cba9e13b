#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamfrac/mesh.hpp"
#include "beamfrac/solvers.hpp"

namespace beamfrac {

enum class ScenarioKind { cantilever, buckling, spall, transverse, spaghetti };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_from_string(const std::string& s);

/// Flat run description mirroring the config file.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::cantilever;

  // geometry / material
  double length = 0.0;
  double radius = 0.0;
  double youngs_modulus = 0.0;
  double density = 0.0;

  // cohesive (optional section)
  bool has_cohesive = false;
  double strength = 0.0;
  double fracture_energy = 0.0;
  double mode_mixity = 1.0;
  bool bending_in_initiation = true;

  // penalty
  double beta_p = 10.0;
  double beta_t = 10.0;

  // mesh
  double element_size = 0.0;

  // solver
  std::string solver_kind;  // "newton" or "explicit"
  int load_steps = 50;
  int max_iters = 50;
  double tol_rel = 1e-8;
  double tol_abs_scale = 1e-10;
  double time_step = 0.0;  // <= 0: auto (safety_factor * dt_crit)
  double duration = 0.0;
  double safety_factor = 0.9;

  // loading (scenario-specific subset)
  double end_moment = 0.0;             // cantilever; 0 = full double circle
  double applied_displacement = 0.0;   // buckling end shortening
  double perturbation_force = 0.0;     // buckling transverse nudge
  double sigma_f = 0.0;                // spall loading amplitude
  double load_rate = 0.0;              // transverse center velocity
  double initial_curvature = 0.0;      // spaghetti preload curvature
  int preload_steps = 10;              // spaghetti quasi-static stage

  // output
  int history_stride = 1;
  int snapshot_stride = 0;
  bool write_vtk = false;
};

/// Executable form of a scenario: the (dynamic-stage) problem, an optional
/// quasi-static preload problem, and gauge locations.
struct ScenarioSetup {
  ScenarioKind kind;
  Problem problem;
  std::optional<Problem> preload;  // spaghetti stage 1
  NewtonSettings newton;           // quasi-static settings (or preload)
  double dt = 0.0;                 // <= 0: auto
  double duration = 0.0;
  double safety_factor = 0.9;
  int elements = 0;
  int center_interface = -1;  // spall / transverse
  double gauge_s = -1.0;      // spall stress gauge position
  double applied_moment = 0.0;       // cantilever / spaghetti stage 1
  double applied_displacement = 0.0; // buckling
  int roller_dof = -1;               // buckling reaction DOF
  int mid_node = -1;                 // buckling midpoint (perturbed node)
};

/// Validates the config and builds the runnable setup. Throws ConfigError on
/// any inconsistency (non-divisible mesh, missing center interface, ...).
ScenarioSetup build_scenario(const ScenarioConfig& cfg);

// ===========================================================================
// Closed-form oracles
// ===========================================================================

/// Euler critical load of the pinned column: pi^3 E R^4 / (4 L^2).
double oracle_buckling_load(double E, double R, double L);

/// Tip moment that winds the cantilever into two full circles: pi^2 E R^4 / L.
double oracle_cantilever_moment(double E, double R, double L);

/// Point on the double circle of radius L/(4 pi) at arc length s.
Vec3 oracle_double_circle(double s, double L);

/// Traveling-wave stress at distance x from the driven end of a half bar of
/// length L_half whose far end is fixed (intact center) or free (fractured),
/// with the driven end ramped to radiate a step of amplitude sigma_f / 2.
double oracle_spall_stress(double x, double t, double L_half, double c,
                           double sigma_f, bool fractured);

/// Relative L2 centerline error: (1/u_max) sqrt((1/L) sum w_i |num - ref|^2).
double relative_l2_error(const std::vector<double>& weights,
                         const std::vector<Vec3>& num,
                         const std::vector<Vec3>& ref, double u_max, double L);

/// Quadrature sampling of the discrete centerline: arc lengths, weights and
/// positions at every bulk Gauss point.
struct CenterlineSamples {
  std::vector<double> s;
  std::vector<double> w;
  std::vector<Vec3> r;
};
CenterlineSamples sample_centerline(const Problem& pb, const VecX& x);

/// Relative L2 error of a cantilever state against the double circle, with
/// u_max taken as the largest sampled displacement from the straight
/// reference.
double cantilever_circle_error(const Problem& pb, const VecX& x);

}  // namespace beamfrac
