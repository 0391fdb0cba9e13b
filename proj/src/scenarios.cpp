#include "beamfrac/scenarios.hpp"

#include <cmath>

namespace beamfrac {

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::cantilever: return "cantilever";
    case ScenarioKind::buckling: return "buckling";
    case ScenarioKind::spall: return "spall";
    case ScenarioKind::transverse: return "transverse";
    case ScenarioKind::spaghetti: return "spaghetti";
  }
  return "unknown";
}

ScenarioKind scenario_from_string(const std::string& s) {
  if (s == "cantilever") return ScenarioKind::cantilever;
  if (s == "buckling") return ScenarioKind::buckling;
  if (s == "spall") return ScenarioKind::spall;
  if (s == "transverse") return ScenarioKind::transverse;
  if (s == "spaghetti") return ScenarioKind::spaghetti;
  throw ConfigError("unknown scenario kind '" + s + "'");
}

// ===========================================================================
// Oracles
// ===========================================================================

double oracle_buckling_load(double E, double R, double L) {
  return M_PI * M_PI * M_PI * E * R * R * R * R / (4.0 * L * L);
}

double oracle_cantilever_moment(double E, double R, double L) {
  return M_PI * M_PI * E * R * R * R * R / L;
}

Vec3 oracle_double_circle(double s, double L) {
  const double a = L / (4.0 * M_PI);
  return Vec3(a * std::sin(s / a), a * (1.0 - std::cos(s / a)), 0.0);
}

namespace {

// Piecewise-constant right-going characteristic amplitude of the driven end,
// in units of the radiated step. On [2k T_h, (2k+2) T_h) the value is
// -(k+1) against a fixed far end (stress ratchets up) and alternates
// -1, 0, -1, ... against a free far end.
double fhat(double tau, double T_half, bool fractured) {
  if (tau < 0.0) return 0.0;
  const int k = static_cast<int>(std::floor(tau / (2.0 * T_half)));
  if (fractured) return (k % 2 == 0) ? -1.0 : 0.0;
  return -static_cast<double>(k + 1);
}

}  // namespace

double oracle_spall_stress(double x, double t, double L_half, double c,
                           double sigma_f, bool fractured) {
  const double T_half = L_half / c;
  const double sign = fractured ? 1.0 : -1.0;
  const double g = sign * fhat(t - 2.0 * T_half + x / c, T_half, fractured);
  const double f = fhat(t - x / c, T_half, fractured);
  return 0.5 * sigma_f * (g - f);
}

double relative_l2_error(const std::vector<double>& weights,
                         const std::vector<Vec3>& num,
                         const std::vector<Vec3>& ref, double u_max,
                         double L) {
  if (weights.size() != num.size() || num.size() != ref.size()) {
    throw std::invalid_argument("relative_l2_error: size mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < num.size(); ++i) {
    acc += weights[i] * (num[i] - ref[i]).squaredNorm();
  }
  return std::sqrt(acc / L) / u_max;
}

CenterlineSamples sample_centerline(const Problem& pb, const VecX& x) {
  CenterlineSamples out;
  const int n = pb.mesh.element_count * GaussRule::n;
  out.s.reserve(n);
  out.w.reserve(n);
  out.r.reserve(n);
  for (int e = 0; e < pb.mesh.element_count; ++e) {
    const ElementDofs el = gather_element(pb.mesh, x, e);
    const double s0 = pb.mesh.node_s[pb.mesh.left_node(e)];
    for (int g = 0; g < GaussRule::n; ++g) {
      const double xi = GaussRule::xi[g];
      const LocalKinematics k = interpolate(el, xi, pb.degeneracy_floor);
      out.s.push_back(s0 + 0.5 * el.L * (1.0 + xi));
      out.w.push_back(GaussRule::w[g] * 0.5 * el.L);
      out.r.push_back(k.r);
    }
  }
  return out;
}

double cantilever_circle_error(const Problem& pb, const VecX& x) {
  const CenterlineSamples samples = sample_centerline(pb, x);
  std::vector<Vec3> ref(samples.s.size());
  double u_max = 0.0;
  for (size_t i = 0; i < samples.s.size(); ++i) {
    ref[i] = oracle_double_circle(samples.s[i], pb.mesh.total_length);
    const Vec3 straight(samples.s[i], 0.0, 0.0);
    u_max = std::max(u_max, (samples.r[i] - straight).norm());
  }
  return relative_l2_error(samples.w, samples.r, ref, u_max,
                           pb.mesh.total_length);
}

// ===========================================================================
// Scenario builders
// ===========================================================================

namespace {

int checked_element_count(const ScenarioConfig& cfg, bool need_even) {
  const double ratio = cfg.length / cfg.element_size;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("element_size must divide length evenly");
  }
  if (need_even && n % 2 != 0) {
    throw ConfigError(
        "element count must be even so an interface sits at the center");
  }
  return n;
}

void clamp_node(Problem& pb, int node, const Vec3& pos, const Vec3& tan) {
  for (int d = 0; d < 3; ++d) {
    pb.loads.dirichlet.push_back(
        {pb.mesh.pos_dof(node, d), [v = pos[d]](double) { return v; }});
    pb.loads.dirichlet.push_back(
        {pb.mesh.tan_dof(node, d), [v = tan[d]](double) { return v; }});
  }
}

Problem base_problem(const ScenarioConfig& cfg, int elements) {
  Problem pb;
  pb.mesh = uniform_mesh(cfg.length, elements);
  pb.section = make_section(cfg.youngs_modulus, cfg.density, cfg.radius);
  pb.penalties = {cfg.beta_p, cfg.beta_t};
  if (cfg.has_cohesive) {
    CohesiveParams cp = make_cohesive_params(cfg.strength, cfg.fracture_energy,
                                             cfg.mode_mixity, pb.section);
    cp.bending_in_initiation = cfg.bending_in_initiation;
    pb.cohesive = cp;
  }
  return pb;
}

NewtonSettings newton_from_config(const ScenarioConfig& cfg) {
  NewtonSettings ns;
  ns.load_steps = cfg.load_steps;
  ns.max_iters = cfg.max_iters;
  ns.tol_rel = cfg.tol_rel;
  ns.tol_abs_scale = cfg.tol_abs_scale;
  return ns;
}

}  // namespace

ScenarioSetup build_scenario(const ScenarioConfig& cfg) {
  if (!(cfg.length > 0.0)) throw ConfigError("length must be positive");
  if (!(cfg.radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(cfg.youngs_modulus > 0.0)) {
    throw ConfigError("youngs_modulus must be positive");
  }
  if (!(cfg.density > 0.0)) throw ConfigError("density must be positive");
  if (!(cfg.element_size > 0.0)) {
    throw ConfigError("element_size must be positive");
  }
  if (!(cfg.beta_p > 1.0)) throw ConfigError("beta_p must exceed 1");
  if (!(cfg.beta_t > 1.0)) throw ConfigError("beta_t must exceed 1");

  ScenarioSetup setup;
  setup.kind = cfg.kind;
  setup.newton = newton_from_config(cfg);
  setup.dt = cfg.time_step;
  setup.duration = cfg.duration;
  setup.safety_factor = cfg.safety_factor;

  const bool dynamic = cfg.kind == ScenarioKind::spall ||
                       cfg.kind == ScenarioKind::transverse ||
                       cfg.kind == ScenarioKind::spaghetti;
  if (dynamic) {
    if (cfg.solver_kind != "explicit") {
      throw ConfigError("scenario '" + to_string(cfg.kind) +
                        "' requires solver kind 'explicit'");
    }
    if (!(cfg.duration > 0.0)) throw ConfigError("duration must be positive");
    if (!cfg.has_cohesive) {
      throw ConfigError("scenario '" + to_string(cfg.kind) +
                        "' requires a [cohesive] section");
    }
  } else if (cfg.solver_kind != "newton") {
    throw ConfigError("scenario '" + to_string(cfg.kind) +
                      "' requires solver kind 'newton'");
  }

  switch (cfg.kind) {
    case ScenarioKind::cantilever: {
      const int n = checked_element_count(cfg, false);
      setup.elements = n;
      setup.problem = base_problem(cfg, n);
      Problem& pb = setup.problem;
      clamp_node(pb, 0, Vec3::Zero(), Vec3::UnitX());
      const double M = cfg.end_moment > 0.0
                           ? cfg.end_moment
                           : oracle_cantilever_moment(cfg.youngs_modulus,
                                                      cfg.radius, cfg.length);
      setup.applied_moment = M;
      pb.loads.end_moment[1] = [M](double lam) {
        return Vec3(0.0, 0.0, lam * M);
      };
      break;
    }
    case ScenarioKind::buckling: {
      if (!(cfg.applied_displacement > 0.0)) {
        throw ConfigError("applied_displacement must be positive");
      }
      if (cfg.perturbation_force == 0.0) {
        throw ConfigError("perturbation_force must be nonzero");
      }
      const int n = checked_element_count(cfg, true);
      setup.elements = n;
      setup.problem = base_problem(cfg, n);
      Problem& pb = setup.problem;
      // Pin: all three end positions fixed; tangents free.
      for (int d = 0; d < 3; ++d) {
        pb.loads.dirichlet.push_back(
            {pb.mesh.pos_dof(0, d), [](double) { return 0.0; }});
      }
      // Roller: transverse positions fixed, axial position driven inward.
      const int last = pb.mesh.node_count() - 1;
      const double L = cfg.length;
      const double D = cfg.applied_displacement;
      pb.loads.dirichlet.push_back(
          {pb.mesh.pos_dof(last, 0),
           [L, D](double lam) { return L - D * lam; }});
      pb.loads.dirichlet.push_back(
          {pb.mesh.pos_dof(last, 1), [](double) { return 0.0; }});
      pb.loads.dirichlet.push_back(
          {pb.mesh.pos_dof(last, 2), [](double) { return 0.0; }});
      setup.roller_dof = pb.mesh.pos_dof(last, 0);
      setup.applied_displacement = D;
      // Constant transverse nudge at the midpoint (single nodal entry).
      const int mid_iface = n / 2 - 1;
      setup.mid_node = pb.mesh.minus_node(mid_iface);
      const double P = cfg.perturbation_force;
      pb.loads.point_forces.push_back(
          {setup.mid_node, [P](double) { return Vec3(0.0, P, 0.0); }});
      break;
    }
    case ScenarioKind::spall: {
      if (!(cfg.sigma_f > 0.0)) throw ConfigError("sigma_f must be positive");
      const int n = checked_element_count(cfg, true);
      setup.elements = n;
      setup.problem = base_problem(cfg, n);
      Problem& pb = setup.problem;
      setup.center_interface = n / 2 - 1;
      setup.gauge_s = 0.25 * cfg.length;
      // Outward end displacement delta(t) = sigma_f t / (2 rho c); transverse
      // positions held, tangents free.
      const double rate =
          cfg.sigma_f / (2.0 * cfg.density * pb.section.wave_speed());
      const int last = pb.mesh.node_count() - 1;
      const double L = cfg.length;
      pb.loads.dirichlet.push_back(
          {pb.mesh.pos_dof(0, 0), [rate](double t) { return -rate * t; }});
      pb.loads.dirichlet.push_back(
          {pb.mesh.pos_dof(last, 0),
           [rate, L](double t) { return L + rate * t; }});
      for (int d = 1; d < 3; ++d) {
        pb.loads.dirichlet.push_back(
            {pb.mesh.pos_dof(0, d), [](double) { return 0.0; }});
        pb.loads.dirichlet.push_back(
            {pb.mesh.pos_dof(last, d), [](double) { return 0.0; }});
      }
      break;
    }
    case ScenarioKind::transverse: {
      if (!(cfg.load_rate > 0.0)) {
        throw ConfigError("load_rate must be positive");
      }
      const int n = checked_element_count(cfg, true);
      setup.elements = n;
      setup.problem = base_problem(cfg, n);
      Problem& pb = setup.problem;
      clamp_node(pb, 0, Vec3::Zero(), Vec3::UnitX());
      clamp_node(pb, pb.mesh.node_count() - 1, Vec3(cfg.length, 0.0, 0.0),
                 Vec3::UnitX());
      const int ic = n / 2 - 1;
      setup.center_interface = ic;
      // Both duplicated center nodes ride the same transverse program.
      const double v = cfg.load_rate;
      for (int node : {pb.mesh.minus_node(ic), pb.mesh.plus_node(ic)}) {
        pb.loads.dirichlet.push_back(
            {pb.mesh.pos_dof(node, 1), [v](double t) { return v * t; }});
      }
      break;
    }
    case ScenarioKind::spaghetti: {
      if (!(cfg.initial_curvature > 0.0)) {
        throw ConfigError("initial_curvature must be positive");
      }
      if (cfg.preload_steps < 1) {
        throw ConfigError("preload_steps must be at least 1");
      }
      const int n = checked_element_count(cfg, false);
      setup.elements = n;
      setup.problem = base_problem(cfg, n);
      clamp_node(setup.problem, 0, Vec3::Zero(), Vec3::UnitX());

      // Stage 1: same beam, quasi-static end moment EI kappa0.
      Problem pre = setup.problem;
      const double M =
          setup.problem.section.EI() * cfg.initial_curvature;
      setup.applied_moment = M;
      pre.loads.end_moment[1] = [M](double lam) {
        return Vec3(0.0, 0.0, lam * M);
      };
      setup.preload = std::move(pre);
      setup.newton.load_steps = cfg.preload_steps;
      break;
    }
  }
  return setup;
}

}  // namespace beamfrac
