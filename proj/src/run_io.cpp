#include "beamfrac/run_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>

namespace beamfrac {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void gauge_labels(ScenarioKind k, std::string& g1, std::string& g2) {
  switch (k) {
    case ScenarioKind::cantilever:
      g1 = "arc_error";
      g2 = "root_moment";
      return;
    case ScenarioKind::buckling:
      g1 = "axial_reaction";
      g2 = "mid_deflection";
      return;
    case ScenarioKind::spall:
      g1 = "gauge_stress";
      g2 = "center_opening";
      return;
    case ScenarioKind::transverse:
      g1 = "center_moment";
      g2 = "center_opening";
      return;
    case ScenarioKind::spaghetti:
      g1 = "clamp_curvature";
      g2 = "max_curvature";
      return;
  }
  g1 = "gauge1";
  g2 = "gauge2";
}

double cantilever_arc_error(const Problem& pb, const VecX& x, double moment) {
  if (!(moment > 0.0)) return 0.0;
  const double kappa = moment / pb.section.EI();
  const double a = 1.0 / kappa;
  const CenterlineSamples cs = sample_centerline(pb, x);
  std::vector<Vec3> ref(cs.s.size());
  double u_max = 0.0;
  for (size_t i = 0; i < cs.s.size(); ++i) {
    ref[i] = Vec3(a * std::sin(cs.s[i] * kappa),
                  a * (1.0 - std::cos(cs.s[i] * kappa)), 0.0);
    u_max = std::max(u_max, (cs.r[i] - Vec3(cs.s[i], 0.0, 0.0)).norm());
  }
  if (u_max <= 0.0) return 0.0;
  return relative_l2_error(cs.w, cs.r, ref, u_max, pb.mesh.total_length);
}

double axial_stress_at(const Problem& pb, const VecX& x, double s) {
  const BeamMesh& m = pb.mesh;
  const double tol = 1e-9 * std::max(1.0, m.total_length);
  for (int i = 0; i < m.interface_count(); ++i) {
    if (std::abs(m.interface_s(i) - s) < tol) {
      const LocalKinematics kl =
          interpolate(gather_element(m, x, i), 1.0, pb.degeneracy_floor);
      const LocalKinematics kr =
          interpolate(gather_element(m, x, i + 1), -1.0, pb.degeneracy_floor);
      return pb.section.E * 0.5 * (kl.eps + kr.eps);
    }
  }
  int elem = 0;
  double xi = 0.0;
  m.locate(s, elem, xi);
  const LocalKinematics k =
      interpolate(gather_element(m, x, elem), xi, pb.degeneracy_floor);
  return pb.section.E * k.eps;
}

double detect_buckling_load(const std::vector<HistoryRow>& history,
                            double fit_fraction, double multiplier) {
  if (history.size() < 5) {
    throw Error("buckling detection needs at least 5 history rows");
  }
  size_t nfit = std::max<size_t>(
      3, static_cast<size_t>(fit_fraction * static_cast<double>(history.size())));
  nfit = std::min(nfit, history.size() - 1);
  double sxy = 0.0;
  double sxx = 0.0;
  for (size_t i = 0; i < nfit; ++i) {
    sxy += history[i].applied * history[i].gauge2;
    sxx += history[i].applied * history[i].applied;
  }
  if (!(sxx > 0.0)) {
    throw Error("buckling detection needs a nonzero applied load history");
  }
  const double slope = sxy / sxx;
  for (size_t i = nfit; i < history.size(); ++i) {
    const double lin = slope * history[i].applied;
    if (std::abs(history[i].gauge2) > multiplier * std::abs(lin)) {
      return std::abs(history[i].gauge1);
    }
  }
  throw Error("no buckling departure detected in the recorded history");
}

namespace {

void count_interfaces(const std::vector<InterfaceState>& states,
                      int& initiated, int& failed) {
  initiated = 0;
  failed = 0;
  for (const InterfaceState& s : states) {
    if (!s.alpha_intact) {
      ++initiated;
      if (!s.gamma_active) ++failed;
    }
  }
}

double root_moment(const Problem& pb, const VecX& x) {
  const LocalKinematics k =
      interpolate(gather_element(pb.mesh, x, 0), -1.0, pb.degeneracy_floor);
  return (pb.section.EI() * k.kappa).norm();
}

// Largest curvature magnitude over the bulk quadrature points; clamp_max is
// restricted to elements starting within s_clamp, all_max covers the beam.
void curvature_peaks(const Problem& pb, const VecX& x, double s_clamp,
                     double& clamp_max, double& all_max) {
  clamp_max = 0.0;
  all_max = 0.0;
  for (int e = 0; e < pb.mesh.element_count; ++e) {
    const double s0 = pb.mesh.node_s[pb.mesh.left_node(e)];
    const ElementDofs el = gather_element(pb.mesh, x, e);
    double local = 0.0;
    for (int g = 0; g < GaussRule::n; ++g) {
      local = std::max(
          local,
          interpolate(el, GaussRule::xi[g], pb.degeneracy_floor).kappa.norm());
    }
    all_max = std::max(all_max, local);
    if (s0 <= s_clamp) clamp_max = std::max(clamp_max, local);
  }
}

struct Peaks {
  double g1 = 0.0;
  double g1_time = 0.0;
  double g1_pre_initiation = 0.0;
  double g1_pre_failure = 0.0;
};

void first_event_times(const std::vector<InterfaceState>& states,
                       double& t_init, int& i_init, double& t_fail,
                       int& i_fail) {
  t_init = std::numeric_limits<double>::infinity();
  t_fail = std::numeric_limits<double>::infinity();
  i_init = -1;
  i_fail = -1;
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].initiation_time >= 0.0 &&
        states[i].initiation_time < t_init) {
      t_init = states[i].initiation_time;
      i_init = static_cast<int>(i);
    }
    if (states[i].failure_time >= 0.0 && states[i].failure_time < t_fail) {
      t_fail = states[i].failure_time;
      i_fail = static_cast<int>(i);
    }
  }
}

void build_summary(RunResult& res, const Peaks& peaks) {
  const ScenarioConfig& cfg = res.config;
  const ScenarioSetup& setup = res.setup;
  const Problem& pb = setup.problem;
  auto add = [&](const std::string& k, const std::string& v) {
    res.summary.emplace_back(k, v);
  };
  auto addd = [&](const std::string& k, double v) { add(k, format_double(v)); };

  add("scenario", to_string(res.kind));
  add("elements", std::to_string(setup.elements));
  add("dofs", std::to_string(pb.mesh.dof_count()));
  std::string g1, g2;
  gauge_labels(res.kind, g1, g2);
  add("gauge1", g1);
  add("gauge2", g2);
  add("steps", std::to_string(res.steps));
  if (cfg.solver_kind == "explicit") {
    addd("dt", res.dt);
    addd("dt_crit", res.timestep.dt_crit);
    addd("omega_max", res.timestep.omega_max);
    addd("duration", setup.duration);
  }

  int initiated = 0;
  int failed = 0;
  count_interfaces(res.states, initiated, failed);
  add("initiated_interfaces", std::to_string(initiated));
  add("failed_interfaces", std::to_string(failed));
  double t_init = 0.0, t_fail = 0.0;
  int i_init = -1, i_fail = -1;
  first_event_times(res.states, t_init, i_init, t_fail, i_fail);
  if (i_init >= 0) {
    addd("first_initiation_time", t_init);
    add("first_initiation_interface", std::to_string(i_init));
  }
  if (i_fail >= 0) {
    addd("first_failure_time", t_fail);
    add("first_failure_interface", std::to_string(i_fail));
  }
  if (initiated > 0) {
    std::string ev;
    for (size_t i = 0; i < res.states.size(); ++i) {
      if (res.states[i].initiation_time < 0.0) continue;
      if (!ev.empty()) ev += ' ';
      ev += std::to_string(i) + ':' +
            format_double(res.states[i].initiation_time);
      if (res.states[i].failure_time >= 0.0) {
        ev += '/' + format_double(res.states[i].failure_time);
      }
    }
    add("initiation_events", ev);
  }

  switch (res.kind) {
    case ScenarioKind::cantilever:
      addd("applied_moment", setup.applied_moment);
      if (!res.history.empty()) {
        addd("final_arc_error", res.history.back().gauge1);
        addd("final_root_moment", res.history.back().gauge2);
      }
      break;
    case ScenarioKind::buckling: {
      addd("applied_displacement", setup.applied_displacement);
      addd("euler_load",
           oracle_buckling_load(pb.section.E, pb.section.R,
                                pb.mesh.total_length));
      try {
        addd("detected_critical_load", detect_buckling_load(res.history));
      } catch (const Error&) {
        add("detected_critical_load", "none");
      }
      if (res.history.size() >= 10) {
        const size_t tail = res.history.size() / 10;
        double acc = 0.0;
        for (size_t i = res.history.size() - tail; i < res.history.size(); ++i) {
          acc += std::abs(res.history[i].gauge1);
        }
        addd("plateau_reaction", acc / static_cast<double>(tail));
      }
      break;
    }
    case ScenarioKind::spall: {
      addd("sigma_f", cfg.sigma_f);
      addd("wave_speed", pb.section.wave_speed());
      addd("half_transit_time",
           0.5 * pb.mesh.total_length / pb.section.wave_speed());
      const InterfaceState& cs = res.states[setup.center_interface];
      if (cs.initiation_time >= 0.0) {
        addd("center_initiation_time", cs.initiation_time);
      } else {
        add("center_initiation_time", "none");
      }
      if (cs.failure_time >= 0.0) {
        addd("center_failure_time", cs.failure_time);
      } else {
        add("center_failure_time", "none");
      }
      if (!res.history.empty()) {
        addd("final_gauge_stress", res.history.back().gauge1);
      }
      break;
    }
    case ScenarioKind::transverse: {
      addd("critical_moment",
           pb.cohesive->alpha * pb.cohesive->f_c * pb.section.R);
      addd("peak_center_moment", peaks.g1);
      addd("peak_center_moment_time", peaks.g1_time);
      addd("peak_center_moment_pre_failure", peaks.g1_pre_failure);
      if (!res.history.empty()) {
        addd("final_center_moment", res.history.back().gauge1);
      }
      break;
    }
    case ScenarioKind::spaghetti:
      addd("preload_moment", setup.applied_moment);
      addd("target_curvature", cfg.initial_curvature);
      addd("peak_clamp_curvature", peaks.g1);
      addd("peak_clamp_curvature_time", peaks.g1_time);
      addd("peak_clamp_curvature_pre_failure", peaks.g1_pre_failure);
      break;
  }

  if (!res.history.empty()) {
    const EnergyReport& en = res.history.back().energy;
    addd("final_kinetic", en.kinetic);
    addd("final_elastic", en.elastic);
    addd("final_penalty", en.penalty);
    addd("final_cohesive_stored", en.cohesive_stored);
    addd("final_dissipated", en.dissipated);
    addd("final_external_work", en.external_work);
  }
}

RunResult run_newton(const ScenarioConfig& cfg, ScenarioSetup&& setup_in,
                     const SnapshotSink& sink) {
  RunResult res;
  res.kind = setup_in.kind;
  res.config = cfg;
  res.setup = std::move(setup_in);
  const ScenarioSetup& setup = res.setup;
  const Problem& pb = setup.problem;

  std::vector<InterfaceState> states = pb.make_interface_states();
  VecX x0 = reference_state(pb.mesh);
  int counter = 0;
  auto on_step = [&](const QuasiStaticRecord& rec) {
    ++counter;
    const bool last = counter == setup.newton.load_steps;
    if (counter % cfg.history_stride == 0 || last) {
      HistoryRow row;
      row.step = counter;
      row.time = rec.load_factor;
      if (res.kind == ScenarioKind::cantilever) {
        row.applied = rec.load_factor * setup.applied_moment;
        row.gauge1 = cantilever_arc_error(pb, rec.x, row.applied);
        row.gauge2 = root_moment(pb, rec.x);
      } else {
        row.applied = rec.load_factor * setup.applied_displacement;
        row.gauge1 = std::abs(rec.residual[setup.roller_dof]);
        row.gauge2 = rec.x[pb.mesh.pos_dof(setup.mid_node, 1)];
      }
      row.energy = assemble_energies(pb, rec.x, states, rec.load_factor);
      count_interfaces(states, row.initiated, row.failed);
      res.history.push_back(row);
    }
    if (sink && cfg.snapshot_stride > 0 &&
        counter % cfg.snapshot_stride == 0) {
      sink(counter, rec.load_factor, pb, rec.x);
    }
  };
  const auto records = newton_quasistatic(pb, states, setup.newton, &x0, on_step);
  res.x_final = records.back().x;
  res.steps = counter;
  res.states = std::move(states);
  build_summary(res, Peaks{});
  return res;
}

RunResult run_explicit(const ScenarioConfig& cfg, ScenarioSetup&& setup_in,
                       const SnapshotSink& sink) {
  RunResult res;
  res.kind = setup_in.kind;
  res.config = cfg;
  res.setup = std::move(setup_in);
  const ScenarioSetup& setup = res.setup;
  const Problem& pb = setup.problem;

  std::vector<InterfaceState> states = pb.make_interface_states();

  VecX x0;
  if (setup.preload) {
    std::vector<InterfaceState> pre = setup.preload->make_interface_states();
    const auto recs = newton_quasistatic(*setup.preload, pre, setup.newton);
    x0 = recs.back().x;
  } else {
    x0 = reference_state(pb.mesh);
  }

  res.timestep = stable_timestep(pb, x0, states);
  double dt = cfg.time_step;
  if (dt > 0.0) {
    if (dt > res.timestep.dt_crit) {
      throw ConfigError("time_step " + format_double(dt) +
                        " exceeds the stable limit " +
                        format_double(res.timestep.dt_crit));
    }
  } else {
    dt = setup.safety_factor * res.timestep.dt_crit;
  }
  res.dt = dt;
  const int n_steps =
      static_cast<int>(std::ceil(setup.duration / dt - 1e-12));

  DynamicState st;
  st.x = x0;
  st.v = VecX::Zero(pb.mesh.dof_count());
  st.a = VecX::Zero(pb.mesh.dof_count());
  st.t = 0.0;
  init_dynamics(pb, states, st);

  const VecX ml = lumped_mass(pb);
  const double spall_rate =
      res.kind == ScenarioKind::spall
          ? cfg.sigma_f / (2.0 * cfg.density * pb.section.wave_speed())
          : 0.0;

  auto applied_of = [&](double t) {
    switch (res.kind) {
      case ScenarioKind::spall:
        return spall_rate * t;
      case ScenarioKind::transverse:
        return cfg.load_rate * t;
      default:
        return 0.0;
    }
  };

  auto gauges = [&](const VecX& x, double t, double& g1, double& g2) {
    switch (res.kind) {
      case ScenarioKind::spall: {
        g1 = axial_stress_at(pb, x, setup.gauge_s);
        const InterfaceEval ev = eval_interface(
            pb, x, setup.center_interface, &states[setup.center_interface], t);
        g2 = ev.has_cohesive_jumps ? ev.jumps.Delta : 0.0;
        break;
      }
      case ScenarioKind::transverse: {
        const InterfaceEval ev = eval_interface(
            pb, x, setup.center_interface, &states[setup.center_interface], t);
        g1 = ev.mean_m.norm();
        g2 = ev.has_cohesive_jumps ? ev.jumps.Delta : 0.0;
        break;
      }
      case ScenarioKind::spaghetti: {
        curvature_peaks(pb, x, 0.25 * pb.mesh.total_length, g1, g2);
        break;
      }
      default:
        g1 = g2 = 0.0;
    }
  };

  Peaks peaks;
  auto record = [&](int step, double t, const VecX& x, const VecX& v,
                    double ext_work) {
    double g1 = 0.0, g2 = 0.0;
    gauges(x, t, g1, g2);
    int initiated = 0, failed = 0;
    count_interfaces(states, initiated, failed);
    if (g1 > peaks.g1) {
      peaks.g1 = g1;
      peaks.g1_time = t;
    }
    if (initiated == 0) {
      peaks.g1_pre_initiation = std::max(peaks.g1_pre_initiation, g1);
    }
    if (failed == 0) {
      peaks.g1_pre_failure = std::max(peaks.g1_pre_failure, g1);
    }
    const bool last = step == n_steps;
    if (step % cfg.history_stride == 0 || last) {
      HistoryRow row;
      row.step = step;
      row.time = t;
      row.applied = applied_of(t);
      row.gauge1 = g1;
      row.gauge2 = g2;
      row.energy = assemble_energies(pb, x, states, t);
      row.energy.kinetic = 0.5 * v.dot(ml.cwiseProduct(v));
      row.energy.external_work = ext_work;
      row.initiated = initiated;
      row.failed = failed;
      res.history.push_back(row);
    }
    if (sink && cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0) {
      sink(step, t, pb, x);
    }
  };

  record(0, 0.0, st.x, st.v, 0.0);
  run_dynamics(pb, states, st, dt, n_steps,
               [&](const StepContext& ctx) {
                 record(ctx.step, ctx.state.t, ctx.state.x, ctx.state.v,
                        ctx.external_work);
               });

  res.x_final = st.x;
  res.steps = n_steps;
  res.states = std::move(states);
  build_summary(res, peaks);
  return res;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const SnapshotSink& sink) {
  ScenarioSetup setup = build_scenario(cfg);
  if (cfg.solver_kind == "newton") {
    return run_newton(cfg, std::move(setup), sink);
  }
  return run_explicit(cfg, std::move(setup), sink);
}

void write_outputs(const RunResult& res, const std::string& out_dir) {
  fs::create_directories(out_dir);
  {
    const fs::path path = fs::path(out_dir) / "history.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "step,time,applied,gauge1,gauge2,kinetic,elastic,penalty,"
           "cohesive,dissipated,ext_work,initiated,failed\n";
    for (const HistoryRow& r : res.history) {
      out << r.step << ',' << format_double(r.time) << ','
          << format_double(r.applied) << ',' << format_double(r.gauge1) << ','
          << format_double(r.gauge2) << ','
          << format_double(r.energy.kinetic) << ','
          << format_double(r.energy.elastic) << ','
          << format_double(r.energy.penalty) << ','
          << format_double(r.energy.cohesive_stored) << ','
          << format_double(r.energy.dissipated) << ','
          << format_double(r.energy.external_work) << ',' << r.initiated
          << ',' << r.failed << '\n';
    }
  }
  {
    const fs::path path = fs::path(out_dir) / "summary.txt";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& [key, value] : res.summary) {
      out << key << " = " << value << "\n";
    }
  }
  write_snapshot_csv(res.setup.problem, res.x_final, res.steps, out_dir);
  if (res.config.write_vtk) {
    write_vtk(res.setup.problem, res.x_final,
              (fs::path(out_dir) / "centerline.vtk").string());
  }
}

void write_snapshot_csv(const Problem& pb, const VecX& x, int step,
                        const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path path =
      fs::path(out_dir) / ("snapshot_" + std::to_string(step) + ".csv");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "node,s,x,y,z,tx,ty,tz,eps,kappa,axial_force,moment\n";
  for (int node = 0; node < pb.mesh.node_count(); ++node) {
    const int e = node / 2;
    const double xi = (node % 2 == 0) ? -1.0 : 1.0;
    const LocalKinematics k =
        interpolate(gather_element(pb.mesh, x, e), xi, pb.degeneracy_floor);
    out << node << ',' << format_double(pb.mesh.node_s[node]);
    for (int d = 0; d < 3; ++d) {
      out << ',' << format_double(x[pb.mesh.pos_dof(node, d)]);
    }
    for (int d = 0; d < 3; ++d) {
      out << ',' << format_double(x[pb.mesh.tan_dof(node, d)]);
    }
    out << ',' << format_double(k.eps) << ','
        << format_double(k.kappa.norm()) << ','
        << format_double(pb.section.EA() * k.eps) << ','
        << format_double((pb.section.EI() * k.kappa).norm()) << '\n';
  }
}

void write_vtk(const Problem& pb, const VecX& x, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  constexpr int kSamples = 5;
  const int E = pb.mesh.element_count;
  out << "# vtk DataFile Version 3.0\n"
      << "deformed centerline\n"
      << "ASCII\n"
      << "DATASET POLYDATA\n"
      << "POINTS " << E * kSamples << " double\n";
  for (int e = 0; e < E; ++e) {
    const ElementDofs el = gather_element(pb.mesh, x, e);
    for (int i = 0; i < kSamples; ++i) {
      const double xi = -1.0 + 2.0 * i / (kSamples - 1);
      const Vec3 r = interpolate(el, xi, pb.degeneracy_floor).r;
      out << format_double(r[0]) << ' ' << format_double(r[1]) << ' '
          << format_double(r[2]) << '\n';
    }
  }
  out << "LINES " << E << ' ' << E * (kSamples + 1) << '\n';
  for (int e = 0; e < E; ++e) {
    out << kSamples;
    for (int i = 0; i < kSamples; ++i) out << ' ' << e * kSamples + i;
    out << '\n';
  }
}

std::vector<ConvergenceRow> run_convergence(const ScenarioConfig& base,
                                            const std::vector<double>& betas,
                                            double h0, int levels) {
  if (base.kind != ScenarioKind::cantilever) {
    throw ConfigError("convergence study runs the cantilever roll-up");
  }
  if (base.end_moment > 0.0) {
    throw ConfigError(
        "convergence study uses the exact full-circle moment; leave "
        "end_moment unset");
  }
  if (levels < 1 || betas.empty()) {
    throw ConfigError("convergence study needs at least one beta and level");
  }
  const int cells = static_cast<int>(betas.size()) * levels;
  std::vector<ConvergenceRow> rows(cells);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  parallel_for(cells, [&](int c) {
    try {
      const double beta = betas[static_cast<size_t>(c) / levels];
      const int k = c % levels;
      ScenarioConfig cfg = base;
      cfg.beta_p = beta;
      cfg.beta_t = beta;
      cfg.element_size = h0 / static_cast<double>(1 << k);
      cfg.tol_rel = std::min(base.tol_rel, 1e-11);
      const ScenarioSetup setup = build_scenario(cfg);
      auto solve = [&](int steps) {
        NewtonSettings ns = setup.newton;
        ns.load_steps = steps;
        std::vector<InterfaceState> states =
            setup.problem.make_interface_states();
        VecX x0 = reference_state(setup.problem.mesh);
        const auto recs = newton_quasistatic(setup.problem, states, ns, &x0);
        return recs.back().x;
      };
      VecX xf;
      try {
        xf = solve(setup.newton.load_steps);
      } catch (const StepFailureError&) {
        xf = solve(4 * setup.newton.load_steps);
      }
      rows[c] = {cfg.element_size, beta,
                 cantilever_circle_error(setup.problem, xf), 0.0};
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);
  for (int c = 0; c < cells; ++c) {
    if (c % levels != 0) {
      rows[c].observed_order = std::log2(rows[c - 1].error / rows[c].error);
    }
  }
  return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "h,beta,error,observed_order\n";
  for (const ConvergenceRow& r : rows) {
    out << format_double(r.h) << ',' << format_double(r.beta) << ','
        << format_double(r.error) << ',' << format_double(r.observed_order)
        << '\n';
  }
}

}  // namespace beamfrac
