#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beamfrac/config_io.hpp"
#include "beamfrac/run_io.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir,
                int stride, int snapshot_stride, bool vtk) {
  beamfrac::ScenarioConfig cfg = beamfrac::load_config(config_path);
  if (stride > 0) cfg.history_stride = stride;
  if (snapshot_stride >= 0) cfg.snapshot_stride = snapshot_stride;
  if (vtk) cfg.write_vtk = true;

  beamfrac::SnapshotSink sink;
  if (cfg.snapshot_stride > 0) {
    sink = [&out_dir](int step, double, const beamfrac::Problem& pb,
                      const beamfrac::VecX& x) {
      beamfrac::write_snapshot_csv(pb, x, step, out_dir);
    };
  }
  const beamfrac::RunResult res = beamfrac::run_scenario(cfg, sink);
  beamfrac::write_outputs(res, out_dir);
  for (const auto& [key, value] : res.summary) {
    std::cout << key << " = " << value << "\n";
  }
  std::cout << "wrote " << out_dir << " (" << res.history.size()
            << " history rows)\n";
  return 0;
}

int converge_command(const std::string& config_path,
                     const std::string& out_dir, double h0, int levels) {
  const beamfrac::ScenarioConfig cfg = beamfrac::load_config(config_path);
  const std::vector<double> betas = {10.0, 100.0, 1000.0};
  const auto rows = beamfrac::run_convergence(cfg, betas, h0, levels);
  std::filesystem::create_directories(out_dir);
  beamfrac::write_convergence_csv(rows, out_dir + "/convergence.csv");
  std::cout << "h,beta,error,observed_order\n";
  for (const auto& r : rows) {
    std::cout << beamfrac::format_double(r.h) << ','
              << beamfrac::format_double(r.beta) << ','
              << beamfrac::format_double(r.error) << ','
              << beamfrac::format_double(r.observed_order) << "\n";
  }
  std::cout << "wrote " << out_dir << "/convergence.csv\n";
  return 0;
}

int eigen_command(const std::string& config_path) {
  const beamfrac::ScenarioConfig cfg = beamfrac::load_config(config_path);
  const beamfrac::ScenarioSetup setup = beamfrac::build_scenario(cfg);
  std::vector<beamfrac::InterfaceState> states =
      setup.problem.make_interface_states();
  const beamfrac::VecX x0 = beamfrac::reference_state(setup.problem.mesh);
  const beamfrac::TimestepEstimate est =
      beamfrac::stable_timestep(setup.problem, x0, states);
  std::cout << "omega_max = " << beamfrac::format_double(est.omega_max)
            << "\ndt_crit = " << beamfrac::format_double(est.dt_crit) << "\n";
  return 0;
}

int list_command() {
  std::cout
      << "cantilever  quasi-static roll-up of a clamped rod under an end "
         "moment\n"
      << "buckling    displacement-driven pinned column with a transverse "
         "nudge\n"
      << "spall       symmetric tensile-wave release with a center fracture "
         "plane\n"
      << "transverse  clamped beam pulled transversely at its midpoint\n"
      << "spaghetti   bent rod released from a clamp, fracturing "
         "dynamically\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometrically exact beam fracture simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int stride = 0;
  int snapshot_stride = -1;
  int levels = 7;
  double h0 = 0.125;
  bool vtk = false;

  CLI::App* run = app.add_subcommand("run", "run one scenario config");
  run->add_option("config", config_path, "config file path")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--stride", stride, "history row stride override");
  run->add_option("--snapshot-stride", snapshot_stride,
                  "snapshot stride override (0 disables)");
  run->add_flag("--vtk", vtk, "also write a VTK centerline");

  CLI::App* conv =
      app.add_subcommand("converge", "mesh refinement study of the roll-up");
  conv->add_option("config", config_path, "cantilever config file")
      ->required();
  conv->add_option("--out", out_dir, "output directory (default: out)");
  conv->add_option("--levels", levels, "number of uniform refinements");
  conv->add_option("--h0", h0, "coarsest element size");

  CLI::App* eig =
      app.add_subcommand("eigen", "report the stable explicit time step");
  eig->add_option("config", config_path, "config file path")->required();

  app.add_subcommand("list", "list the scenario kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      return run_command(config_path, out_dir, stride, snapshot_stride, vtk);
    }
    if (conv->parsed()) {
      return converge_command(config_path, out_dir, h0, levels);
    }
    if (eig->parsed()) {
      return eigen_command(config_path);
    }
    return list_command();
  } catch (const beamfrac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const beamfrac::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}
