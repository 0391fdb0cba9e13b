#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "beamfrac/assembly.hpp"
#include "beamfrac/scenarios.hpp"
#include "beamfrac/solvers.hpp"

namespace beamfrac {

/// One sampled row of a run history. `time` is the load factor for
/// quasi-static runs and physical time for explicit runs; gauge1/gauge2 are
/// scenario probes (see gauge_labels).
struct HistoryRow {
  int step = 0;
  double time = 0.0;
  double applied = 0.0;
  double gauge1 = 0.0;
  double gauge2 = 0.0;
  EnergyReport energy;
  int initiated = 0;  // interfaces past initiation
  int failed = 0;     // fully failed interfaces
};

/// Names of the two gauge columns for a scenario kind.
void gauge_labels(ScenarioKind k, std::string& g1, std::string& g2);

/// Snapshot callback: step index, time (or load factor), problem, state.
using SnapshotSink =
    std::function<void(int step, double time, const Problem&, const VecX&)>;

/// Complete result of one scenario run.
struct RunResult {
  ScenarioKind kind = ScenarioKind::cantilever;
  ScenarioConfig config;
  ScenarioSetup setup;  // the problem that was marched (preload excluded)
  std::vector<HistoryRow> history;
  VecX x_final;
  std::vector<InterfaceState> states;
  double dt = 0.0;          // explicit step actually used (0 for Newton runs)
  TimestepEstimate timestep;  // stability estimate (explicit runs)
  int steps = 0;            // total steps marched
  std::vector<std::pair<std::string, std::string>> summary;
};

/// Runs a configured scenario start to finish. The sink, when set and
/// snapshot_stride > 0, is invoked every snapshot_stride steps.
RunResult run_scenario(const ScenarioConfig& cfg,
                       const SnapshotSink& sink = nullptr);

/// Relative L2 centerline error against the analytic arc bent by the given
/// end moment (curvature moment / EI). Returns 0 at zero moment.
double cantilever_arc_error(const Problem& pb, const VecX& x, double moment);

/// E times the axial strain at arc length s; both limits are averaged when s
/// falls on a duplicated interface node.
double axial_stress_at(const Problem& pb, const VecX& x, double s);

/// Buckling detection over a recorded history: fits the pre-critical
/// midpoint deflection (gauge2) linearly through the origin over the leading
/// `fit_fraction` of rows, then returns the axial reaction magnitude
/// (gauge1) at the first row whose deflection exceeds `multiplier` times the
/// fit. Throws Error when no departure occurs.
double detect_buckling_load(const std::vector<HistoryRow>& history,
                            double fit_fraction = 0.1,
                            double multiplier = 100.0);

/// Locale-independent shortest-round-trip formatting of a double.
std::string format_double(double v);

/// Writes history.csv, summary.txt, the final snapshot CSV and (when
/// configured) a legacy VTK centerline into out_dir.
void write_outputs(const RunResult& res, const std::string& out_dir);

/// Writes out_dir/snapshot_<step>.csv with one row per node.
void write_snapshot_csv(const Problem& pb, const VecX& x, int step,
                        const std::string& out_dir);

/// Writes a legacy ASCII VTK polyline of the deformed centerline.
void write_vtk(const Problem& pb, const VecX& x, const std::string& path);

/// One cell of the roll-up convergence study.
struct ConvergenceRow {
  double h = 0.0;
  double beta = 0.0;
  double error = 0.0;  // relative L2 centerline error at full load
  double observed_order = 0.0;  // log2(coarser error / error); 0 on level 0
};

/// Runs the full-circle roll-up for every (beta, h0 / 2^k) cell, k < levels,
/// with a tightened Newton tolerance. The base config must use the exact
/// full-circle moment (end_moment = 0). A cell that stalls is retried once
/// with four times the load steps.
std::vector<ConvergenceRow> run_convergence(const ScenarioConfig& base,
                                            const std::vector<double>& betas,
                                            double h0, int levels);

/// Writes h,beta,error,observed_order rows.
void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path);

}  // namespace beamfrac
