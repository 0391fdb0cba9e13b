#include "beamfrac/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>

namespace beamfrac {

// ===========================================================================
// Dirichlet partition helpers
// ===========================================================================

DofPartition make_partition(const Problem& pb) {
  const int n = pb.mesh.dof_count();
  DofPartition part;
  part.full_to_free.assign(n, 0);
  for (const DirichletBC& bc : pb.loads.dirichlet) {
    if (bc.dof < 0 || bc.dof >= n) {
      throw std::invalid_argument("make_partition: Dirichlet DOF out of range");
    }
    part.full_to_free[bc.dof] = -1;
  }
  for (int i = 0; i < n; ++i) {
    if (part.full_to_free[i] == -1) {
      part.constrained.push_back(i);
    } else {
      part.full_to_free[i] = static_cast<int>(part.free_dofs.size());
      part.free_dofs.push_back(i);
    }
  }
  return part;
}

void apply_dirichlet(const Problem& pb, VecX& x, double t) {
  for (const DirichletBC& bc : pb.loads.dirichlet) x[bc.dof] = bc.value(t);
}

SpMat reduce_matrix(const SpMat& K, const DofPartition& part) {
  std::vector<Triplet> trip;
  trip.reserve(K.nonZeros());
  for (int col = 0; col < K.outerSize(); ++col) {
    const int fc = part.full_to_free[col];
    if (fc < 0) continue;
    for (SpMat::InnerIterator it(K, col); it; ++it) {
      const int fr = part.full_to_free[it.row()];
      if (fr >= 0) trip.emplace_back(fr, fc, it.value());
    }
  }
  SpMat R(part.n_free(), part.n_free());
  R.setFromTriplets(trip.begin(), trip.end());
  return R;
}

namespace {

VecX gather_free(const VecX& full, const DofPartition& part) {
  VecX r(part.n_free());
  for (int i = 0; i < part.n_free(); ++i) r[i] = full[part.free_dofs[i]];
  return r;
}

void scatter_add_free(VecX& full, const VecX& vals, const DofPartition& part) {
  for (int i = 0; i < part.n_free(); ++i) full[part.free_dofs[i]] += vals[i];
}

}  // namespace

// ===========================================================================
// Quasi-static Newton
// ===========================================================================

std::vector<QuasiStaticRecord> newton_quasistatic(
    const Problem& pb, std::vector<InterfaceState>& states,
    const NewtonSettings& settings, const VecX* x0,
    const std::function<void(const QuasiStaticRecord&)>& on_step) {
  const DofPartition part = make_partition(pb);
  VecX x = x0 ? *x0 : reference_state(pb.mesh);
  const double tol_abs = settings.tol_abs_scale * pb.section.EA();

  std::vector<QuasiStaticRecord> records;
  records.reserve(settings.load_steps);

  for (int step = 1; step <= settings.load_steps; ++step) {
    const double lam =
        static_cast<double>(step) / static_cast<double>(settings.load_steps);
    apply_dirichlet(pb, x, lam);

    bool converged = false;
    double rnorm = 0.0;
    int iters = 0;
    VecX residual;
    for (int it = 0; it <= settings.max_iters; ++it) {
      residual = assemble_residual(pb, x, states, lam);
      const VecX fext = assemble_external(pb, x, lam);
      const double fnorm = gather_free(fext, part).norm();
      rnorm = gather_free(residual, part).norm();
      const double tol = std::max(tol_abs, settings.tol_rel * fnorm);
      if (rnorm < tol) {
        converged = true;
        iters = it;
        break;
      }
      if (it == settings.max_iters) break;

      const SpMat K = assemble_stiffness(pb, x, states, lam);
      const SpMat Kff = reduce_matrix(K, part);
      Eigen::SparseLU<SpMat> lu;
      lu.compute(Kff);
      if (lu.info() != Eigen::Success) {
        throw LinearSolveError("newton_quasistatic: singular tangent at step " +
                               std::to_string(step));
      }
      const VecX dx = lu.solve(-gather_free(residual, part));
      if (!dx.allFinite()) {
        throw LinearSolveError(
            "newton_quasistatic: non-finite Newton increment at step " +
            std::to_string(step));
      }
      scatter_add_free(x, dx, part);
    }
    if (!converged) {
      throw StepFailureError(
          "newton_quasistatic: step " + std::to_string(step) +
              " failed to converge (residual " + std::to_string(rnorm) + ")",
          rnorm);
    }
    update_interface_states(pb, x, states, lam);

    QuasiStaticRecord rec;
    rec.load_factor = lam;
    rec.x = x;
    rec.residual = residual;
    rec.iterations = iters;
    if (on_step) on_step(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

// ===========================================================================
// Critical timestep
// ===========================================================================

namespace {

// Largest |eigenvalue| of the dense operator via restarted Arnoldi with a
// fixed-seed start vector (deterministic across runs).
double spectral_radius_arnoldi(
    const std::function<VecX(const VecX&)>& apply, int n) {
  const int m = std::min(n, 120);
  std::mt19937 rng(20240817u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecX start(n);
  for (int i = 0; i < n; ++i) start[i] = gauss(rng);
  start.normalize();

  double rho_prev = 0.0;
  for (int restart = 0; restart < 6; ++restart) {
    MatX V(n, m + 1);
    MatX H = MatX::Zero(m + 1, m);
    V.col(0) = start;
    int k = m;
    for (int j = 0; j < m; ++j) {
      VecX w = apply(V.col(j));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      for (int i = 0; i <= j; ++i) {  // one re-orthogonalization pass
        const double c = V.col(i).dot(w);
        H(i, j) += c;
        w -= c * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) < 1e-14) {
        k = j + 1;
        break;
      }
      V.col(j + 1) = w / H(j + 1, j);
    }
    Eigen::EigenSolver<MatX> es(H.topLeftCorner(k, k));
    int imax = 0;
    double rho = 0.0;
    for (int i = 0; i < k; ++i) {
      const double a = std::abs(es.eigenvalues()[i]);
      if (a > rho) {
        rho = a;
        imax = i;
      }
    }
    // Restart from the dominant Ritz vector (real part).
    VecX ritz = VecX::Zero(n);
    for (int j = 0; j < k; ++j) {
      ritz += es.eigenvectors()(j, imax).real() * V.col(j);
    }
    if (ritz.norm() > 1e-14) start = ritz.normalized();
    if (rho_prev > 0.0 && std::abs(rho - rho_prev) < 1e-8 * rho) {
      return rho;
    }
    rho_prev = rho;
  }
  return rho_prev;
}

}  // namespace

TimestepEstimate stable_timestep(const Problem& pb, const VecX& x,
                                 std::vector<InterfaceState>& states, double t,
                                 int dense_limit) {
  const DofPartition part = make_partition(pb);
  const SpMat K = assemble_stiffness(pb, x, states, t);
  const SpMat Kff = reduce_matrix(K, part);
  const VecX mlump = lumped_mass(pb);
  VecX minv(part.n_free());
  for (int i = 0; i < part.n_free(); ++i) {
    minv[i] = 1.0 / mlump[part.free_dofs[i]];
  }

  double rho = 0.0;
  if (part.n_free() <= dense_limit) {
    MatX A = MatX(Kff);
    for (int i = 0; i < part.n_free(); ++i) A.row(i) *= minv[i];
    Eigen::EigenSolver<MatX> es(A, /*computeEigenvectors=*/false);
    for (int i = 0; i < part.n_free(); ++i) {
      rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    }
  } else {
    rho = spectral_radius_arnoldi(
        [&](const VecX& v) -> VecX {
          return minv.asDiagonal() * (Kff * v);
        },
        part.n_free());
  }

  TimestepEstimate est;
  est.omega_max = std::sqrt(rho);
  est.dt_crit = est.omega_max > 0.0
                    ? 2.0 / est.omega_max
                    : std::numeric_limits<double>::infinity();
  return est;
}

// ===========================================================================
// Explicit dynamics
// ===========================================================================

namespace {

double dirichlet_velocity(const DirichletBC& bc, double t, double eps) {
  return (bc.value(t + eps) - bc.value(t - eps)) / (2.0 * eps);
}

double dirichlet_accel(const DirichletBC& bc, double t, double eps) {
  return (bc.value(t + eps) - 2.0 * bc.value(t) + bc.value(t - eps)) /
         (eps * eps);
}

}  // namespace

void init_dynamics(const Problem& pb, std::vector<InterfaceState>& states,
                   DynamicState& st) {
  const int n = pb.mesh.dof_count();
  if (st.x.size() != n) st.x = reference_state(pb.mesh);
  if (st.v.size() != n) st.v = VecX::Zero(n);
  st.a = VecX::Zero(n);
  apply_dirichlet(pb, st.x, st.t);

  const VecX mlump = lumped_mass(pb);
  const DofPartition part = make_partition(pb);
  const VecX r = assemble_residual(pb, st.x, states, st.t);
  for (int i : part.free_dofs) st.a[i] = -r[i] / mlump[i];
  const double eps = 1e-8;
  for (const DirichletBC& bc : pb.loads.dirichlet) {
    st.v[bc.dof] = dirichlet_velocity(bc, st.t, eps);
    st.a[bc.dof] = dirichlet_accel(bc, st.t, eps);
  }
}

void run_dynamics(const Problem& pb, std::vector<InterfaceState>& states,
                  DynamicState& st, double dt, int n_steps,
                  const std::function<void(const StepContext&)>& per_step) {
  const DofPartition part = make_partition(pb);
  const VecX mlump = lumped_mass(pb);
  const double deriv_eps = std::abs(dt);

  VecX fext_prev = assemble_external(pb, st.x, st.t);
  VecX resid_prev = assemble_residual(pb, st.x, states, st.t);
  double ext_work = 0.0;

  for (int step = 1; step <= n_steps; ++step) {
    const double t1 = st.t + dt;
    const VecX x_prev = st.x;

    // Position predictor, then exact Dirichlet values at the new time.
    st.x += dt * st.v + (0.5 * dt * dt) * st.a;
    for (const DirichletBC& bc : pb.loads.dirichlet) {
      st.x[bc.dof] = bc.value(t1);
    }

    const VecX resid = assemble_residual(pb, st.x, states, t1);
    VecX a_new = VecX::Zero(st.a.size());
    for (int i : part.free_dofs) a_new[i] = -resid[i] / mlump[i];

    st.v += (0.5 * dt) * (st.a + a_new);
    st.a = a_new;
    for (const DirichletBC& bc : pb.loads.dirichlet) {
      st.v[bc.dof] = dirichlet_velocity(bc, t1, deriv_eps);
      st.a[bc.dof] = dirichlet_accel(bc, t1, deriv_eps);
    }
    st.t = t1;

    if (!st.v.allFinite() || !st.x.allFinite()) {
      throw DivergenceError("run_dynamics: non-finite state at step " +
                            std::to_string(step));
    }

    // External work: trapezoid of load forces over all DOFs plus support
    // reactions over the constrained DOFs.
    const VecX fext = assemble_external(pb, st.x, t1);
    const VecX dx = st.x - x_prev;
    ext_work += 0.5 * (fext_prev + fext).dot(dx);
    for (int d : part.constrained) {
      ext_work += 0.5 * (resid_prev[d] + resid[d]) * dx[d];
    }
    fext_prev = fext;
    resid_prev = resid;

    update_interface_states(pb, st.x, states, t1);

    if (per_step) {
      StepContext ctx{step, st, resid, ext_work};
      per_step(ctx);
    }
  }
}

}  // namespace beamfrac
