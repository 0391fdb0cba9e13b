#include <random>
#include <vector>

#include "beamfrac/assembly.hpp"
#include "doctest.h"

using namespace beamfrac;

namespace {

Problem make_problem(bool with_cohesive) {
  Problem pb;
  pb.mesh = uniform_mesh(0.9, 3);
  pb.section = make_section(10e9, 2000.0, 0.02);
  pb.penalties = {10.0, 10.0};
  if (with_cohesive) {
    pb.cohesive = make_cohesive_params(50e6, 200.0, 1.0, pb.section);
  }
  return pb;
}

VecX random_state(const Problem& pb, std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  VecX x = reference_state(pb.mesh);
  for (int i = 0; i < x.size(); ++i) x[i] += u(rng);
  return x;
}

// Central-difference tangent of the residual with frozen interface states.
MatX fd_stiffness(const Problem& pb, const VecX& x,
                  const std::vector<InterfaceState>& states) {
  const int n = static_cast<int>(x.size());
  MatX K(n, n);
  VecX xp = x;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    std::vector<InterfaceState> sp = states;
    xp[j] = x[j] + h;
    const VecX rp = assemble_residual(pb, xp, sp, 0.0);
    sp = states;
    xp[j] = x[j] - h;
    const VecX rm = assemble_residual(pb, xp, sp, 0.0);
    xp[j] = x[j];
    K.col(j) = (rp - rm) / (2.0 * h);
  }
  return K;
}

double relative_error(const SpMat& K, const MatX& fd) {
  const MatX dense = MatX(K);
  return (dense - fd).norm() / fd.norm();
}

}  // namespace

TEST_CASE("analytic stiffness matches finite differences at random states") {
  std::mt19937 rng(1234);
  for (bool cohesive : {false, true}) {
    Problem pb = make_problem(cohesive);
    for (int trial = 0; trial < 10; ++trial) {
      const VecX x = random_state(pb, rng, 0.02);
      std::vector<InterfaceState> states = pb.make_interface_states();
      const SpMat K = assemble_stiffness(pb, x, states, 0.0);
      std::vector<InterfaceState> frozen = pb.make_interface_states();
      const MatX fd = fd_stiffness(pb, x, frozen);
      CHECK(relative_error(K, fd) < 1e-6);
    }
  }
}

TEST_CASE("stiffness covers the configuration-dependent external moment") {
  std::mt19937 rng(77);
  Problem pb = make_problem(false);
  pb.loads.end_moment[1] = [](double t) { return Vec3(0.0, 0.0, 50.0 * t); };
  const VecX x = random_state(pb, rng, 0.02);
  std::vector<InterfaceState> states = pb.make_interface_states();
  const SpMat K = assemble_stiffness(pb, x, states, 1.0);

  // FD of the full residual at fixed t = 1.
  const int n = static_cast<int>(x.size());
  MatX fd(n, n);
  VecX xp = x;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    std::vector<InterfaceState> s1 = pb.make_interface_states();
    std::vector<InterfaceState> s2 = pb.make_interface_states();
    xp[j] = x[j] + h;
    const VecX rp = assemble_residual(pb, xp, s1, 1.0);
    xp[j] = x[j] - h;
    const VecX rm = assemble_residual(pb, xp, s2, 1.0);
    xp[j] = x[j];
    fd.col(j) = (rp - rm) / (2.0 * h);
  }
  CHECK(relative_error(K, fd) < 1e-6);
}

TEST_CASE("post-initiation interfaces use a consistent local tangent") {
  std::mt19937 rng(5150);
  Problem pb = make_problem(true);
  VecX x = random_state(pb, rng, 0.01);
  // Open interface 1 partway through the envelope.
  const double gap = 0.3 * pb.cohesive->Delta_c;
  for (int n = pb.mesh.plus_node(1); n < pb.mesh.node_count(); ++n) {
    x[pb.mesh.pos_dof(n, 0)] += gap;
  }
  std::vector<InterfaceState> states = pb.make_interface_states();
  states[1].alpha_intact = false;
  states[1].delta_max = 0.5 * pb.cohesive->Delta_c;
  states[1].f_max = 0.5 * pb.cohesive->f_c;
  states[1].cached_normal = Vec3::UnitX();
  states[1].has_cached_normal = true;

  std::vector<InterfaceState> sk = states;
  const SpMat K = assemble_stiffness(pb, x, sk, 0.0);
  const MatX fd = fd_stiffness(pb, x, states);
  // Both sides are finite-difference approximations here; they agree to the
  // truncation level, not machine precision.
  CHECK(relative_error(K, fd) < 1e-5);
}
