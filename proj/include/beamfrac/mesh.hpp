#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "beamfrac/cohesive.hpp"
#include "beamfrac/kinematics.hpp"
#include "beamfrac/types.hpp"

namespace beamfrac {

/// One-dimensional chain of Hermite elements with duplicated interface nodes.
///
/// Element e owns nodes 2e and 2e+1; interface i (i = 0 .. E-2) couples the
/// right node of element i (minus side) with the left node of element i+1
/// (plus side). Each node carries 6 DOFs: position xyz then tangent xyz.
struct BeamMesh {
  int element_count = 0;
  std::vector<double> element_length;  // h_e
  std::vector<double> node_s;          // reference arc length of each node
  double total_length = 0.0;

  static constexpr int dofs_per_node = 6;
  int node_count() const { return 2 * element_count; }
  int dof_count() const { return dofs_per_node * node_count(); }
  int interface_count() const { return element_count - 1; }

  int left_node(int elem) const { return 2 * elem; }
  int right_node(int elem) const { return 2 * elem + 1; }
  int minus_node(int iface) const { return 2 * iface + 1; }
  int plus_node(int iface) const { return 2 * iface + 2; }
  int pos_dof(int node, int axis) const {
    return dofs_per_node * node + axis;
  }
  int tan_dof(int node, int axis) const {
    return dofs_per_node * node + 3 + axis;
  }

  /// First global DOF of element e (its 12 DOFs are contiguous).
  int elem_dof0(int elem) const { return dofs_per_node * left_node(elem); }

  /// Interface arc-length position (right end of element i).
  double interface_s(int iface) const { return node_s[minus_node(iface)]; }

  /// Element containing arc length s (ties resolved to the left element) and
  /// the local coordinate xi.
  void locate(double s, int& elem, double& xi) const;
};

/// Uniform mesh of `elements` elements on [0, length].
BeamMesh uniform_mesh(double length, int elements);

/// Reference (straight) configuration along the given unit axis: positions on
/// the line, tangents equal to the axis.
VecX reference_state(const BeamMesh& mesh, const Vec3& axis = Vec3::UnitX());

/// Gathers one element's DOFs from the global state vector.
ElementDofs gather_element(const BeamMesh& mesh, const VecX& x, int elem);

/// Interior-penalty weights; both must exceed 1.
struct PenaltyParams {
  double beta_p = 10.0;
  double beta_t = 10.0;
};

/// Time- (or load-factor-) dependent Dirichlet constraint on one DOF.
/// `value` returns the absolute DOF value (position coordinate or tangent
/// component) at parameter t.
struct DirichletBC {
  int dof = -1;
  std::function<double(double)> value;
};

/// Concentrated nodal force (enters a single position-DOF block).
struct PointForce {
  int node = -1;
  std::function<Vec3(double)> force;
};

/// External actions, all parameterized by t (load factor for quasi-statics,
/// physical time for dynamics). Null functions mean "absent".
struct LoadSpec {
  std::function<Vec3(double, double)> distributed_force;   // f(s, t)
  std::function<Vec3(double, double)> distributed_moment;  // m_perp(s, t)
  std::function<Vec3(double)> end_force[2];                // s = 0 / s = L
  std::function<Vec3(double)> end_moment[2];
  std::vector<PointForce> point_forces;
  std::vector<DirichletBC> dirichlet;
};

/// Complete discrete problem: geometry, constitutive data, coupling weights,
/// optional fracture model and external actions.
struct Problem {
  BeamMesh mesh;
  MaterialSection section;
  PenaltyParams penalties;
  std::optional<CohesiveParams> cohesive;  // nullopt = fracture disabled
  LoadSpec loads;
  double degeneracy_floor = 1e-12;

  bool fracture_enabled() const { return cohesive.has_value(); }
  std::vector<InterfaceState> make_interface_states() const {
    return std::vector<InterfaceState>(mesh.interface_count());
  }
};

}  // namespace beamfrac
