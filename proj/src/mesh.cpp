#include "beamfrac/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace beamfrac {

void BeamMesh::locate(double s, int& elem, double& xi) const {
  const double h = element_length[0];
  elem = std::clamp(static_cast<int>(s / h), 0, element_count - 1);
  // Guard against landing just outside due to rounding near interfaces; an
  // exact interface hit belongs to the element on its left.
  while (elem > 0 && s <= node_s[left_node(elem)]) --elem;
  while (elem + 1 < element_count && s > node_s[right_node(elem)]) ++elem;
  const double s0 = node_s[left_node(elem)];
  xi = 2.0 * (s - s0) / element_length[elem] - 1.0;
  xi = std::clamp(xi, -1.0, 1.0);
}

BeamMesh uniform_mesh(double length, int elements) {
  if (!(length > 0.0) || elements < 1) {
    throw std::invalid_argument("uniform_mesh: need positive length and >= 1 element");
  }
  BeamMesh m;
  m.element_count = elements;
  m.total_length = length;
  const double h = length / elements;
  m.element_length.assign(elements, h);
  m.node_s.resize(2 * elements);
  for (int e = 0; e < elements; ++e) {
    m.node_s[2 * e] = e * h;
    m.node_s[2 * e + 1] = (e + 1) * h;
  }
  return m;
}

VecX reference_state(const BeamMesh& mesh, const Vec3& axis) {
  VecX x = VecX::Zero(mesh.dof_count());
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec3 p = mesh.node_s[n] * axis;
    for (int d = 0; d < 3; ++d) {
      x[mesh.pos_dof(n, d)] = p[d];
      x[mesh.tan_dof(n, d)] = axis[d];
    }
  }
  return x;
}

ElementDofs gather_element(const BeamMesh& mesh, const VecX& x, int elem) {
  ElementDofs e;
  e.L = mesh.element_length[elem];
  const int n1 = mesh.left_node(elem);
  const int n2 = mesh.right_node(elem);
  for (int d = 0; d < 3; ++d) {
    e.p1[d] = x[mesh.pos_dof(n1, d)];
    e.t1[d] = x[mesh.tan_dof(n1, d)];
    e.p2[d] = x[mesh.pos_dof(n2, d)];
    e.t2[d] = x[mesh.tan_dof(n2, d)];
  }
  return e;
}

}  // namespace beamfrac
