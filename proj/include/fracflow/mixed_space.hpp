#ifndef FRACFLOW_MIXED_SPACE_HPP
#define FRACFLOW_MIXED_SPACE_HPP

#include <Eigen/Core>

#include "fracflow/mesh.hpp"

namespace fracflow {

using Vector = Eigen::VectorXd;

/// Lowest-order face elements for the fluxes and piecewise constants for
/// the pressures, with independent normal-trace unknowns on each side of
/// the fracture.
///
/// Flux DOFs, in order:
///   - one per non-fracture edge (edge flux w.r.t. the stored normal),
///   - two per fracture edge (the Omega_1-side trace, then the
///     Omega_2-side trace; coupling between them is weak only),
///   - one per fracture vertex (the scalar tangential flux of the 1D
///     lowest-order face element on the gamma polyline).
/// Pressure DOFs: one per triangle, then one per fracture segment.
struct MixedSpace {
  const Mesh* mesh = nullptr;
  int n_flux = 0;
  int n_pressure = 0;

  std::vector<int> edge_dof_side1;  // per edge; non-fracture edges: the single DOF
  std::vector<int> edge_dof_side2;  // per edge; == side1 except on fracture edges
  std::vector<int> frac_vertex_dof;  // K+1 entries, bottom to top; empty if no fracture
  int n_frac_vertices = 0;
  // Pressure DOF of triangle t is t; of fracture segment k is
  // (#triangles + k).
  int pressure_dof_of_segment(int k) const {
    return static_cast<int>(mesh->triangles.size()) + k;
  }

  /// Flux DOF seen from triangle t through its local edge k.
  int flux_dof(int t, int k) const {
    int e = mesh->triangles[t].edge[k];
    return mesh->triangles[t].subdomain == 1 ? edge_dof_side1[e] : edge_dof_side2[e];
  }

  /// +1 if the stored normal of local edge k points out of triangle t.
  double edge_sign(int t, int k) const {
    int e = mesh->triangles[t].edge[k];
    return mesh->edges[e].tri[0] == t ? 1.0 : -1.0;
  }
};

inline MixedSpace build_space(const Mesh& mesh) {
  if (!mesh.has_fracture())
    throw MeshError("build_space: the model requires a nonempty fracture; "
                    "use build_space_single for a plain domain");
  MixedSpace sp;
  sp.mesh = &mesh;
  sp.edge_dof_side1.resize(mesh.edges.size());
  sp.edge_dof_side2.resize(mesh.edges.size());
  int next = 0;
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    sp.edge_dof_side1[e] = next++;
    sp.edge_dof_side2[e] =
        (mesh.edges[e].kind == EdgeKind::Fracture) ? next++ : sp.edge_dof_side1[e];
  }
  sp.n_frac_vertices = static_cast<int>(mesh.fracture_segments.size()) + 1;
  sp.frac_vertex_dof.resize(sp.n_frac_vertices);
  for (int k = 0; k < sp.n_frac_vertices; ++k) sp.frac_vertex_dof[k] = next++;
  sp.n_flux = next;
  sp.n_pressure = static_cast<int>(mesh.triangles.size() + mesh.fracture_segments.size());
  return sp;
}

/// Plain single-domain variant (no fracture DOFs, no duplicated traces),
/// used for the simple-domain limit study.
inline MixedSpace build_space_single(const Mesh& mesh) {
  if (mesh.has_fracture())
    throw MeshError("build_space_single: mesh has a fracture; use build_space");
  MixedSpace sp;
  sp.mesh = &mesh;
  sp.edge_dof_side1.resize(mesh.edges.size());
  sp.edge_dof_side2.resize(mesh.edges.size());
  for (size_t e = 0; e < mesh.edges.size(); ++e)
    sp.edge_dof_side1[e] = sp.edge_dof_side2[e] = static_cast<int>(e);
  sp.n_flux = static_cast<int>(mesh.edges.size());
  sp.n_pressure = static_cast<int>(mesh.triangles.size());
  return sp;
}

/// Coefficient vectors for one discrete solution.
struct DiscreteState {
  Vector u;  // flux coefficients, length n_flux
  Vector p;  // pressure coefficients, length n_pressure

  static DiscreteState zero(const MixedSpace& sp) {
    DiscreteState s;
    s.u = Vector::Zero(sp.n_flux);
    s.p = Vector::Zero(sp.n_pressure);
    return s;
  }
};

namespace detail {

/// RT0 basis of triangle t for local edge k at point x, oriented with the
/// stored global edge normal: phi(x) = sign * (x - v_opp) / (2|T|), whose
/// edge flux through edge k is 1 and 0 through the others.
inline Vec2 rt0_basis(const Mesh& mesh, int t, int k, const Vec2& x) {
  const auto& tr = mesh.triangles[t];
  const Vec2& opp = mesh.vertices[tr.v[k]];
  double s = mesh.edges[tr.edge[k]].tri[0] == t ? 1.0 : -1.0;
  return (s / (2.0 * tr.area)) * (x - opp);
}

inline bool barycentric_inside(const Mesh& mesh, int t, const Vec2& x, double tol = 1e-12) {
  const auto& tr = mesh.triangles[t];
  const Vec2 &a = mesh.vertices[tr.v[0]], &b = mesh.vertices[tr.v[1]], &c = mesh.vertices[tr.v[2]];
  double l0 = signed_area(x, b, c) / tr.area;
  double l1 = signed_area(a, x, c) / tr.area;
  double l2 = signed_area(a, b, x) / tr.area;
  double slack = tol * 2.0;
  return l0 >= -slack && l1 >= -slack && l2 >= -slack;
}

}  // namespace detail

/// Velocity of the discrete flux field at a point inside triangle t.
inline Vec2 evaluate_flux(const MixedSpace& sp, const DiscreteState& state, int t,
                          const Vec2& x) {
  const Mesh& mesh = *sp.mesh;
  if (!detail::barycentric_inside(mesh, t, x))
    throw std::invalid_argument("evaluate_flux: point outside triangle");
  Vec2 v{0, 0};
  for (int k = 0; k < 3; ++k) {
    Vec2 phi = detail::rt0_basis(mesh, t, k, x);
    double c = state.u[sp.flux_dof(t, k)];
    v = v + c * phi;
  }
  return v;
}

/// Piecewise divergence of the discrete flux on triangle t.
inline double cell_divergence(const MixedSpace& sp, const DiscreteState& state, int t) {
  const Mesh& mesh = *sp.mesh;
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) sum += sp.edge_sign(t, k) * state.u[sp.flux_dof(t, k)];
  return sum / mesh.triangles[t].area;
}

/// Edge-flux interpolant of an analytic velocity field (per subdomain):
/// DOF = integral of field . n over the edge (3-point Gauss).
template <class F>
inline void interpolate_flux(const MixedSpace& sp, F&& field, Vector& u) {
  const Mesh& mesh = *sp.mesh;
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    Vec2 a = mesh.vertices[ed.a], b = mesh.vertices[ed.b];
    for (int side = 0; side < 2; ++side) {
      int dof = side == 0 ? sp.edge_dof_side1[e] : sp.edge_dof_side2[e];
      if (side == 1 && dof == sp.edge_dof_side1[e]) continue;
      int subdomain = (ed.kind == EdgeKind::Fracture)
                          ? side + 1
                          : mesh.triangles[ed.tri[0]].subdomain;
      double flux = 0.0;
      for (int q = 0; q < 3; ++q) {
        Vec2 x = a + (b - a) * (0.5 * (gx[q] + 1.0));
        flux += 0.5 * gw[q] * ed.length * field(subdomain, x).dot(ed.normal);
      }
      u[dof] = flux;
    }
  }
}

}  // namespace fracflow

#endif  // FRACFLOW_MIXED_SPACE_HPP
