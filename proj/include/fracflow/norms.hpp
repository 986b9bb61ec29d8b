#ifndef FRACFLOW_NORMS_HPP
#define FRACFLOW_NORMS_HPP

#include "fracflow/assembly.hpp"

namespace fracflow {

namespace quad {

// Degree-4 exact 6-point rule on the reference triangle (barycentric
// orbits), weights summing to 1.
struct TriPoint {
  double l0, l1, l2, w;
};
inline const std::array<TriPoint, 6>& tri_degree4() {
  static const double wa = 0.223381589678011, a = 0.445948490915965;
  static const double wb = 0.109951743655322, b = 0.091576213509771;
  static const std::array<TriPoint, 6> pts = {{
      {a, a, 1 - 2 * a, wa},
      {a, 1 - 2 * a, a, wa},
      {1 - 2 * a, a, a, wa},
      {b, b, 1 - 2 * b, wb},
      {b, 1 - 2 * b, b, wb},
      {1 - 2 * b, b, b, wb},
  }};
  return pts;
}

// 3-point Gauss-Legendre on [0,1], degree 5.
struct LinePoint {
  double t, w;
};
inline const std::array<LinePoint, 3>& line_gauss3() {
  static const std::array<LinePoint, 3> pts = {{
      {0.5 * (1 - 0.7745966692414834), 5.0 / 18.0},
      {0.5, 8.0 / 18.0},
      {0.5 * (1 + 0.7745966692414834), 5.0 / 18.0},
  }};
  return pts;
}

}  // namespace quad

/// Per-field norms of a discrete state in the norm families used by the
/// flux and pressure spaces; all by quadrature (L2 flux norms exact,
/// L3 / L3/2 via the degree-4 rule).
struct NormBundle {
  double u1_02 = 0, u2_02 = 0;          // ||u_i||_{0,2,Omega_i}
  double u1_03 = 0, u2_03 = 0;          // ||u_i||_{0,3,Omega_i}
  double ugamma_02 = 0, ugamma_03 = 0;  // ||u_gamma|| on gamma
  double trace1_02 = 0, trace2_02 = 0;  // ||u_i.n||_{0,2,gamma}
  double div1_02 = 0, div2_02 = 0, divgamma_02 = 0;  // components of Div u, L2
  double div1_03 = 0, div2_03 = 0, divgamma_03 = 0;  // components of Div u, L3
  double p1_02 = 0, p2_02 = 0;            // ||p_i||_{0,2}
  double p1_032 = 0, p2_032 = 0;          // ||p_i||_{0,3/2}
  double pgamma_032 = 0;                  // ||p_gamma||_{0,3/2}

  // l1-combined quantities, matching the product-space norms.
  double u_02() const { return u1_02 + u2_02 + ugamma_02; }
  double u_03() const { return u1_03 + u2_03 + ugamma_03; }
  double u_matrix_03() const { return u1_03 + u2_03; }
  double div_02() const { return div1_02 + div2_02 + divgamma_02; }
  double div_03() const { return div1_03 + div2_03 + divgamma_03; }
  double p_032() const { return p1_032 + p2_032 + pgamma_032; }
  double trace_02() const { return trace1_02 + trace2_02; }
  /// Discrete W-norm: ||u||_V + ||Div u|| + sum_i ||u_i.n||_{0,2,gamma}.
  double w_norm() const { return u_02() + div_02() + trace_02(); }
};

inline NormBundle compute_norms(const MixedSpace& sp, const DiscreteState& state) {
  const Mesh& mesh = *sp.mesh;
  NormBundle n;
  double i2[3] = {0, 0, 0}, i3[3] = {0, 0, 0};          // sum |u|^p per subdomain
  double d2[3] = {0, 0, 0}, d3[3] = {0, 0, 0};          // divergence powers
  double p2[3] = {0, 0, 0}, p32[3] = {0, 0, 0};         // pressure powers

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    int s = tr.subdomain;
    const Vec2 &A = mesh.vertices[tr.v[0]], &B = mesh.vertices[tr.v[1]],
               &C = mesh.vertices[tr.v[2]];
    for (const auto& q : quad::tri_degree4()) {
      Vec2 x = q.l0 * A + q.l1 * B + q.l2 * C;
      Vec2 u = evaluate_flux(sp, state, t, x);
      double m = u.norm();
      i2[s] += q.w * tr.area * m * m;
      i3[s] += q.w * tr.area * m * m * m;
    }
    double dv = std::abs(cell_divergence(sp, state, t));
    d2[s] += tr.area * dv * dv;
    d3[s] += tr.area * dv * dv * dv;
    double pv = std::abs(state.p[t]);
    p2[s] += tr.area * pv * pv;
    p32[s] += tr.area * std::pow(pv, 1.5);
  }

  double ig2 = 0, ig3 = 0, dg2 = 0, dg3 = 0, pg32 = 0, tr2[3] = {0, 0, 0};
  for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
    int e = mesh.fracture_segments[k];
    double len = mesh.edges[e].length;
    double ua = state.u[sp.frac_vertex_dof[k]];
    double ub = state.u[sp.frac_vertex_dof[k + 1]];
    for (const auto& q : quad::line_gauss3()) {
      double v = std::abs((1 - q.t) * ua + q.t * ub);
      ig2 += q.w * len * v * v;
      ig3 += q.w * len * v * v * v;
    }
    double U1 = state.u[sp.edge_dof_side1[e]], U2 = state.u[sp.edge_dof_side2[e]];
    double dv = std::abs((ub - ua) - (U1 - U2)) / len;  // (div_gamma u - jump) on the segment
    dg2 += len * dv * dv;
    dg3 += len * dv * dv * dv;
    tr2[1] += U1 * U1 / len;  // constant trace U/|e| over length |e|
    tr2[2] += U2 * U2 / len;
    double pv = std::abs(state.p[sp.pressure_dof_of_segment(k)]);
    pg32 += len * std::pow(pv, 1.5);
  }

  n.u1_02 = std::sqrt(i2[1]);
  n.u2_02 = std::sqrt(i2[2]);
  n.u1_03 = std::cbrt(i3[1]);
  n.u2_03 = std::cbrt(i3[2]);
  n.ugamma_02 = std::sqrt(ig2);
  n.ugamma_03 = std::cbrt(ig3);
  n.trace1_02 = std::sqrt(tr2[1]);
  n.trace2_02 = std::sqrt(tr2[2]);
  n.div1_02 = std::sqrt(d2[1]);
  n.div2_02 = std::sqrt(d2[2]);
  n.div1_03 = std::cbrt(d3[1]);
  n.div2_03 = std::cbrt(d3[2]);
  n.divgamma_02 = std::sqrt(dg2);
  n.divgamma_03 = std::cbrt(dg3);
  n.p1_02 = std::sqrt(p2[1]);
  n.p2_02 = std::sqrt(p2[2]);
  n.p1_032 = std::pow(p32[1], 2.0 / 3.0);
  n.p2_032 = std::pow(p32[2], 2.0 / 3.0);
  n.pgamma_032 = std::pow(pg32, 2.0 / 3.0);
  return n;
}

}  // namespace fracflow

#endif  // FRACFLOW_NORMS_HPP
