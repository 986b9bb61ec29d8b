#ifndef FRACFLOW_ASSEMBLY_HPP
#define FRACFLOW_ASSEMBLY_HPP

#include <Eigen/Sparse>
#include <ostream>

#include "fracflow/mixed_space.hpp"
#include "fracflow/problem_data.hpp"

namespace fracflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete saddle-point blocks:
///   [ A_lin + A_nl(u)   -B^T ] [u]   [g_vec]
///   [       B             0  ] [p] = [f_vec]
/// A_lin holds the Darcy mass terms plus the kappa interface coupling,
/// B the divergence operator including the normal-trace jump column into
/// the fracture pressure rows.
struct SaddleSystem {
  const MixedSpace* space = nullptr;
  const ProblemData* data = nullptr;
  SparseMatrix A_lin;  // n_flux x n_flux, symmetric
  SparseMatrix B;      // n_pressure x n_flux
  Vector g_vec;        // flux-block load (boundary pressures)
  Vector f_vec;        // pressure-block load (sources)
};

namespace detail {

// Degree-2 exact rule on a triangle: the three edge midpoints with equal
// weights |T|/3. Also where the |u_h| quadrature for the Forchheimer
// augmentation lives.
inline std::array<Vec2, 3> edge_midpoints(const Mesh& mesh, int t) {
  const auto& tr = mesh.triangles[t];
  const Vec2 &a = mesh.vertices[tr.v[0]], &b = mesh.vertices[tr.v[1]], &c = mesh.vertices[tr.v[2]];
  return {Vec2{(b.x + c.x) / 2, (b.y + c.y) / 2}, Vec2{(a.x + c.x) / 2, (a.y + c.y) / 2},
          Vec2{(a.x + b.x) / 2, (a.y + b.y) / 2}};
}

struct TripletList {
  std::vector<Eigen::Triplet<double>> ts;
  void add(int i, int j, double v) { ts.emplace_back(i, j, v); }
};

inline void check_consistency(const MixedSpace& sp, const ProblemData& data) {
  auto viols = validate(data, *sp.mesh);  // throws StructuralError on mismatch
  (void)viols;
}

}  // namespace detail

/// Assembles A_lin, B, f_vec, g_vec. Deterministic sequential assembly
/// order, so matrices are bit-reproducible.
inline SaddleSystem assemble_linear(const MixedSpace& sp, const ProblemData& data) {
  const Mesh& mesh = *sp.mesh;
  detail::check_consistency(sp, data);

  SaddleSystem sys;
  sys.space = &sp;
  sys.data = &data;
  sys.g_vec = Vector::Zero(sp.n_flux);
  sys.f_vec = Vector::Zero(sp.n_pressure);

  detail::TripletList A, B;

  // Subdomain mass terms: int_T alpha u . v, 3-point edge-midpoint rule
  // (exact, the integrand is quadratic).
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    const auto& alpha = (tr.subdomain == 1 ? data.alpha1 : data.alpha2).at(t);
    auto qp = detail::edge_midpoints(mesh, t);
    double w = tr.area / 3.0;
    for (int i = 0; i < 3; ++i) {
      int di = sp.flux_dof(t, i);
      for (int j = 0; j < 3; ++j) {
        int dj = sp.flux_dof(t, j);
        double v = 0.0;
        for (int q = 0; q < 3; ++q)
          v += w * alpha.apply(detail::rt0_basis(mesh, t, j, qp[q]))
                   .dot(detail::rt0_basis(mesh, t, i, qp[q]));
        A.add(di, dj, v);
      }
    }
    // Divergence rows and source load.
    for (int k = 0; k < 3; ++k) B.add(t, sp.flux_dof(t, k), sp.edge_sign(t, k));
    sys.f_vec[t] += data.q_cell(tr.subdomain, t) * tr.area;
  }

  // Boundary pressure load g(v) = -<p_d, v.n> edge by edge (normals on
  // boundary edges are stored outward).
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (ed.kind != EdgeKind::Boundary) continue;
    int sub = mesh.triangles[ed.tri[0]].subdomain;
    sys.g_vec[sp.edge_dof_side1[e]] -= data.dirichlet(sub, static_cast<int>(e));
  }

  if (mesh.has_fracture()) {
    auto fv = mesh.fracture_vertices();
    for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
      int e = mesh.fracture_segments[k];
      const Edge& ed = mesh.edges[e];
      double len = ed.length;
      int row = sp.pressure_dof_of_segment(k);
      int da = sp.frac_vertex_dof[k], db = sp.frac_vertex_dof[k + 1];
      int d1 = sp.edge_dof_side1[e], d2 = sp.edge_dof_side2[e];

      // Tangential fracture mass: alpha_gamma * P1 mass matrix.
      double ag = data.alpha_gamma.at(k);
      A.add(da, da, ag * len / 3.0);
      A.add(db, db, ag * len / 3.0);
      A.add(da, db, ag * len / 6.0);
      A.add(db, da, ag * len / 6.0);

      // Interface coupling on (u_1.n, u_2.n): kappa/|e| [[xi, xibar],
      // [xibar, xi]]; DOFs are edge fluxes, traces are DOF/|e|.
      double kap = data.kappa.at(k) / len;
      double xi = data.xi, xb = data.xi_bar();
      A.add(d1, d1, kap * xi);
      A.add(d1, d2, kap * xb);
      A.add(d2, d1, kap * xb);
      A.add(d2, d2, kap * xi);

      // Fracture mass-balance row: div_gamma u_gamma - [u_1.n - u_2.n].
      B.add(row, db, 1.0);
      B.add(row, da, -1.0);
      B.add(row, d1, -1.0);
      B.add(row, d2, 1.0);
      sys.f_vec[row] += data.q_segment(k) * len;
    }
    // Fracture endpoint pressures: outward 1D normal is -1 at the bottom
    // endpoint, +1 at the top.
    sys.g_vec[sp.frac_vertex_dof[0]] += data.p_d_gamma[0];
    sys.g_vec[sp.frac_vertex_dof[sp.n_frac_vertices - 1]] -= data.p_d_gamma[1];
  }

  sys.A_lin.resize(sp.n_flux, sp.n_flux);
  sys.A_lin.setFromTriplets(A.ts.begin(), A.ts.end());
  sys.B.resize(sp.n_pressure, sp.n_flux);
  sys.B.setFromTriplets(B.ts.begin(), B.ts.end());
  return sys;
}

/// State-dependent Forchheimer augmentation: quadrature of
/// beta |u_h| basis_i . basis_j on triangles (edge midpoints) and
/// fracture segments (midpoint rule). Symmetric PSD for any state.
inline SparseMatrix assemble_forchheimer(const MixedSpace& sp, const ProblemData& data,
                                         const DiscreteState& state) {
  const Mesh& mesh = *sp.mesh;
  if (state.u.size() != sp.n_flux)
    throw StructuralError("assemble_forchheimer: state size mismatch");

  detail::TripletList A;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    double beta = data.beta_of(tr.subdomain, t);
    if (beta == 0.0) continue;
    auto qp = detail::edge_midpoints(mesh, t);
    double w = tr.area / 3.0;
    for (int q = 0; q < 3; ++q) {
      Vec2 uh{0, 0};
      std::array<Vec2, 3> phi;
      for (int k = 0; k < 3; ++k) {
        phi[k] = detail::rt0_basis(mesh, t, k, qp[q]);
        uh = uh + state.u[sp.flux_dof(t, k)] * phi[k];
      }
      double scale = w * beta * uh.norm();
      if (scale == 0.0) continue;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          A.add(sp.flux_dof(t, i), sp.flux_dof(t, j), scale * phi[i].dot(phi[j]));
    }
  }
  if (mesh.has_fracture() && data.law_gamma == FlowLaw::DarcyForchheimer) {
    for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
      double beta = data.beta_gamma.at(k);
      if (beta == 0.0) continue;
      double len = mesh.edges[mesh.fracture_segments[k]].length;
      int da = sp.frac_vertex_dof[k], db = sp.frac_vertex_dof[k + 1];
      double umid = 0.5 * (state.u[da] + state.u[db]);
      double scale = len * beta * std::abs(umid) * 0.25;  // hat values 1/2 at the midpoint
      A.add(da, da, scale);
      A.add(da, db, scale);
      A.add(db, da, scale);
      A.add(db, db, scale);
    }
  }
  SparseMatrix M(sp.n_flux, sp.n_flux);
  M.setFromTriplets(A.ts.begin(), A.ts.end());
  return M;
}

struct Residual {
  Vector flux;  // (A_lin + A_nl(u)) u - B^T p - g
  Vector mass;  // B u - f
  double flux_max = 0.0, flux_2 = 0.0;
  double mass_max = 0.0, mass_2 = 0.0;
  double combined_2() const { return std::sqrt(flux_2 * flux_2 + mass_2 * mass_2); }
};

inline Residual residual(const SaddleSystem& sys, const ProblemData& data,
                         const DiscreteState& state) {
  const MixedSpace& sp = *sys.space;
  Residual r;
  SparseMatrix A_nl = assemble_forchheimer(sp, data, state);
  r.flux = sys.A_lin * state.u + A_nl * state.u - sys.B.transpose() * state.p - sys.g_vec;
  r.mass = sys.B * state.u - sys.f_vec;
  r.flux_max = r.flux.size() ? r.flux.cwiseAbs().maxCoeff() : 0.0;
  r.mass_max = r.mass.size() ? r.mass.cwiseAbs().maxCoeff() : 0.0;
  r.flux_2 = r.flux.norm();
  r.mass_2 = r.mass.norm();
  return r;
}

/// MatrixMarket coordinate dump of the full saddle matrix
/// [[A, -B^T], [B, 0]] with the given flux block A.
inline void write_matrix_market(const SparseMatrix& A, const SparseMatrix& B,
                                std::ostream& os) {
  int n = static_cast<int>(A.rows() + B.rows());
  std::vector<std::string> lines;
  char buf[128];
  auto emit = [&](int i, int j, double v) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, j + 1, v);
    lines.emplace_back(buf);
  };
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      emit(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      emit(static_cast<int>(it.row()) + static_cast<int>(A.rows()),
           static_cast<int>(it.col()), it.value());
      emit(static_cast<int>(it.col()),
           static_cast<int>(it.row()) + static_cast<int>(A.rows()), -it.value());
    }
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << n << " " << n << " " << lines.size() << "\n";
  for (const auto& l : lines) os << l;
}

}  // namespace fracflow

#endif  // FRACFLOW_ASSEMBLY_HPP
