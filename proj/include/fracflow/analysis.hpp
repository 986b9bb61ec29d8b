#ifndef FRACFLOW_ANALYSIS_HPP
#define FRACFLOW_ANALYSIS_HPP

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "fracflow/solver.hpp"

namespace fracflow {

// ---------------------------------------------------------------------------
// Vector inequality suite
// ---------------------------------------------------------------------------

/// The four pointwise vector inequalities underpinning the monotonicity
/// estimates, checked by brute-force sampling:
///   (1)  | |x|x - |y|y |              <= (|x|+|y>) |x-y|
///   (2)  (1/2) |x-y|^3                <= (|x|x - |y|y) . (x-y)
///   (3)  | |x|^{-1/2}x - |y|^{-1/2}y| <= sqrt(2) |x-y|^{1/2}
///   (4)  |x-y|^2 / (sqrt|x|+sqrt|y|) <= (x/sqrt|x| - y/sqrt|y|) . (x-y)
/// with |0|^{-1/2} 0 := 0.
struct InequalityReport {
  std::array<long, 4> checked{};
  std::array<long, 4> violations{};
  long total_violations() const {
    long s = 0;
    for (auto v : violations) s += v;
    return s;
  }
};

namespace detail {

using VecN = std::vector<double>;

inline double vnorm(const VecN& v) {
  double s = 0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}
inline double vdot(const VecN& a, const VecN& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline VecN vsub(const VecN& a, const VecN& b) {
  VecN r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline VecN vscale(const VecN& a, double s) {
  VecN r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

inline void check_pair(const VecN& x, const VecN& y, double slack, InequalityReport& rep) {
  double nx = vnorm(x), ny = vnorm(y);
  VecN d = vsub(x, y);
  double nd = vnorm(d);
  auto ok = [&](double lhs, double rhs) { return lhs <= rhs + slack * (1.0 + std::abs(rhs)); };

  VecN mx = vscale(x, nx), my = vscale(y, ny);  // |x|x, |y|y
  rep.checked[0]++;
  if (!ok(vnorm(vsub(mx, my)), (nx + ny) * nd)) rep.violations[0]++;

  rep.checked[1]++;
  if (!ok(0.5 * nd * nd * nd, vdot(vsub(mx, my), d))) rep.violations[1]++;

  VecN hx = nx > 0 ? vscale(x, 1.0 / std::sqrt(nx)) : VecN(x.size(), 0.0);
  VecN hy = ny > 0 ? vscale(y, 1.0 / std::sqrt(ny)) : VecN(y.size(), 0.0);
  rep.checked[2]++;
  if (!ok(vnorm(vsub(hx, hy)), std::sqrt(2.0) * std::sqrt(nd))) rep.violations[2]++;

  double denom = std::sqrt(nx) + std::sqrt(ny);
  rep.checked[3]++;
  double lhs4 = denom > 0 ? nd * nd / denom : 0.0;
  if (!ok(lhs4, vdot(vsub(hx, hy), d))) rep.violations[3]++;
}

}  // namespace detail

inline InequalityReport check_vector_inequalities(long samples, const std::vector<int>& dims,
                                                  unsigned long long seed,
                                                  double slack = 1e-12) {
  InequalityReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  for (int dim : dims) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("dims must be within {1,2,3}");
    auto rand_vec = [&] {
      detail::VecN v(dim);
      for (auto& c : v) c = uni(rng);
      return v;
    };
    // Forced edge cases: x = 0, y = 0, x = y, colinear pairs.
    detail::VecN zero(dim, 0.0);
    detail::VecN e1(dim, 0.0);
    e1[0] = 1.0;
    detail::check_pair(zero, zero, slack, rep);
    detail::check_pair(e1, zero, slack, rep);
    detail::check_pair(zero, e1, slack, rep);
    detail::check_pair(e1, e1, slack, rep);
    detail::check_pair(e1, detail::vscale(e1, -3.0), slack, rep);
    for (long s = 0; s < samples; ++s) {
      detail::VecN x = rand_vec();
      detail::VecN y;
      switch (s % 4) {
        case 0: y = rand_vec(); break;
        case 1: y = x; break;                                  // equality case
        case 2: y = detail::vscale(x, uni(rng) / 10.0); break; // colinear
        default: y = zero; break;
      }
      detail::check_pair(x, y, slack, rep);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Discrete inf-sup surrogate
// ---------------------------------------------------------------------------

inline Eigen::VectorXd pressure_mass_diagonal(const MixedSpace& sp) {
  const Mesh& mesh = *sp.mesh;
  Eigen::VectorXd Mp(sp.n_pressure);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) Mp[t] = mesh.triangles[t].area;
  for (size_t k = 0; k < mesh.fracture_segments.size(); ++k)
    Mp[mesh.triangles.size() + k] = mesh.edges[mesh.fracture_segments[k]].length;
  return Mp;
}

/// Gram matrix of the discrete flux-space norm used by the inf-sup
/// surrogate: L2 flux mass + divergence term B^T M_M^-1 B + the
/// interface normal-trace term. Hilbertian by choice (the L3-family
/// inf-sup constant has no eigenvalue characterization).
inline Eigen::MatrixXd flux_norm_gram(const MixedSpace& sp, const SparseMatrix& B) {
  const Mesh& mesh = *sp.mesh;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(sp.n_flux, sp.n_flux);

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    auto qp = detail::edge_midpoints(mesh, t);
    double w = tr.area / 3.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0;
        for (int q = 0; q < 3; ++q)
          v += w * detail::rt0_basis(mesh, t, i, qp[q]).dot(detail::rt0_basis(mesh, t, j, qp[q]));
        M(sp.flux_dof(t, i), sp.flux_dof(t, j)) += v;
      }
  }
  for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
    int e = mesh.fracture_segments[k];
    double len = mesh.edges[e].length;
    int da = sp.frac_vertex_dof[k], db = sp.frac_vertex_dof[k + 1];
    M(da, da) += len / 3.0;
    M(db, db) += len / 3.0;
    M(da, db) += len / 6.0;
    M(db, da) += len / 6.0;
    M(sp.edge_dof_side1[e], sp.edge_dof_side1[e]) += 1.0 / len;  // ||u_i.n||^2 on the edge
    M(sp.edge_dof_side2[e], sp.edge_dof_side2[e]) += 1.0 / len;
  }

  Eigen::VectorXd Mp = pressure_mass_diagonal(sp);
  Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
  M += Bd.transpose() * Mp.cwiseInverse().asDiagonal() * Bd;
  return M;
}

/// theta_h from the generalized eigenproblem
///   (B M_W^-1 B^T) q = lambda M_M q:
/// sqrt of the smallest eigenvalue; a rank defect of B shows up as
/// theta_h = 0.
inline double discrete_infsup_from(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M_W,
                                   const Eigen::MatrixXd& M_M) {
  Eigen::LLT<Eigen::MatrixXd> llt(M_W);
  if (llt.info() != Eigen::Success)
    throw SolverError("inf-sup: flux Gram matrix not positive definite");
  Eigen::MatrixXd S = B * llt.solve(B.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, M_M);
  if (es.info() != Eigen::Success) throw SolverError("inf-sup: eigen-solve failed");
  double lmin = es.eigenvalues().minCoeff();
  double lmax = es.eigenvalues().maxCoeff();
  if (lmin < 1e-10 * std::max(lmax, 1.0)) return 0.0;  // rank-deficient B
  return std::sqrt(lmin);
}

inline double discrete_infsup(const MixedSpace& sp) {
  if (sp.n_flux + sp.n_pressure > 6000)
    throw std::invalid_argument("discrete_infsup: mesh too large for a dense eigensolve");
  ProblemData unit;  // coefficients are irrelevant, only B is used
  unit.xi = 1.0;
  SaddleSystem sys = assemble_linear(sp, unit);
  Eigen::MatrixXd M_W = flux_norm_gram(sp, sys.B);
  Eigen::MatrixXd Bd = Eigen::MatrixXd(sys.B);
  Eigen::MatrixXd M_M = pressure_mass_diagonal(sp).asDiagonal();
  return discrete_infsup_from(Bd, M_W, M_M);
}

// ---------------------------------------------------------------------------
// Uniform-flow oracle (1D series-resistance reduction)
// ---------------------------------------------------------------------------

struct UniformFlowParams {
  double alpha1 = 1.0, alpha2 = 1.0;
  double beta1 = 0.0, beta2 = 0.0;
  double kappa = 0.5;
  double xi = 0.75;
  double w1 = 1.0, w2 = 1.0;  // subdomain widths
  double delta_p = 1.0;       // p_left - p_right
  double p_left = 0.0;
};

struct UniformFlowSolution {
  double U = 0.0;        // normal flux through the fracture (both sides)
  double p_gamma = 0.0;  // fracture pressure
  double p_left = 0.0, p_right = 0.0;
  UniformFlowParams params;

  /// Piecewise-linear pressure profile across the domain (x measured
  /// from the left boundary; the fracture sits at x = w1).
  double pressure(double x) const {
    double s1 = (params.alpha1 + params.beta1 * std::abs(U)) * U;
    double s2 = (params.alpha2 + params.beta2 * std::abs(U)) * U;
    if (x <= params.w1) return p_left - s1 * x;
    double p2_if = p_gamma - params.kappa * U;  // drop across the Omega_2 side
    return p2_if - s2 * (x - params.w1);
  }
};

/// Closed-form solution of perpendicular uniform flow: the positive-root
/// flux of (a1 w1 + a2 w2 + 2 kappa) U + (b1 w1 + b2 w2) U^2 = delta_p,
/// with the sign of delta_p.
inline UniformFlowSolution uniform_flow_oracle(const UniformFlowParams& p) {
  double lin = p.alpha1 * p.w1 + p.alpha2 * p.w2 + 2.0 * p.kappa;
  double quad = p.beta1 * p.w1 + p.beta2 * p.w2;
  if (!(lin > 0)) throw std::invalid_argument("uniform_flow_oracle: nonpositive resistance");
  double dp = std::abs(p.delta_p);
  double U;
  if (quad == 0.0) {
    U = dp / lin;
  } else {
    U = 2.0 * dp / (lin + std::sqrt(lin * lin + 4.0 * quad * dp));
  }
  if (!(U >= 0) || !std::isfinite(U))
    throw SolverError("uniform_flow_oracle: no admissible root");
  if (p.delta_p < 0) U = -U;

  UniformFlowSolution s;
  s.params = p;
  s.U = U;
  s.p_left = p.p_left;
  s.p_right = p.p_left - p.delta_p;
  s.p_gamma = p.p_left - (p.alpha1 + p.beta1 * std::abs(U)) * U * p.w1 - p.kappa * U;
  return s;
}

/// Problem data whose exact solution is the given uniform-flow state:
/// no sources, Dirichlet pressure from the piecewise-linear profile
/// (3-point Gauss edge averages), fracture endpoint pressures from the
/// oracle. Works for fractured and plain meshes alike.
inline ProblemData build_uniform_flow_data(const Mesh& mesh, const UniformFlowSolution& sol,
                                           FlowLaw matrix_law, double alpha_gamma,
                                           double beta_gamma, FlowLaw law_gamma) {
  ProblemData d;
  const auto& p = sol.params;
  d.alpha1 = TensorField::constant(p.alpha1);
  d.alpha2 = TensorField::constant(p.alpha2);
  d.alpha_gamma = ScalarField::constant(alpha_gamma, true);
  d.kappa = ScalarField::constant(p.kappa > 0 ? p.kappa : 1.0, true);
  d.xi = p.xi;
  d.law1 = d.law2 = matrix_law;
  d.beta1 = ScalarField::constant(p.beta1);
  d.beta2 = ScalarField::constant(p.beta2);
  d.law_gamma = mesh.has_fracture() ? law_gamma : FlowLaw::Darcy;
  d.beta_gamma = ScalarField::constant(mesh.has_fracture() ? beta_gamma : 0.0);
  d.p_d1.assign(mesh.edges.size(), 0.0);
  d.p_d2.assign(mesh.edges.size(), 0.0);
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (ed.kind != EdgeKind::Boundary) continue;
    Vec2 a = mesh.vertices[ed.a], b = mesh.vertices[ed.b];
    double avg = 0.0;
    for (const auto& q : quad::line_gauss3()) {
      Vec2 x = a + (b - a) * q.t;
      avg += q.w * sol.pressure(x.x - mesh.domain.x0);
    }
    (mesh.triangles[ed.tri[0]].subdomain == 1 ? d.p_d1 : d.p_d2)[e] = avg;
  }
  d.p_d_gamma[0] = d.p_d_gamma[1] = sol.p_gamma;
  return d;
}

// ---------------------------------------------------------------------------
// beta -> 0 sweeps
// ---------------------------------------------------------------------------

enum class SweepScenario { Fractured, SingleDomain };

struct SweepRow {
  double beta = 0.0;
  double dist_target = 0.0;    // ||u_beta - u_target||_{0,2}
  double b13_u03 = 0.0;        // beta^{1/3} ||u_beta||_{0,3}
  double b12_u03 = 0.0;        // beta^{1/2} ||u_beta||_{0,3}
  double p_032 = 0.0;          // ||p_beta||_{0,3/2}
  double mass_residual = 0.0;  // ||B u_beta - f||_2
  int iterations = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SolveReport> reports;  // one per row, same order
  bool complete = true;
  std::string message;
};

/// Solves the Darcy-Forchheimer problem for each beta in the (strictly
/// decreasing) list with beta_1 = beta_2 = beta, warm-started down the
/// ladder, and compares against the beta = 0 target problem (Darcy
/// matrix; in the fractured scenario the fracture keeps its fixed
/// Forchheimer coefficient). `data_for(beta)` supplies the problem data
/// for each beta; `data_for(0)` is the target.
inline SweepResult beta_sweep(const MixedSpace& sp, const std::vector<double>& betas,
                              SweepScenario scenario,
                              const std::function<ProblemData(double)>& data_for,
                              const SolverOptions& options = SolverOptions{}) {
  for (size_t i = 0; i + 1 < betas.size(); ++i)
    if (!(betas[i] > betas[i + 1]))
      throw std::invalid_argument("beta_sweep: betas must be strictly decreasing");
  for (double b : betas)
    if (!(b > 0)) throw std::invalid_argument("beta_sweep: betas must be positive");

  SweepResult res;
  DiscreteState target_state;
  try {
    ProblemData target = data_for(0.0);
    if (target.law1 != FlowLaw::Darcy || target.law2 != FlowLaw::Darcy)
      throw std::invalid_argument("beta_sweep: target must use Darcy matrix laws");
    if (scenario == SweepScenario::SingleDomain && target.law_gamma != FlowLaw::Darcy)
      throw std::invalid_argument("beta_sweep: single-domain target must be pure Darcy");
    target_state = solve_picard(sp, target, options).first;
  } catch (const std::exception& e) {
    res.complete = false;
    res.message = std::string("target solve failed: ") + e.what();
    return res;
  }

  DiscreteState warm = target_state;
  for (double beta : betas) {
    ProblemData d = data_for(beta);
    d.law1 = d.law2 = FlowLaw::DarcyForchheimer;
    d.beta1 = d.beta2 = ScalarField::constant(beta);
    SolverOptions opt = options;
    opt.initial_state = InitialState::Given;
    std::pair<DiscreteState, SolveReport> sol;
    try {
      sol = solve_picard(sp, d, opt, &warm);
    } catch (const std::exception& e) {
      res.complete = false;
      res.message = "solve failed at beta = " + std::to_string(beta) + ": " + e.what();
      return res;
    }
    if (!sol.second.converged) {
      res.complete = false;
      res.message = "no convergence at beta = " + std::to_string(beta);
      return res;
    }
    warm = sol.first;
    res.reports.push_back(sol.second);

    DiscreteState diff;
    diff.u = sol.first.u - target_state.u;
    diff.p = sol.first.p - target_state.p;
    NormBundle nb = compute_norms(sp, sol.first);
    NormBundle nd = compute_norms(sp, diff);
    SaddleSystem sys = assemble_linear(sp, d);

    SweepRow row;
    row.beta = beta;
    row.dist_target = nd.u_02();
    row.b13_u03 = std::cbrt(beta) * nb.u_03();
    row.b12_u03 = std::sqrt(beta) * nb.u_03();
    row.p_032 = nb.p_032();
    row.mass_residual = (sys.B * sol.first.u - sys.f_vec).norm();
    row.iterations = sol.second.iterations;
    res.rows.push_back(row);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Method of manufactured solutions
// ---------------------------------------------------------------------------

/// An analytic solution of the coupled model, used to manufacture
/// sources and boundary data. Coefficients and laws live in `base`
/// (constant coefficients only).
struct ManufacturedSolution {
  ProblemData base;
  std::function<Vec2(int sub, const Vec2&)> velocity;
  std::function<double(int sub, const Vec2&)> pressure;
  std::function<double(int sub, const Vec2&)> source;
  std::function<double(double y)> u_gamma;       // tangential fracture flux
  std::function<double(double y)> p_gamma;       // fracture pressure
  std::function<double(double y)> source_gamma;  // q_gamma
};

/// Populates per-entity sources and boundary data of `ms.base` for a
/// particular mesh (cell/segment averages by quadrature, edge averages
/// for Dirichlet data).
inline ProblemData build_mms_data(const Mesh& mesh, const ManufacturedSolution& ms) {
  ProblemData d = ms.base;
  d.q1.assign(mesh.triangles.size(), 0.0);
  d.q2.assign(mesh.triangles.size(), 0.0);
  d.p_d1.assign(mesh.edges.size(), 0.0);
  d.p_d2.assign(mesh.edges.size(), 0.0);
  d.q_gamma.assign(std::max<size_t>(mesh.fracture_segments.size(), 1), 0.0);

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 &A = mesh.vertices[tr.v[0]], &B = mesh.vertices[tr.v[1]],
               &C = mesh.vertices[tr.v[2]];
    double avg = 0.0;
    for (const auto& q : quad::tri_degree4())
      avg += q.w * ms.source(tr.subdomain, q.l0 * A + q.l1 * B + q.l2 * C);
    (tr.subdomain == 1 ? d.q1 : d.q2)[t] = avg;
  }
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (ed.kind != EdgeKind::Boundary) continue;
    int sub = mesh.triangles[ed.tri[0]].subdomain;
    Vec2 a = mesh.vertices[ed.a], b = mesh.vertices[ed.b];
    double avg = 0.0;
    for (const auto& q : quad::line_gauss3())
      avg += q.w * ms.pressure(sub, a + (b - a) * q.t);
    (sub == 1 ? d.p_d1 : d.p_d2)[e] = avg;
  }
  for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
    const Edge& ed = mesh.edges[mesh.fracture_segments[k]];
    double ya = mesh.vertices[ed.a].y, yb = mesh.vertices[ed.b].y;
    double avg = 0.0;
    for (const auto& q : quad::line_gauss3())
      avg += q.w * ms.source_gamma(ya + (yb - ya) * q.t);
    d.q_gamma[k] = avg;
  }
  if (mesh.has_fracture()) {
    d.p_d_gamma[0] = ms.p_gamma(mesh.vertices[mesh.fracture_endpoints[0]].y);
    d.p_d_gamma[1] = ms.p_gamma(mesh.vertices[mesh.fracture_endpoints[1]].y);
  }
  return d;
}

struct MmsErrors {
  double h = 0.0;
  double flux_l2 = 0.0;      // subdomains + fracture tangential flux
  double pressure_l2 = 0.0;  // cells + fracture segments
};

inline MmsErrors mms_errors(const MixedSpace& sp, const DiscreteState& state,
                            const ManufacturedSolution& ms) {
  const Mesh& mesh = *sp.mesh;
  MmsErrors err;
  err.h = mesh.h;
  double eu = 0.0, ep = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 &A = mesh.vertices[tr.v[0]], &B = mesh.vertices[tr.v[1]],
               &C = mesh.vertices[tr.v[2]];
    for (const auto& q : quad::tri_degree4()) {
      Vec2 x = q.l0 * A + q.l1 * B + q.l2 * C;
      Vec2 du = evaluate_flux(sp, state, t, x) - ms.velocity(tr.subdomain, x);
      double dp = state.p[t] - ms.pressure(tr.subdomain, x);
      eu += q.w * tr.area * du.dot(du);
      ep += q.w * tr.area * dp * dp;
    }
  }
  for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
    const Edge& ed = mesh.edges[mesh.fracture_segments[k]];
    double len = ed.length;
    double ya = mesh.vertices[ed.a].y, yb = mesh.vertices[ed.b].y;
    double ua = state.u[sp.frac_vertex_dof[k]], ub = state.u[sp.frac_vertex_dof[k + 1]];
    double ps = state.p[sp.pressure_dof_of_segment(k)];
    for (const auto& q : quad::line_gauss3()) {
      double y = ya + (yb - ya) * q.t;
      double du = (1 - q.t) * ua + q.t * ub - ms.u_gamma(y);
      double dp = ps - ms.p_gamma(y);
      eu += q.w * len * du * du;
      ep += q.w * len * dp * dp;
    }
  }
  err.flux_l2 = std::sqrt(eu);
  err.pressure_l2 = std::sqrt(ep);
  return err;
}

struct RateTable {
  std::vector<MmsErrors> rows;
  double slope_flux = 0.0;
  double slope_pressure = 0.0;
  bool monotone = true;
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// Uniform-refinement convergence study against a manufactured
/// solution. Needs at least 3 meshes for a least-squares slope.
inline RateTable mms_convergence(const Mesh& base_mesh, const ManufacturedSolution& ms,
                                 int refinements,
                                 const SolverOptions& options = SolverOptions{}) {
  if (refinements < 3)
    throw std::invalid_argument("mms_convergence: need at least 3 meshes for a slope");
  RateTable table;
  std::vector<Mesh> meshes;
  meshes.push_back(base_mesh);
  for (int r = 1; r < refinements; ++r) meshes.push_back(refine(meshes.back()));

  for (const auto& mesh : meshes) {
    MixedSpace sp = mesh.has_fracture() ? build_space(mesh) : build_space_single(mesh);
    ProblemData d = build_mms_data(mesh, ms);
    auto [state, rep] = solve_picard(sp, d, options);
    if (!rep.converged) throw SolverError("mms_convergence: inner solve did not converge");
    table.rows.push_back(mms_errors(sp, state, ms));
  }

  std::vector<double> lh, lf, lp;
  for (const auto& r : table.rows) {
    lh.push_back(std::log(r.h));
    lf.push_back(std::log(std::max(r.flux_l2, 1e-300)));
    lp.push_back(std::log(std::max(r.pressure_l2, 1e-300)));
  }
  for (size_t i = 0; i + 1 < table.rows.size(); ++i)
    if (table.rows[i + 1].flux_l2 > table.rows[i].flux_l2 ||
        table.rows[i + 1].pressure_l2 > table.rows[i].pressure_l2)
      table.monotone = false;
  table.slope_flux = detail::ls_slope(lh, lf);
  table.slope_pressure = detail::ls_slope(lh, lp);
  return table;
}

// ---------------------------------------------------------------------------
// Built-in manufactured solutions
// ---------------------------------------------------------------------------

/// Smooth non-polynomial solution of the all-Darcy model on
/// (0,2)x(0,1) with the fracture at x = 1, with tangential fracture
/// flow. Horizontal velocity profiles f_i(x) plus a shared vertical
/// pressure mode H(y).
inline ManufacturedSolution make_mms_darcy() {
  const double a1 = 1.0, a2 = 2.0, ag = 1.5, kap = 0.5, xi = 0.75;
  const double xf = 1.0, C0 = 1.0;
  const double pi = 3.14159265358979323846;

  auto f1 = [](double x) { return 1.0 + 0.5 * std::sin(x); };
  auto F1 = [](double x) { return x - 0.5 * std::cos(x); };
  auto df1 = [](double x) { return 0.5 * std::cos(x); };
  auto f2 = [](double x) { return 0.8 + 0.3 * std::cos(x - 1.0); };
  auto F2 = [](double x) { return 0.8 * x + 0.3 * std::sin(x - 1.0); };
  auto df2 = [](double x) { return -0.3 * std::sin(x - 1.0); };
  auto H = [=](double y) { return 0.2 * std::cos(pi * y); };
  auto dH = [=](double y) { return -0.2 * pi * std::sin(pi * y); };
  auto ddH = [=](double y) { return -0.2 * pi * pi * std::cos(pi * y); };

  const double f1s = f1(xf), f2s = f2(xf);
  const double P1_xf = C0;
  const double P2_xf = C0 - kap * (f1s + f2s);

  ManufacturedSolution ms;
  ms.base.alpha1 = TensorField::constant(a1);
  ms.base.alpha2 = TensorField::constant(a2);
  ms.base.alpha_gamma = ScalarField::constant(ag, true);
  ms.base.kappa = ScalarField::constant(kap, true);
  ms.base.xi = xi;
  ms.base.law1 = ms.base.law2 = ms.base.law_gamma = FlowLaw::Darcy;
  ms.base.beta_gamma = ScalarField::constant(0.0);

  ms.velocity = [=](int sub, const Vec2& x) {
    double a = sub == 1 ? a1 : a2;
    double f = sub == 1 ? f1(x.x) : f2(x.x);
    return Vec2{f, -dH(x.y) / a};
  };
  ms.pressure = [=](int sub, const Vec2& x) {
    if (sub == 1) return P1_xf - a1 * (F1(x.x) - F1(xf)) + H(x.y);
    return P2_xf - a2 * (F2(x.x) - F2(xf)) + H(x.y);
  };
  ms.source = [=](int sub, const Vec2& x) {
    double a = sub == 1 ? a1 : a2;
    double df = sub == 1 ? df1(x.x) : df2(x.x);
    return df - ddH(x.y) / a;
  };
  double pg0 = P1_xf - kap * (xi * f1s + (1.0 - xi) * f2s);
  ms.p_gamma = [=](double y) { return pg0 + H(y); };
  ms.u_gamma = [=](double y) { return -dH(y) / ag; };
  ms.source_gamma = [=](double y) { return -ddH(y) / ag - (f1s - f2s); };
  return ms;
}

/// Smooth non-polynomial solution of the all-Darcy-Forchheimer model
/// (beta = 1 by default) with horizontal flow; the fracture carries the
/// normal-flux jump but no tangential flow.
inline ManufacturedSolution make_mms_forchheimer(double beta = 1.0) {
  const double a1 = 1.0, a2 = 2.0, ag = 1.5, kap = 0.5, xi = 0.75;
  const double xf = 1.0, C0 = 1.0;

  auto f1 = [](double x) { return 1.0 + 0.5 * std::sin(x); };
  auto df1 = [](double x) { return 0.5 * std::cos(x); };
  // integral of f1 and f1^2
  auto F1 = [](double x) { return x - 0.5 * std::cos(x); };
  auto G1 = [](double x) { return 1.125 * x - std::cos(x) - std::sin(2.0 * x) / 16.0; };
  auto f2 = [](double x) { return 0.8 + 0.3 * std::cos(x - 1.0); };
  auto df2 = [](double x) { return -0.3 * std::sin(x - 1.0); };
  auto F2 = [](double x) { return 0.8 * x + 0.3 * std::sin(x - 1.0); };
  auto G2 = [](double x) {
    return 0.685 * x + 0.48 * std::sin(x - 1.0) + 0.0225 * std::sin(2.0 * (x - 1.0));
  };

  const double f1s = f1(xf), f2s = f2(xf);
  const double P1_xf = C0;
  const double P2_xf = C0 - kap * (f1s + f2s);

  ManufacturedSolution ms;
  ms.base.alpha1 = TensorField::constant(a1);
  ms.base.alpha2 = TensorField::constant(a2);
  ms.base.alpha_gamma = ScalarField::constant(ag, true);
  ms.base.kappa = ScalarField::constant(kap, true);
  ms.base.xi = xi;
  ms.base.law1 = ms.base.law2 = ms.base.law_gamma = FlowLaw::DarcyForchheimer;
  ms.base.beta1 = ms.base.beta2 = ScalarField::constant(beta);
  ms.base.beta_gamma = ScalarField::constant(beta);

  ms.velocity = [=](int sub, const Vec2& x) {
    return Vec2{sub == 1 ? f1(x.x) : f2(x.x), 0.0};
  };
  ms.pressure = [=](int sub, const Vec2& x) {
    // P_i' = -(a_i f_i + beta f_i^2); f_i > 0 so |u_i| = f_i.
    if (sub == 1) return P1_xf - a1 * (F1(x.x) - F1(xf)) - beta * (G1(x.x) - G1(xf));
    return P2_xf - a2 * (F2(x.x) - F2(xf)) - beta * (G2(x.x) - G2(xf));
  };
  ms.source = [=](int sub, const Vec2& x) { return sub == 1 ? df1(x.x) : df2(x.x); };
  double pg = P1_xf - kap * (xi * f1s + (1.0 - xi) * f2s);
  ms.p_gamma = [=](double) { return pg; };
  ms.u_gamma = [=](double) { return 0.0; };
  ms.source_gamma = [=](double) { return -(f1s - f2s); };
  return ms;
}

// ---------------------------------------------------------------------------
// Discrete monotonicity pairing
// ---------------------------------------------------------------------------

/// <A(u)u - A(w)w, u - w> with A(v) = A_lin + A_nl(v); strictly positive
/// for u != w by the monotone structure of the flux operator.
inline double monotonicity_pairing(const MixedSpace& sp, const ProblemData& data,
                                   const SaddleSystem& sys, const Vector& u, const Vector& w) {
  DiscreteState su = DiscreteState::zero(sp), sw = DiscreteState::zero(sp);
  su.u = u;
  sw.u = w;
  SparseMatrix Au = assemble_forchheimer(sp, data, su);
  SparseMatrix Aw = assemble_forchheimer(sp, data, sw);
  Vector lhs = sys.A_lin * (u - w) + Au * u - Aw * w;
  return lhs.dot(u - w);
}

}  // namespace fracflow

#endif  // FRACFLOW_ANALYSIS_HPP
