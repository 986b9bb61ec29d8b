#ifndef FRACFLOW_SOLVER_HPP
#define FRACFLOW_SOLVER_HPP

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <chrono>

#include "fracflow/assembly.hpp"
#include "fracflow/norms.hpp"

namespace fracflow {

enum class InitialState { Zero, Given, DarcySolve };
enum class LinearBackend { DirectSparse, Uzawa };

struct SolverOptions {
  double tol_rel = 1e-12;
  double tol_abs = 1e-13;
  int max_iter = 50;
  double damping = 1.0;  // in (0, 1]
  InitialState initial_state = InitialState::DarcySolve;
  LinearBackend backend = LinearBackend::DirectSparse;

  void check() const {
    if (!(tol_rel > 0) || !(tol_abs > 0)) throw std::invalid_argument("tolerances must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(damping > 0) || damping > 1.0)
      throw std::invalid_argument("damping must lie in (0, 1]");
  }
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_flux_history;
  std::vector<double> residual_mass_history;
  double norm_u_02 = 0.0;    // ||u||_{0,2} over the subdomains
  double norm_u_03 = 0.0;    // ||u||_{0,3} over the subdomains
  double norm_p_032 = 0.0;   // ||p||_{0,3/2} over cells and segments
  double wall_seconds = 0.0;
  bool converged = true;
  bool diverged = false;
  bool residual_nonmonotone = false;  // warning only
  std::string message;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline SparseMatrix saddle_matrix(const SparseMatrix& A, const SparseMatrix& B) {
  int nu = static_cast<int>(A.rows());
  int np = static_cast<int>(B.rows());
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(A.nonZeros() + 2 * B.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      ts.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      ts.emplace_back(nu + r, c, it.value());
      ts.emplace_back(c, nu + r, -it.value());
    }
  SparseMatrix K(nu + np, nu + np);
  K.setFromTriplets(ts.begin(), ts.end());
  return K;
}

inline DiscreteState solve_direct(const MixedSpace& sp, const SparseMatrix& A,
                                  const SparseMatrix& B, const Vector& g, const Vector& f) {
  SparseMatrix K = saddle_matrix(A, B);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success)
    throw SolverError("singular saddle-point factorization: " + lu.lastErrorMessage());
  Vector rhs(K.rows());
  rhs.head(sp.n_flux) = g;
  rhs.tail(sp.n_pressure) = f;
  Vector sol = lu.solve(rhs);
  DiscreteState s;
  s.u = sol.head(sp.n_flux);
  s.p = sol.tail(sp.n_pressure);
  return s;
}

}  // namespace detail

/// Direct sparse solve of the linear saddle system with flux block A.
inline DiscreteState solve_linear_saddle(const SaddleSystem& sys,
                                         const SparseMatrix* A_nl = nullptr) {
  SparseMatrix A = A_nl ? SparseMatrix(sys.A_lin + *A_nl) : sys.A_lin;
  return detail::solve_direct(*sys.space, A, sys.B, sys.g_vec, sys.f_vec);
}

/// Uzawa-type iterative solve: the pressure is obtained by conjugate
/// gradients on the Schur complement B A^-1 B^T, preconditioned by the
/// pressure mass (entity measures), with A applied through a Cholesky
/// factorization.
inline DiscreteState solve_uzawa(const SaddleSystem& sys, const SolverOptions& options,
                                 const SparseMatrix* A_nl = nullptr, int* iters_out = nullptr) {
  options.check();
  const MixedSpace& sp = *sys.space;
  const Mesh& mesh = *sp.mesh;
  SparseMatrix A = A_nl ? SparseMatrix(sys.A_lin + *A_nl) : sys.A_lin;

  Eigen::SimplicialLDLT<SparseMatrix> chol;
  chol.compute(A);
  if (chol.info() != Eigen::Success)
    throw SolverError("flux-block factorization failed in Uzawa solve");

  // Pressure mass diagonal: cell areas and segment lengths.
  Vector Mdiag(sp.n_pressure);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) Mdiag[t] = mesh.triangles[t].area;
  for (size_t k = 0; k < mesh.fracture_segments.size(); ++k)
    Mdiag[mesh.triangles.size() + k] = mesh.edges[mesh.fracture_segments[k]].length;

  auto schur = [&](const Vector& p) -> Vector {
    return sys.B * chol.solve(Vector(sys.B.transpose() * p));
  };

  Vector rhs = sys.f_vec - sys.B * chol.solve(sys.g_vec);
  // Initial guess: best constant-pressure fit, which solves hydrostatic
  // configurations outright.
  Vector ones = Vector::Ones(sp.n_pressure);
  Vector w = schur(ones);
  double ww = w.dot(w);
  Vector p = ww > 0 ? Vector((rhs.dot(w) / ww) * ones) : Vector::Zero(sp.n_pressure);
  Vector r = rhs - schur(p);
  Vector z = r.cwiseQuotient(Mdiag);
  Vector d = z;
  double rz = r.dot(z);
  double tol = options.tol_abs + options.tol_rel * rhs.norm();
  int it = 0;
  int max_it = std::max(options.max_iter, 2 * sp.n_pressure);
  double best = r.norm();
  int stagnant = 0;
  while (r.norm() > tol && it < max_it) {
    Vector Sd = schur(d);
    double dSd = d.dot(Sd);
    if (dSd <= 0) throw SolverError("Uzawa: Schur complement not positive definite");
    double a = rz / dSd;
    p += a * d;
    r -= a * Sd;
    z = r.cwiseQuotient(Mdiag);
    double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
    ++it;
    if (r.norm() < best * (1.0 - 1e-14)) {
      best = r.norm();
      stagnant = 0;
    } else if (++stagnant > 50) {
      throw SolverError("Uzawa: stagnation, residual " + std::to_string(r.norm()));
    }
  }
  if (r.norm() > tol)
    throw SolverError("Uzawa: no convergence within " + std::to_string(max_it) +
                      " iterations");
  if (iters_out) *iters_out = it;
  DiscreteState s;
  s.p = p;
  s.u = chol.solve(Vector(sys.g_vec + sys.B.transpose() * p));
  return s;
}

namespace detail {

inline DiscreteState inner_solve(const SaddleSystem& sys, const SolverOptions& options,
                                 const SparseMatrix* A_nl) {
  if (options.backend == LinearBackend::Uzawa) return solve_uzawa(sys, options, A_nl);
  return solve_linear_saddle(sys, A_nl);
}

inline bool all_darcy(const ProblemData& d) {
  bool m1 = d.law1 == FlowLaw::Darcy || (d.beta1.is_constant() && d.beta1.at(0) == 0.0);
  bool m2 = d.law2 == FlowLaw::Darcy || (d.beta2.is_constant() && d.beta2.at(0) == 0.0);
  bool mg = d.law_gamma == FlowLaw::Darcy ||
            (d.beta_gamma.is_constant() && d.beta_gamma.at(0) == 0.0);
  return m1 && m2 && mg;
}

}  // namespace detail

/// Damped Picard (frozen-|u|) iteration for the Darcy-Forchheimer
/// problem. Each iterate solves the saddle system with flux block
/// A_lin + A_nl(u_k); terminates on the combined residual.
inline std::pair<DiscreteState, SolveReport> solve_picard(
    const MixedSpace& sp, const ProblemData& data, const SolverOptions& options,
    const DiscreteState* given_initial = nullptr) {
  options.check();
  auto t0 = std::chrono::steady_clock::now();
  SaddleSystem sys = assemble_linear(sp, data);
  SolveReport rep;

  DiscreteState state;
  switch (options.initial_state) {
    case InitialState::Zero:
      state = DiscreteState::zero(sp);
      break;
    case InitialState::Given:
      if (!given_initial) throw std::invalid_argument("InitialState::Given without a state");
      state = *given_initial;
      break;
    case InitialState::DarcySolve:
      state = detail::inner_solve(sys, options, nullptr);
      break;
  }

  bool linear = detail::all_darcy(data);
  auto record = [&](const Residual& r) {
    rep.residual_flux_history.push_back(r.flux_2);
    rep.residual_mass_history.push_back(r.mass_2);
  };

  Residual r0 = residual(sys, data, state);
  record(r0);
  double target = options.tol_abs + options.tol_rel * r0.combined_2();

  if (linear) {
    if (r0.combined_2() > target) {
      state = detail::inner_solve(sys, options, nullptr);
      record(residual(sys, data, state));
    }
    rep.iterations = 1;
  } else {
    double theta = options.damping;
    double prev = r0.combined_2();
    int grow_streak = 0;
    int it = 0;
    while (it < options.max_iter) {
      SparseMatrix A_nl = assemble_forchheimer(sp, data, state);
      DiscreteState next = detail::inner_solve(sys, options, &A_nl);
      if (theta < 1.0) {
        next.u = theta * next.u + (1.0 - theta) * state.u;
        next.p = theta * next.p + (1.0 - theta) * state.p;
      }
      Residual r = residual(sys, data, next);
      ++it;
      if (r.combined_2() > prev && theta > 1.0 / 16.0) {
        theta *= 0.5;  // retry the step with stronger damping
        rep.residual_nonmonotone = true;
        continue;
      }
      state = next;
      record(r);
      if (r.combined_2() > 10.0 * prev && ++grow_streak >= 5) {
        rep.diverged = true;
        rep.converged = false;
        rep.message = "divergence detected (residual growth)";
        break;
      }
      if (r.combined_2() <= prev) grow_streak = 0;
      prev = r.combined_2();
      if (r.combined_2() <= target) break;
    }
    rep.iterations = it;
    if (!rep.diverged && prev > target) {
      rep.converged = false;
      rep.message = "max_iter exceeded, returning best iterate";
    }
  }

  NormBundle nb = compute_norms(sp, state);
  rep.norm_u_02 = nb.u_02();
  rep.norm_u_03 = nb.u_03();
  rep.norm_p_032 = nb.p_032();
  auto t1 = std::chrono::steady_clock::now();
  rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return {state, rep};
}

}  // namespace fracflow

#endif  // FRACFLOW_SOLVER_HPP
