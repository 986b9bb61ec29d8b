#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fracflow/analysis.hpp"

using namespace fracflow;

namespace {

const Rect kDomain{0.0, 2.0, 0.0, 1.0};

ProblemData basic_data() {
  ProblemData d;
  d.xi = 0.75;
  d.beta_gamma = ScalarField::constant(1.0);
  return d;
}

}  // namespace

TEST_CASE("flux block is symmetric") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  SaddleSystem sys = assemble_linear(sp, basic_data());
  Eigen::MatrixXd A = Eigen::MatrixXd(sys.A_lin);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("interface coupling block matches kappa/|e| [[xi, xibar], [xibar, xi]]") {
  Mesh m = build_mesh(kDomain, 1.0, 2, 1);
  MixedSpace sp = build_space(m);

  ProblemData d1 = basic_data();
  d1.kappa = ScalarField::constant(1.0, true);
  ProblemData d2 = basic_data();
  d2.kappa = ScalarField::constant(2.0, true);
  // The kappa increment isolates the interface block.
  Eigen::MatrixXd diff =
      Eigen::MatrixXd(assemble_linear(sp, d2).A_lin) - Eigen::MatrixXd(assemble_linear(sp, d1).A_lin);

  int e = m.fracture_segments[0];
  double len = m.edges[e].length;
  int a = sp.edge_dof_side1[e], b = sp.edge_dof_side2[e];
  CHECK(diff(a, a) == Catch::Approx(0.75 / len).epsilon(1e-13));
  CHECK(diff(b, b) == Catch::Approx(0.75 / len).epsilon(1e-13));
  CHECK(diff(a, b) == Catch::Approx(0.25 / len).epsilon(1e-13));
  CHECK(diff(b, a) == Catch::Approx(0.25 / len).epsilon(1e-13));
  diff(a, a) = diff(b, b) = diff(a, b) = diff(b, a) = 0.0;
  CHECK(diff.cwiseAbs().maxCoeff() <= 1e-14);

  // Eigenvalues of [[xi, xibar], [xibar, xi]] are 1 and 2 xi - 1.
  Eigen::Matrix2d blk;
  blk << 0.75, 0.25, 0.25, 0.75;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(blk);
  CHECK(es.eigenvalues()(0) == Catch::Approx(0.5).epsilon(1e-13));
  CHECK(es.eigenvalues()(1) == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("divergence rows carry the normal-trace jump with the right signs") {
  Mesh m = build_mesh(kDomain, 1.0, 2, 1);
  MixedSpace sp = build_space(m);
  SaddleSystem sys = assemble_linear(sp, basic_data());
  Eigen::MatrixXd B = Eigen::MatrixXd(sys.B);

  int e = m.fracture_segments[0];
  int row = sp.pressure_dof_of_segment(0);
  CHECK(B(row, sp.edge_dof_side1[e]) == -1.0);
  CHECK(B(row, sp.edge_dof_side2[e]) == 1.0);
  CHECK(B(row, sp.frac_vertex_dof[0]) == -1.0);
  CHECK(B(row, sp.frac_vertex_dof[1]) == 1.0);

  // Triangle rows: +-1 per local edge, signs matching the stored normals.
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
    for (int k = 0; k < 3; ++k)
      CHECK(B(t, sp.flux_dof(t, k)) == sp.edge_sign(t, k));
}

TEST_CASE("Forchheimer augmentation for a constant field is |u| times the mass matrix") {
  Mesh m = build_mesh_plain(kDomain, 4, 2);
  MixedSpace sp = build_space_single(m);
  ProblemData d;
  d.xi = 0.75;
  d.law1 = d.law2 = FlowLaw::DarcyForchheimer;
  d.beta1 = d.beta2 = ScalarField::constant(1.0);
  d.law_gamma = FlowLaw::Darcy;

  DiscreteState s = DiscreteState::zero(sp);
  interpolate_flux(sp, [](int, const Vec2&) { return Vec2{3.0, 4.0}; }, s.u);  // |u| = 5
  SparseMatrix A_nl = assemble_forchheimer(sp, d, s);

  ProblemData unit = d;
  unit.law1 = unit.law2 = FlowLaw::Darcy;  // alpha = 1 mass matrix only
  SparseMatrix M = assemble_linear(sp, unit).A_lin;
  Eigen::MatrixXd diff = Eigen::MatrixXd(A_nl) - 5.0 * Eigen::MatrixXd(M);
  CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12 * Eigen::MatrixXd(M).cwiseAbs().maxCoeff());
}

TEST_CASE("Forchheimer augmentation is symmetric positive semidefinite") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  ProblemData d = basic_data();
  d.law1 = d.law2 = FlowLaw::DarcyForchheimer;
  d.beta1 = d.beta2 = ScalarField::constant(0.7);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  DiscreteState s = DiscreteState::zero(sp);
  for (int i = 0; i < sp.n_flux; ++i) s.u[i] = uni(rng);
  Eigen::MatrixXd A = Eigen::MatrixXd(assemble_forchheimer(sp, d, s));
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + A.cwiseAbs().maxCoeff()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
}

TEST_CASE("discrete flux operator is strictly monotone on random pairs") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  ProblemData d = basic_data();
  d.law1 = d.law2 = FlowLaw::DarcyForchheimer;
  d.beta1 = d.beta2 = ScalarField::constant(1.0);
  SaddleSystem sys = assemble_linear(sp, d);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector u(sp.n_flux), w(sp.n_flux);
    for (int i = 0; i < sp.n_flux; ++i) {
      u[i] = uni(rng);
      w[i] = uni(rng);
    }
    double pairing = monotonicity_pairing(sp, d, sys, u, w);
    double scale = (u - w).squaredNorm();
    CHECK(pairing > 1e-12 * scale);
  }
}

TEST_CASE("residual of a hand-built exact state vanishes") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  ProblemData d = basic_data();
  d.p_d1.assign(m.edges.size(), 4.0);
  d.p_d2.assign(m.edges.size(), 4.0);
  d.p_d_gamma = {4.0, 4.0};
  SaddleSystem sys = assemble_linear(sp, d);

  DiscreteState s = DiscreteState::zero(sp);
  s.p = Vector::Constant(sp.n_pressure, 4.0);  // hydrostatic
  Residual r = residual(sys, d, s);
  CHECK(r.flux_max <= 1e-12);
  CHECK(r.mass_max <= 1e-12);
}

TEST_CASE("MatrixMarket dump has a consistent header and entry count") {
  Mesh m = build_mesh(kDomain, 1.0, 2, 1);
  MixedSpace sp = build_space(m);
  SaddleSystem sys = assemble_linear(sp, basic_data());
  std::ostringstream os;
  write_matrix_market(sys.A_lin, sys.B, os);
  std::istringstream is(os.str());
  std::string banner;
  std::getline(is, banner);
  CHECK(banner == "%%MatrixMarket matrix coordinate real general");
  int rows, cols;
  long nnz;
  is >> rows >> cols >> nnz;
  CHECK(rows == sp.n_flux + sp.n_pressure);
  CHECK(cols == rows);
  long count = 0;
  int i, j;
  double v;
  while (is >> i >> j >> v) {
    CHECK(i >= 1);
    CHECK(i <= rows);
    ++count;
  }
  CHECK(count == nnz);
}
