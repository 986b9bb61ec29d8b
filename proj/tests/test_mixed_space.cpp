#include <catch2/catch_amalgamated.hpp>

#include "fracflow/mixed_space.hpp"

using namespace fracflow;

namespace {
const Rect kDomain{0.0, 2.0, 0.0, 1.0};
}

TEST_CASE("DOF counts on the coarsest fractured mesh") {
  Mesh m = build_mesh(kDomain, 1.0, 2, 1);
  MixedSpace sp = build_space(m);
  // 9 edges, 1 fracture edge duplicated, 2 fracture vertices.
  CHECK(sp.n_flux == 9 + 1 + 2);
  // 4 triangles + 1 fracture segment.
  CHECK(sp.n_pressure == 5);
  CHECK(sp.n_frac_vertices == 2);

  for (size_t e = 0; e < m.edges.size(); ++e) {
    if (m.edges[e].kind == EdgeKind::Fracture)
      CHECK(sp.edge_dof_side1[e] != sp.edge_dof_side2[e]);
    else
      CHECK(sp.edge_dof_side1[e] == sp.edge_dof_side2[e]);
  }
}

TEST_CASE("space builders reject the wrong mesh kind") {
  Mesh plain = build_mesh_plain(kDomain, 2, 1);
  Mesh frac = build_mesh(kDomain, 1.0, 2, 1);
  CHECK_THROWS_AS(build_space(plain), MeshError);
  CHECK_THROWS_AS(build_space_single(frac), MeshError);
}

TEST_CASE("constant fields are reproduced exactly") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  DiscreteState s = DiscreteState::zero(sp);
  interpolate_flux(sp, [](int, const Vec2&) { return Vec2{1.5, -0.5}; }, s.u);

  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    Vec2 v = evaluate_flux(sp, s, t, m.centroid(t));
    CHECK(v.x == Catch::Approx(1.5).epsilon(1e-12));
    CHECK(v.y == Catch::Approx(-0.5).epsilon(1e-12));
    CHECK(cell_divergence(sp, s, t) == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("linear field (x, y) has divergence 2 everywhere") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  DiscreteState s = DiscreteState::zero(sp);
  interpolate_flux(sp, [](int, const Vec2& x) { return Vec2{x.x, x.y}; }, s.u);

  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
    CHECK(cell_divergence(sp, s, t) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("discrete divergence theorem holds to machine precision") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  MixedSpace sp = build_space(m);
  DiscreteState s = DiscreteState::zero(sp);
  interpolate_flux(sp, [](int, const Vec2& x) { return Vec2{x.x * x.x, -x.y}; }, s.u);

  // Sum of signed cell divergences integrates to the boundary flux.
  double vol_integral = 0.0;
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
    vol_integral += cell_divergence(sp, s, t) * m.triangles[t].area;
  double bnd_flux = 0.0;
  for (size_t e = 0; e < m.edges.size(); ++e)
    if (m.edges[e].kind == EdgeKind::Boundary) bnd_flux += s.u[sp.edge_dof_side1[e]];
  CHECK(vol_integral == Catch::Approx(bnd_flux).margin(1e-13));
}

TEST_CASE("evaluating outside the triangle is an error") {
  Mesh m = build_mesh(kDomain, 1.0, 2, 1);
  MixedSpace sp = build_space(m);
  DiscreteState s = DiscreteState::zero(sp);
  CHECK_THROWS_AS(evaluate_flux(sp, s, 0, Vec2{-5.0, -5.0}), std::invalid_argument);
}

TEST_CASE("single-domain space shares one DOF per edge") {
  Mesh m = build_mesh_plain(kDomain, 4, 2);
  MixedSpace sp = build_space_single(m);
  CHECK(sp.n_flux == static_cast<int>(m.edges.size()));
  CHECK(sp.n_pressure == static_cast<int>(m.triangles.size()));
  CHECK(sp.frac_vertex_dof.empty());
}
