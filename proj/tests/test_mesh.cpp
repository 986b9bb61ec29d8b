#include <catch2/catch_amalgamated.hpp>

#include "fracflow/mesh.hpp"

using namespace fracflow;

namespace {
const Rect kDomain{0.0, 2.0, 0.0, 1.0};
}

TEST_CASE("coarsest fractured mesh has the expected counts") {
  Mesh m = build_mesh(kDomain, 1.0, 2, 1);
  CHECK(m.vertices.size() == 6);
  CHECK(m.triangles.size() == 4);
  CHECK(m.edges.size() == 9);
  CHECK(m.fracture_segments.size() == 1);
  CHECK(m.h == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));

  auto fv = m.fracture_vertices();
  REQUIRE(fv.size() == 2);
  CHECK(m.vertices[fv[0]].y == Catch::Approx(0.0).margin(1e-14));
  CHECK(m.vertices[fv[1]].y == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("nx=4, ny=2 mesh has 16 triangles and a two-segment fracture") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  CHECK(m.triangles.size() == 16);
  CHECK(m.fracture_segments.size() == 2);

  double area = 0.0;
  for (const auto& t : m.triangles) area += t.area;
  CHECK(area == Catch::Approx(kDomain.area()).epsilon(1e-12));

  int n1 = 0, n2 = 0;
  for (const auto& t : m.triangles) (t.subdomain == 1 ? n1 : n2)++;
  CHECK(n1 == 8);
  CHECK(n2 == 8);
}

TEST_CASE("edge incidence and classification are consistent") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  for (const auto& e : m.edges) {
    switch (e.kind) {
      case EdgeKind::Boundary:
        REQUIRE(e.tri[0] >= 0);
        CHECK(e.tri[1] == -1);
        break;
      case EdgeKind::Interior:
        REQUIRE(e.tri[0] >= 0);
        REQUIRE(e.tri[1] >= 0);
        CHECK(m.triangles[e.tri[0]].subdomain == m.triangles[e.tri[1]].subdomain);
        break;
      case EdgeKind::Fracture:
        REQUIRE(e.tri[0] >= 0);
        REQUIRE(e.tri[1] >= 0);
        CHECK(m.triangles[e.tri[0]].subdomain == 1);
        CHECK(m.triangles[e.tri[1]].subdomain == 2);
        CHECK(e.normal.x == Catch::Approx(1.0).epsilon(1e-14));
        CHECK(e.normal.y == Catch::Approx(0.0).margin(1e-14));
        break;
    }
    CHECK(e.length == Catch::Approx((m.vertices[e.b] - m.vertices[e.a]).norm()));
  }
}

TEST_CASE("boundary edge normals point outward") {
  Mesh m = build_mesh(kDomain, 1.0, 4, 2);
  for (const auto& e : m.edges) {
    if (e.kind != EdgeKind::Boundary) continue;
    Vec2 mid = (m.vertices[e.a] + m.vertices[e.b]) * 0.5;
    Vec2 to_tri = m.centroid(e.tri[0]) - mid;
    CHECK(to_tri.dot(e.normal) < 0.0);
  }
}

TEST_CASE("uniform refinement quadruples cells and halves h") {
  Mesh coarse = build_mesh(kDomain, 1.0, 2, 1);
  Mesh fine = refine(coarse);
  CHECK(fine.triangles.size() == 4 * coarse.triangles.size());
  CHECK(fine.h == Catch::Approx(0.5 * coarse.h).epsilon(1e-14));
  CHECK(fine.fracture_segments.size() == 2 * coarse.fracture_segments.size());

  double area = 0.0;
  for (const auto& t : fine.triangles) area += t.area;
  CHECK(area == Catch::Approx(kDomain.area()).epsilon(1e-12));

  for (const auto& t : fine.triangles) {
    double cx = fine.centroid(static_cast<int>(&t - fine.triangles.data())).x;
    CHECK(t.subdomain == (cx > fine.fracture_x ? 2 : 1));
  }
}

TEST_CASE("fracture position snaps to the grid or is rejected") {
  Mesh m = build_mesh(kDomain, 1.0 + 1e-12, 2, 1);
  CHECK(m.fracture_x == Catch::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(build_mesh(kDomain, 0.7, 2, 1), MeshError);
  CHECK_THROWS_AS(build_mesh(kDomain, 2.0, 2, 1), MeshError);
  CHECK_THROWS_AS(build_mesh(kDomain, -1.0, 2, 1), MeshError);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(build_mesh(Rect{0, 0, 0, 1}, 0.0, 2, 1), MeshError);
  CHECK_THROWS_AS(build_mesh(kDomain, 1.0, 0, 1), MeshError);
}

TEST_CASE("plain mesh has no fracture and a single subdomain") {
  Mesh m = build_mesh_plain(kDomain, 4, 2);
  CHECK_FALSE(m.has_fracture());
  for (const auto& t : m.triangles) CHECK(t.subdomain == 1);
  for (const auto& e : m.edges) CHECK(e.kind != EdgeKind::Fracture);
}
