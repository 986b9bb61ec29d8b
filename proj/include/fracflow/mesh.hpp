#ifndef FRACFLOW_MESH_HPP
#define FRACFLOW_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Rect {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

enum class EdgeKind { Interior, Boundary, Fracture };

struct Triangle {
  std::array<int, 3> v{};     // vertex indices, CCW
  int subdomain = 1;          // 1 or 2
  double area = 0.0;
  std::array<int, 3> edge{};  // edge[k] is opposite vertex v[k]
};

struct Edge {
  int a = -1, b = -1;         // vertex indices; fracture edges ordered bottom -> top
  EdgeKind kind = EdgeKind::Interior;
  // tri[0] is the triangle the stored normal points out of; for fracture
  // edges tri[0] lies in Omega_1 (the normal points from Omega_1 into
  // Omega_2). Boundary edges have tri[1] = -1.
  std::array<int, 2> tri{-1, -1};
  Vec2 normal;                // unit, fixed global orientation
  double length = 0.0;
};

class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Fracture-conforming triangulation of a rectangle. The fracture is a
/// vertical line x = fracture_x splitting the domain into Omega_1 (left)
/// and Omega_2 (right); the 1D fracture mesh is inherited from the
/// triangle edges lying on it. Immutable after construction.
struct Mesh {
  Rect domain;
  double fracture_x = std::numeric_limits<double>::quiet_NaN();  // NaN: no fracture
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  std::vector<int> fracture_segments;       // edge indices, ordered bottom -> top
  std::array<int, 2> fracture_endpoints{-1, -1};  // bottom, top vertex
  double h = 0.0;                           // max edge length

  bool has_fracture() const { return !fracture_segments.empty(); }

  /// Ordered fracture vertices v_0..v_K (bottom to top); segment k runs
  /// from v_k to v_{k+1}.
  std::vector<int> fracture_vertices() const {
    std::vector<int> vs;
    if (fracture_segments.empty()) return vs;
    vs.push_back(edges[fracture_segments.front()].a);
    for (int e : fracture_segments) vs.push_back(edges[e].b);
    return vs;
  }

  Vec2 centroid(int t) const {
    const auto& tr = triangles[t];
    return (vertices[tr.v[0]] + vertices[tr.v[1]] + vertices[tr.v[2]]) * (1.0 / 3.0);
  }
};

namespace detail {

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Builds edge connectivity, classification and the fracture polyline from
// vertices + triangles. Triangles are reoriented CCW first.
inline void finalize_mesh(Mesh& m) {
  for (auto& t : m.triangles) {
    double sa = signed_area(m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]]);
    if (sa < 0) {
      std::swap(t.v[1], t.v[2]);
      sa = -sa;
    }
    if (sa <= 0.0) throw MeshError("degenerate triangle encountered");
    t.area = sa;
  }

  const double frac_tol = 1e-9 * std::max(m.domain.width(), m.domain.height());
  auto on_fracture = [&](int v) {
    return std::isfinite(m.fracture_x) && std::abs(m.vertices[v].x - m.fracture_x) <= frac_tol;
  };

  std::map<std::pair<int, int>, int> edge_of;
  m.edges.clear();
  for (int ti = 0; ti < static_cast<int>(m.triangles.size()); ++ti) {
    auto& t = m.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      int va = t.v[(k + 1) % 3];
      int vb = t.v[(k + 2) % 3];
      auto key = std::minmax(va, vb);
      auto it = edge_of.find(key);
      int ei;
      if (it == edge_of.end()) {
        Edge e;
        e.a = key.first;
        e.b = key.second;
        bool frac = on_fracture(e.a) && on_fracture(e.b);
        if (frac && m.vertices[e.a].y > m.vertices[e.b].y) std::swap(e.a, e.b);
        Vec2 tv = m.vertices[e.b] - m.vertices[e.a];
        e.length = tv.norm();
        e.normal = Vec2{tv.y / e.length, -tv.x / e.length};
        if (frac && e.normal.x < 0) {  // enforce normal = +x on the fracture
          std::swap(e.a, e.b);
          tv = m.vertices[e.b] - m.vertices[e.a];
          e.normal = Vec2{tv.y / e.length, -tv.x / e.length};
        }
        e.kind = frac ? EdgeKind::Fracture : EdgeKind::Interior;
        ei = static_cast<int>(m.edges.size());
        m.edges.push_back(e);
        edge_of.emplace(key, ei);
      } else {
        ei = it->second;
      }
      t.edge[k] = ei;
      // Attach triangle on the side the normal points away from.
      Edge& e = m.edges[ei];
      Vec2 mid = (m.vertices[e.a] + m.vertices[e.b]) * 0.5;
      Vec2 to_tri = m.centroid(ti) - mid;
      int slot = (to_tri.dot(e.normal) < 0) ? 0 : 1;
      if (e.tri[slot] != -1) throw MeshError("more than two triangles share an edge");
      e.tri[slot] = ti;
    }
  }

  m.h = 0.0;
  for (auto& e : m.edges) {
    if (e.tri[0] == -1 || e.tri[1] == -1) {
      if (e.kind == EdgeKind::Fracture)
        throw MeshError("fracture edge with a single adjacent triangle");
      e.kind = (e.tri[0] == -1 || e.tri[1] == -1) ? EdgeKind::Boundary : e.kind;
      // Keep the adjacent triangle in slot 0 with an outward normal.
      if (e.tri[0] == -1) {
        e.tri[0] = e.tri[1];
        e.tri[1] = -1;
        std::swap(e.a, e.b);
        e.normal = Vec2{-e.normal.x, -e.normal.y};
      }
    } else if (e.kind == EdgeKind::Fracture) {
      if (m.triangles[e.tri[0]].subdomain != 1 || m.triangles[e.tri[1]].subdomain != 2)
        throw MeshError("fracture edge not between Omega_1 and Omega_2");
    }
    m.h = std::max(m.h, e.length);
  }

  // Fracture polyline, ordered by the y-coordinate of the lower vertex.
  m.fracture_segments.clear();
  for (int ei = 0; ei < static_cast<int>(m.edges.size()); ++ei)
    if (m.edges[ei].kind == EdgeKind::Fracture) m.fracture_segments.push_back(ei);
  std::sort(m.fracture_segments.begin(), m.fracture_segments.end(), [&](int i, int j) {
    return m.vertices[m.edges[i].a].y < m.vertices[m.edges[j].a].y;
  });
  if (!m.fracture_segments.empty()) {
    for (size_t k = 0; k + 1 < m.fracture_segments.size(); ++k)
      if (m.edges[m.fracture_segments[k]].b != m.edges[m.fracture_segments[k + 1]].a)
        throw MeshError("fracture segments do not form a connected polyline");
    m.fracture_endpoints = {m.edges[m.fracture_segments.front()].a,
                            m.edges[m.fracture_segments.back()].b};
  } else {
    m.fracture_endpoints = {-1, -1};
  }
}

inline Mesh build_rect_triangulation(const Rect& domain, double fracture_x, int nx, int ny,
                                     bool want_fracture) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw MeshError("degenerate domain extents: width and height must be positive");
  if (nx < 1 || ny < 1) throw MeshError("nx and ny must be >= 1");

  Mesh m;
  m.domain = domain;
  const double dx = domain.width() / nx;
  const double dy = domain.height() / ny;

  if (want_fracture) {
    if (!(fracture_x > domain.x0) || !(fracture_x < domain.x1))
      throw MeshError("fracture_x must lie strictly inside the x-extents");
    // Snap to the nearest grid line; reject if too far off.
    double rel = (fracture_x - domain.x0) / dx;
    double snapped = domain.x0 + std::round(rel) * dx;
    if (std::abs(snapped - fracture_x) > 1e-9 * domain.width())
      throw MeshError("fracture_x does not coincide with a grid line");
    if (!(snapped > domain.x0) || !(snapped < domain.x1))
      throw MeshError("fracture_x snapped onto the domain boundary");
    m.fracture_x = snapped;
  }

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Each cell split along the (i,j)-(i+1,j+1) diagonal.
      int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      Triangle lo, up;
      lo.v = {v00, v10, v11};
      up.v = {v00, v11, v01};
      double cx_lo = (m.vertices[v00].x + m.vertices[v10].x + m.vertices[v11].x) / 3.0;
      double cx_up = (m.vertices[v00].x + m.vertices[v11].x + m.vertices[v01].x) / 3.0;
      lo.subdomain = (want_fracture && cx_lo > m.fracture_x) ? 2 : 1;
      up.subdomain = (want_fracture && cx_up > m.fracture_x) ? 2 : 1;
      m.triangles.push_back(lo);
      m.triangles.push_back(up);
    }
  }

  finalize_mesh(m);
  if (want_fracture && m.fracture_segments.empty())
    throw MeshError("no fracture edges produced");
  return m;
}

}  // namespace detail

/// Criss-cross triangulation of `domain` conforming to the vertical
/// fracture x = fracture_x (snapped to the nearest grid line).
inline Mesh build_mesh(const Rect& domain, double fracture_x, int nx, int ny) {
  return detail::build_rect_triangulation(domain, fracture_x, nx, ny, true);
}

/// Same triangulation without a fracture; the whole rectangle is one
/// subdomain. Used for the single-domain limit study.
inline Mesh build_mesh_plain(const Rect& domain, int nx, int ny) {
  return detail::build_rect_triangulation(domain, 0.0, nx, ny, false);
}

/// Uniform refinement: every triangle split into 4 similar children
/// through its edge midpoints. Tags inherited, h halves exactly.
inline Mesh refine(const Mesh& mesh) {
  Mesh fine;
  fine.domain = mesh.domain;
  fine.fracture_x = mesh.fracture_x;
  fine.vertices = mesh.vertices;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
    midpoint.emplace(key, id);
    return id;
  };

  for (const auto& t : mesh.triangles) {
    int m01 = mid(t.v[0], t.v[1]), m12 = mid(t.v[1], t.v[2]), m02 = mid(t.v[0], t.v[2]);
    for (auto child : {std::array<int, 3>{t.v[0], m01, m02},
                       std::array<int, 3>{m01, t.v[1], m12},
                       std::array<int, 3>{m02, m12, t.v[2]},
                       std::array<int, 3>{m01, m12, m02}}) {
      Triangle c;
      c.v = child;
      c.subdomain = t.subdomain;
      fine.triangles.push_back(c);
    }
  }

  detail::finalize_mesh(fine);
  return fine;
}

/// Legacy-VTK ASCII export of the triangulation with subdomain tags,
/// optionally with cell pressures and centroid velocities.
inline void write_vtk(const Mesh& mesh, std::ostream& os,
                      const std::vector<double>* cell_pressure = nullptr,
                      const std::vector<Vec2>* cell_velocity = nullptr) {
  os << "# vtk DataFile Version 3.0\nfracflow mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.vertices.size() << " double\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.x, v.y);
    os << buf;
  }
  os << "CELLS " << mesh.triangles.size() << " " << 4 * mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles)
    os << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
  os << "CELL_TYPES " << mesh.triangles.size() << "\n";
  for (size_t i = 0; i < mesh.triangles.size(); ++i) os << "5\n";
  os << "CELL_DATA " << mesh.triangles.size() << "\n";
  os << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (const auto& t : mesh.triangles) os << t.subdomain << "\n";
  if (cell_pressure && cell_pressure->size() >= mesh.triangles.size()) {
    os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", (*cell_pressure)[i]);
      os << buf;
    }
  }
  if (cell_velocity && cell_velocity->size() >= mesh.triangles.size()) {
    os << "VECTORS velocity double\n";
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", (*cell_velocity)[i].x,
                    (*cell_velocity)[i].y);
      os << buf;
    }
  }
}

}  // namespace fracflow

#endif  // FRACFLOW_MESH_HPP
