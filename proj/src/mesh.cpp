#include "padg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace padg {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double scale = (b - a).norm() * (d - c).norm();
  const double tol = 1e-14 * scale;
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  auto sgn = [tol](double v) { return v > tol ? 1 : (v < -tol ? -1 : 0); };
  const int s1 = sgn(o1), s2 = sgn(o2), s3 = sgn(o3), s4 = sgn(o4);
  if (s1 * s2 < 0 && s3 * s4 < 0) return true;
  if (s1 == 0 && on_segment(c, a, b)) return true;
  if (s2 == 0 && on_segment(d, a, b)) return true;
  if (s3 == 0 && on_segment(a, c, d)) return true;
  if (s4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d1 = orient(a, b, p);
  const double d2 = orient(b, c, p);
  const double d3 = orient(c, a, p);
  return d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0;
}

std::vector<Triangle> ear_clip(const std::vector<Vec2>& polygon, double area) {
  std::vector<int> idx(polygon.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<Triangle> out;
  const double tol = 1e-14 * area;
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    const std::size_t n = idx.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = polygon[idx[(i + n - 1) % n]];
      const Vec2& b = polygon[idx[i]];
      const Vec2& c = polygon[idx[(i + 1) % n]];
      const double o = orient(a, b, c);
      if (o < -tol) continue;  // reflex
      if (std::abs(o) <= tol) {
        // collinear vertex: drop it without emitting a triangle
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
      bool contains = false;
      for (std::size_t j = 0; j < n && !contains; ++j) {
        if (j == i || j == (i + 1) % n || j == (i + n - 1) % n) continue;
        const Vec2& q = polygon[idx[j]];
        if ((q - a).norm() == 0.0 || (q - c).norm() == 0.0) continue;
        contains = point_in_triangle(q, a, b, c);
      }
      if (contains) continue;
      out.push_back(Triangle{{a, b, c}});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 10 * polygon.size()) {
      throw MeshError("ear clipping failed: polygon is not simple");
    }
  }
  const Triangle last{{polygon[idx[0]], polygon[idx[1]], polygon[idx[2]]}};
  if (last.signed_area() > tol) out.push_back(last);
  return out;
}

}  // namespace

double Triangle::signed_area() const {
  return 0.5 * orient(vertices[0], vertices[1], vertices[2]);
}

double polygon_signed_area(const std::vector<Vec2>& polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * a;
}

bool polygon_is_simple(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((polygon[i] - polygon[j]).norm() == 0.0) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges
      if (segments_intersect(a, b, polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

ElementGeometry polygon_geometry(const std::vector<Vec2>& polygon) {
  ElementGeometry g;
  const double area = polygon_signed_area(polygon);
  if (!(area > 0.0)) throw MeshError("degenerate cell: non-positive area");
  if (!polygon_is_simple(polygon)) {
    throw MeshError("non-simple polygon (self-intersecting or repeated vertex)");
  }
  g.area = area;

  g.bbox.lower = polygon.front();
  g.bbox.upper = polygon.front();
  for (const Vec2& v : polygon) {
    g.bbox.lower = g.bbox.lower.cwiseMin(v);
    g.bbox.upper = g.bbox.upper.cwiseMax(v);
  }
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    for (std::size_t j = i + 1; j < polygon.size(); ++j) {
      g.diameter = std::max(g.diameter, (polygon[i] - polygon[j]).norm());
    }
  }

  Vec2 c(0.0, 0.0);
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    c += (a + b) * cross(a, b);
  }
  g.centroid = c / (6.0 * area);

  // Fan from the centroid when the polygon is star-shaped with respect to it.
  bool star = true;
  std::vector<Triangle> fan;
  fan.reserve(n);
  for (std::size_t i = 0; i < n && star; ++i) {
    Triangle t{{g.centroid, polygon[i], polygon[(i + 1) % n]}};
    if (t.signed_area() <= 1e-12 * area) star = false;
    fan.push_back(t);
  }
  g.sub_triangles = star ? std::move(fan) : ear_clip(polygon, area);
  return g;
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
           std::vector<int> materials)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), materials_(std::move(materials)) {
  if (materials_.size() != cells_.size()) {
    throw MeshError("material list size does not match cell count");
  }
  const int nv = num_vertices();
  geometry_.reserve(cells_.size());
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto& loop = cells_[k];
    if (loop.size() < 3) {
      throw MeshError("degenerate cell " + std::to_string(k) + ": fewer than 3 vertices");
    }
    std::vector<Vec2> poly;
    poly.reserve(loop.size());
    for (int v : loop) {
      if (v < 0 || v >= nv) {
        throw MeshError("cell " + std::to_string(k) + " references vertex " + std::to_string(v) +
                        " out of range");
      }
      poly.push_back(vertices_[v]);
    }
    const double a = polygon_signed_area(poly);
    if (std::abs(a) <= 0.0) {
      throw MeshError("degenerate cell " + std::to_string(k) + ": zero area");
    }
    if (a < 0.0) {
      throw MeshError("cell " + std::to_string(k) + " is not counter-clockwise");
    }
    try {
      geometry_.push_back(polygon_geometry(poly));
    } catch (const MeshError& e) {
      throw MeshError("cell " + std::to_string(k) + ": " + e.what());
    }
  }
  build_faces();
}

void Mesh::build_faces() {
  std::map<std::pair<int, int>, int> lookup;
  cell_faces_.assign(cells_.size(), {});
  for (int k = 0; k < num_cells(); ++k) {
    const auto& loop = cells_[k];
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto it = lookup.find({key.first, key.second});
      if (it == lookup.end()) {
        Face f;
        f.vertices = {a, b};
        f.cells = {k, -1};
        const Vec2 d = vertices_[b] - vertices_[a];
        f.length = d.norm();
        f.normal = Vec2(d.y(), -d.x()) / f.length;
        f.tangent = Vec2(-f.normal.y(), f.normal.x());
        lookup.emplace(std::pair{key.first, key.second}, num_faces());
        cell_faces_[k].push_back(num_faces());
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.cells[1] >= 0) {
          throw MeshError("inconsistent face sharing: edge (" + std::to_string(a) + "," +
                          std::to_string(b) + ") shared by more than 2 cells");
        }
        if (f.cells[0] == k) {
          throw MeshError("cell " + std::to_string(k) + " traverses an edge twice");
        }
        if (f.vertices[0] != b || f.vertices[1] != a) {
          throw MeshError("inconsistent orientation on edge (" + std::to_string(a) + "," +
                          std::to_string(b) + ")");
        }
        f.cells[1] = k;
        cell_faces_[k].push_back(it->second);
      }
    }
  }
  neighbors_.assign(cells_.size(), {});
  for (const Face& f : faces_) {
    if (!f.is_interior()) continue;
    neighbors_[f.cells[0]].push_back(f.cells[1]);
    neighbors_[f.cells[1]].push_back(f.cells[0]);
  }
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

int Mesh::num_interior_faces() const {
  return static_cast<int>(
      std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.is_interior(); }));
}

double Mesh::mesh_size() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.diameter);
  return h;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

double Mesh::min_face_to_diameter_ratio() const {
  double r = 1e300;
  for (int k = 0; k < num_cells(); ++k) {
    for (int f : cell_faces_[k]) r = std::min(r, faces_[f].length / geometry_[k].diameter);
  }
  return r;
}

Mesh load_mesh(std::string_view source) {
  std::istringstream in{std::string(source)};
  long long nv = -1, nc = -1;
  if (!(in >> nv >> nc) || nv < 3 || nc < 1) {
    throw MeshError("malformed mesh header: expected `NV NC`");
  }
  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    double x, y;
    if (!(in >> x >> y)) throw MeshError("malformed vertex line " + std::to_string(i));
    vertices[static_cast<std::size_t>(i)] = Vec2(x, y);
  }
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(nc));
  std::vector<int> materials(static_cast<std::size_t>(nc));
  for (long long k = 0; k < nc; ++k) {
    int m, n;
    if (!(in >> m >> n)) throw MeshError("malformed cell line " + std::to_string(k));
    if (n < 0) throw MeshError("malformed cell line " + std::to_string(k));
    auto& loop = cells[static_cast<std::size_t>(k)];
    loop.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      if (!(in >> loop[static_cast<std::size_t>(i)])) {
        throw MeshError("malformed cell line " + std::to_string(k));
      }
    }
    materials[static_cast<std::size_t>(k)] = m;
  }
  std::string trailing;
  if (in >> trailing) throw MeshError("malformed mesh: trailing content `" + trailing + "`");
  return Mesh(std::move(vertices), std::move(cells), std::move(materials));
}

Mesh load_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_mesh(buffer.str());
}

std::string write_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  for (const Vec2& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (int k = 0; k < mesh.num_cells(); ++k) {
    out << mesh.material(k) << ' ' << mesh.cell(k).size();
    for (int v : mesh.cell(k)) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

ElementGeometry element_geometry(const Mesh& mesh, int k) {
  if (k < 0 || k >= mesh.num_cells()) throw MeshError("cell index out of range");
  return mesh.geometry(k);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule triangle_quadrature(const Triangle& tri, int order) {
  // Collapsed map (u, v) in [0,1]^2 -> A + u (B - A) + u v (C - B), Jacobian 2|T| u.
  const int n = std::max(1, (order + 3) / 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const Vec2& a = tri.vertices[0];
  const Vec2& b = tri.vertices[1];
  const Vec2& c = tri.vertices[2];
  const double jac = 2.0 * std::abs(tri.signed_area());
  QuadratureRule rule;
  rule.points.reserve(static_cast<std::size_t>(n * n));
  rule.weights.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      rule.points.push_back(a + u * (b - a) + u * v * (c - b));
      rule.weights.push_back(0.25 * w[i] * w[j] * jac * u);
    }
  }
  return rule;
}

QuadratureRule quadrature(const ElementGeometry& geom, int order) {
  QuadratureRule rule;
  for (const Triangle& t : geom.sub_triangles) {
    QuadratureRule r = triangle_quadrature(t, order);
    rule.points.insert(rule.points.end(), r.points.begin(), r.points.end());
    rule.weights.insert(rule.weights.end(), r.weights.begin(), r.weights.end());
  }
  return rule;
}

QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int order) {
  const int n = std::max(1, (order + 2) / 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double len = (b - a).norm();
  QuadratureRule rule;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (x[i] + 1.0);
    rule.points.push_back(a + s * (b - a));
    rule.weights.push_back(0.5 * w[i] * len);
  }
  return rule;
}

}  // namespace padg
