#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace padg {

using Vec2 = Eigen::Vector2d;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundingBox {
  Vec2 lower{0.0, 0.0};
  Vec2 upper{0.0, 0.0};

  double width() const { return upper.x() - lower.x(); }
  double height() const { return upper.y() - lower.y(); }
  double area() const { return width() * height(); }
};

struct Triangle {
  std::array<Vec2, 3> vertices;

  double signed_area() const;
};

/// An edge of the mesh. Side 0 is the cell that traverses the edge from
/// vertices[0] to vertices[1] counter-clockwise; `normal` points out of it.
struct Face {
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> cells{-1, -1};
  Vec2 normal{0.0, 0.0};
  Vec2 tangent{0.0, 0.0};
  double length = 0.0;

  bool is_interior() const { return cells[1] >= 0; }
  /// Outward unit normal seen from `side` (0 or 1).
  Vec2 outward_normal(int side) const { return side == 0 ? normal : Vec2(-normal); }
  Vec2 outward_tangent(int side) const { return side == 0 ? tangent : Vec2(-tangent); }
  int side_of(int cell) const { return cells[0] == cell ? 0 : 1; }
  int other(int cell) const { return cells[0] == cell ? cells[1] : cells[0]; }
};

struct ElementGeometry {
  double diameter = 0.0;
  BoundingBox bbox;
  Vec2 centroid{0.0, 0.0};
  std::vector<Triangle> sub_triangles;
  double area = 0.0;
};

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Polygonal mesh with derived face topology. Immutable after construction.
class Mesh {
 public:
  Mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
       std::vector<int> materials);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_interior_faces() const;

  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<int>& cell(int k) const { return cells_[k]; }
  int material(int k) const { return materials_[k]; }
  const std::vector<int>& materials() const { return materials_; }
  const Face& face(int f) const { return faces_[f]; }
  const std::vector<Face>& faces() const { return faces_; }
  /// Face indices of cell k, in the order of its vertex loop.
  const std::vector<int>& cell_faces(int k) const { return cell_faces_[k]; }
  /// Face-sharing neighbours of cell k, sorted ascending.
  const std::vector<int>& neighbors(int k) const { return neighbors_[k]; }
  const ElementGeometry& geometry(int k) const { return geometry_[k]; }

  /// max h_K over the mesh.
  double mesh_size() const;
  double total_area() const;
  /// Smallest face-length / h_K ratio over all (cell, face) pairs; reported,
  /// never enforced.
  double min_face_to_diameter_ratio() const;

 private:
  void build_faces();

  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<int> materials_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> cell_faces_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<ElementGeometry> geometry_;
};

/// Parses the text mesh format: `NV NC`, NV lines `x y`, then NC lines
/// `material n v1 ... vn` with counter-clockwise zero-based vertex indices.
Mesh load_mesh(std::string_view source);
Mesh load_mesh_file(const std::filesystem::path& path);
std::string write_mesh(const Mesh& mesh);

ElementGeometry element_geometry(const Mesh& mesh, int k);
ElementGeometry polygon_geometry(const std::vector<Vec2>& polygon);

double polygon_signed_area(const std::vector<Vec2>& polygon);
bool polygon_is_simple(const std::vector<Vec2>& polygon);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate Gauss rule on a triangle, exact for total degree <= order.
QuadratureRule triangle_quadrature(const Triangle& tri, int order);
/// Composite rule over the element's sub-triangles.
QuadratureRule quadrature(const ElementGeometry& geom, int order);
/// Gauss rule on the segment [a, b], exact for degree <= order; weights carry the length.
QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int order);

}  // namespace padg
