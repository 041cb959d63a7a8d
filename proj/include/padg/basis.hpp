#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "padg/mesh.hpp"

namespace padg {

/// Number of modes of total degree <= p in 2D.
constexpr int local_dim(int p) { return (p + 1) * (p + 2) / 2; }

/// Per-element polynomial degrees, 1 <= p_K <= p_max.
struct DegreeField {
  std::vector<int> p;
  int p_max = 5;

  DegreeField() = default;
  DegreeField(int n, int degree, int pmax) : p(static_cast<std::size_t>(n), degree), p_max(pmax) {}

  int size() const { return static_cast<int>(p.size()); }
  int operator[](int k) const { return p[static_cast<std::size_t>(k)]; }
  int& operator[](int k) { return p[static_cast<std::size_t>(k)]; }
  /// Throws std::invalid_argument if any degree is outside [1, p_max].
  void validate() const;
};

/// Contiguous element-major layout of the unknowns.
struct DofMap {
  std::vector<int> offsets;
  std::vector<int> sizes;
  int total = 0;

  int num_elements() const { return static_cast<int>(sizes.size()); }
  int offset(int k) const { return offsets[static_cast<std::size_t>(k)]; }
  int size(int k) const { return sizes[static_cast<std::size_t>(k)]; }
};

DofMap build_dof_map(const std::vector<int>& degrees);
DofMap build_dof_map(const DegreeField& degrees);

/// Exponents (i, j) of mode m in graded-lexicographic order:
/// degree d lists (d,0), (d-1,1), ..., (0,d).
std::pair<int, int> mode_exponents(int m);

/// Values and physical gradients of the modes at a set of points.
/// Each matrix is (modes x points).
struct BasisValues {
  Eigen::MatrixXd value;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
  // second derivatives, filled only on request
  Eigen::MatrixXd dxx;
  Eigen::MatrixXd dxy;
  Eigen::MatrixXd dyy;

  int modes() const { return static_cast<int>(value.rows()); }
  int points() const { return static_cast<int>(value.cols()); }
};

/// Tensor Legendre modes of total degree <= p, orthonormal on `box`.
BasisValues eval_basis(const BoundingBox& box, int p, const std::vector<Vec2>& points,
                       bool hessians = false);
inline BasisValues eval_basis(const ElementGeometry& geom, int p,
                              const std::vector<Vec2>& points, bool hessians = false) {
  return eval_basis(geom.bbox, p, points, hessians);
}

/// Local mass matrix of the degree-p modes over the polygon.
Eigen::MatrixXd local_mass(const ElementGeometry& geom, int p, int order);

/// L2 projection of f onto P^p(K). Throws std::runtime_error if the local mass
/// matrix is not positive definite.
Eigen::VectorXd project_l2(const std::function<double(const Vec2&)>& f,
                           const ElementGeometry& geom, int p, int order);

/// Evaluate a local expansion at points.
Eigen::VectorXd evaluate(const ElementGeometry& geom, const Eigen::VectorXd& coeffs,
                         const std::vector<Vec2>& points);

}  // namespace padg
