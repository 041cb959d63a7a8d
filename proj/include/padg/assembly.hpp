#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "padg/basis.hpp"
#include "padg/ionic.hpp"
#include "padg/mesh.hpp"

namespace padg {

using Mat2 = Eigen::Matrix2d;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Conductivity tensor per material label (mS/mm).
class MaterialField {
 public:
  static Mat2 isotropic(double sigma);
  /// sigma_l I + (sigma_n - sigma_l) n (x) n
  static Mat2 fiber(double sigma_l, double sigma_n, const Vec2& n);

  /// Throws std::invalid_argument unless sigma is symmetric positive definite.
  void set(int label, const Mat2& sigma);
  bool has(int label) const { return tensors_.count(label) > 0; }
  const Mat2& at(int label) const;
  /// Largest eigenvalue; the per-element magnitude entering the penalty.
  double magnitude(int label) const;
  /// Smallest eigenvalue over all materials.
  double min_eigenvalue() const;
  /// Throws naming the first mesh label without a tensor.
  void check_mesh(const Mesh& mesh) const;
  MaterialField scaled(double lambda) const;
  const std::map<int, Mat2>& tensors() const { return tensors_; }

 private:
  std::map<int, Mat2> tensors_;
};

struct ModelCoefficients {
  double chi = 140.0;  // mm^-1
  double cm = 0.01;    // uF mm^-2
};

/// eta = eta0 {Sigma_K}_A {p^2}_A / {h}_H on an interior face.
double penalty_on_face(int p_plus, int p_minus, double h_plus, double h_minus, double sigma_plus,
                       double sigma_minus, double eta0);

/// Side-major face blocks: b00 couples side 0 with itself, b01 tests side 0
/// against trial side 1; b10 = b01^T.
struct FaceBlocks {
  Eigen::MatrixXd b00;
  Eigen::MatrixXd b01;
  Eigen::MatrixXd b11;
};

/// Basis data at p_max on the element and face quadrature points.
struct ElementCache {
  QuadratureRule rule;
  Eigen::MatrixXd value;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
  // div(Sigma grad phi) at the points
  Eigen::MatrixXd div_flux;
  Eigen::VectorXd weights;
};

struct FaceSideCache {
  Eigen::MatrixXd value;
  // (Sigma grad phi) . n and . t with the face's side-0 orientation
  Eigen::MatrixXd flux_n;
  Eigen::MatrixXd flux_t;
};

struct FaceCache {
  QuadratureRule rule;
  Eigen::VectorXd weights;
  std::array<FaceSideCache, 2> side;
};

/// Mesh, materials and cached basis data shared by all operators.
class Discretization {
 public:
  Discretization(const Mesh& mesh, MaterialField materials, int p_max, double eta0,
                 int quad_order = -1);

  const Mesh& mesh() const { return mesh_; }
  const MaterialField& materials() const { return materials_; }
  int p_max() const { return p_max_; }
  double eta0() const { return eta0_; }
  int quad_order() const { return quad_order_; }
  const Mat2& sigma(int k) const { return materials_.at(mesh_.material(k)); }
  double sigma_magnitude(int k) const { return materials_.magnitude(mesh_.material(k)); }
  const ElementCache& element(int k) const { return elements_[static_cast<std::size_t>(k)]; }
  const FaceCache& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }
  double face_penalty(int f, const DegreeField& degrees) const;

 private:
  const Mesh& mesh_;
  MaterialField materials_;
  int p_max_;
  double eta0_;
  int quad_order_;
  std::vector<ElementCache> elements_;
  std::vector<FaceCache> faces_;
};

/// Block-sparse operators bound to a degree field. Element blocks are dense
/// n_K x n_K; face blocks are stored per interior face.
struct AssembledOperators {
  DegreeField degrees;
  DofMap dofs;
  std::vector<Eigen::MatrixXd> mass;
  std::vector<Eigen::MatrixXd> volume;
  std::vector<FaceBlocks> consistency;
  std::vector<FaceBlocks> penalty;
  std::vector<double> eta;

  SparseMatrix M(const Mesh& mesh) const;
  /// Volume plus consistency/symmetry terms.
  SparseMatrix A_tilde(const Mesh& mesh) const;
  /// Jump-jump penalty part.
  SparseMatrix S(const Mesh& mesh) const;
  SparseMatrix A(const Mesh& mesh) const;
};

AssembledOperators assemble_operators(const Discretization& disc, const DegreeField& degrees);
SparseMatrix assemble_mass(const Discretization& disc, const DegreeField& degrees);
std::pair<SparseMatrix, SparseMatrix> assemble_stiffness(const Discretization& disc,
                                                         const DegreeField& degrees);

/// Hierarchical update: M and A-tilde blocks of changed elements are truncated
/// or extended by the new strips only; S is recomputed on faces touching a
/// changed element. Returns the number of elements whose degree changed.
int update_operators(const Discretization& disc, AssembledOperators& ops,
                     const DegreeField& new_degrees);

/// Source term I_ext(x, t).
using SourceFunction = std::function<double(const Vec2&, double)>;

struct Loads {
  Eigen::VectorXd F;
  Eigen::VectorXd I;
  std::vector<Eigen::VectorXd> G;
};

/// F_j = (I_ext, phi_j), I_j = (f(u_h, y_h), phi_j), (G_l)_j = (m_l(u_h, y_h), phi_j).
Loads assemble_loads(const Discretization& disc, const DofMap& dofs, const DegreeField& degrees,
                     const Eigen::VectorXd& u, const std::vector<Eigen::VectorXd>& y,
                     const ReactionModel& model, const SourceFunction& source, double t,
                     bool with_source = true, bool with_reaction = true);

/// Ionic moments (f(u_h, y_h), phi_j) on one element at degree p.
Eigen::VectorXd element_ionic_moments(const Discretization& disc, int k, int p,
                                      const Eigen::VectorXd& u_local,
                                      const std::vector<Eigen::VectorXd>& y_local,
                                      const ReactionModel& model);

Eigen::VectorXd assemble_source(const Discretization& disc, const DofMap& dofs,
                                const DegreeField& degrees, const SourceFunction& source,
                                double t);

/// Neumann data g(x, n, t) = (Sigma grad u) . n on the boundary; homogeneous when empty.
using BoundaryFlux = std::function<double(const Vec2&, const Vec2&, double)>;

/// (g, phi_j) over the boundary faces.
Eigen::VectorXd assemble_boundary_flux(const Discretization& disc, const DofMap& dofs,
                                       const DegreeField& degrees, const BoundaryFlux& flux,
                                       double t);

/// Applies the inverse of the block-diagonal mass matrix.
Eigen::VectorXd apply_mass_inverse(const AssembledOperators& ops, const Eigen::VectorXd& v);

/// Coordinate text dump: one `row col value` line per stored entry.
std::string dump_coordinates(const SparseMatrix& m);

}  // namespace padg
