#include "padg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace padg {

Mat2 MaterialField::isotropic(double sigma) { return sigma * Mat2::Identity(); }

Mat2 MaterialField::fiber(double sigma_l, double sigma_n, const Vec2& n) {
  const Vec2 u = n.normalized();
  return sigma_l * Mat2::Identity() + (sigma_n - sigma_l) * u * u.transpose();
}

void MaterialField::set(int label, const Mat2& sigma) {
  if (std::abs(sigma(0, 1) - sigma(1, 0)) > 1e-14 * sigma.norm()) {
    throw std::invalid_argument("conductivity of material " + std::to_string(label) +
                                " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat2> eig(sigma);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("conductivity of material " + std::to_string(label) +
                                " is not positive definite");
  }
  tensors_[label] = sigma;
}

const Mat2& MaterialField::at(int label) const {
  auto it = tensors_.find(label);
  if (it == tensors_.end()) {
    throw std::out_of_range("no conductivity for material label " + std::to_string(label));
  }
  return it->second;
}

double MaterialField::magnitude(int label) const {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(at(label));
  return eig.eigenvalues().maxCoeff();
}

double MaterialField::min_eigenvalue() const {
  double lo = 1e300;
  for (const auto& [label, s] : tensors_) {
    Eigen::SelfAdjointEigenSolver<Mat2> eig(s);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
  }
  return lo;
}

void MaterialField::check_mesh(const Mesh& mesh) const {
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (!has(mesh.material(k))) {
      throw std::invalid_argument("material label " + std::to_string(mesh.material(k)) +
                                  " used by the mesh has no conductivity");
    }
  }
}

MaterialField MaterialField::scaled(double lambda) const {
  MaterialField out;
  for (const auto& [label, s] : tensors_) out.set(label, lambda * s);
  return out;
}

double penalty_on_face(int p_plus, int p_minus, double h_plus, double h_minus, double sigma_plus,
                       double sigma_minus, double eta0) {
  const double sigma_avg = 0.5 * (sigma_plus + sigma_minus);
  const double p2_avg = 0.5 * (p_plus * p_plus + p_minus * p_minus);
  const double h_harm = 2.0 * h_plus * h_minus / (h_plus + h_minus);
  return eta0 * sigma_avg * p2_avg / h_harm;
}

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace

Discretization::Discretization(const Mesh& mesh, MaterialField materials, int p_max, double eta0,
                               int quad_order)
    : mesh_(mesh),
      materials_(std::move(materials)),
      p_max_(p_max),
      eta0_(eta0),
      quad_order_(quad_order > 0 ? quad_order : 2 * p_max + 2) {
  if (p_max < 1) throw std::invalid_argument("p_max must be >= 1");
  if (!(eta0 > 0.0)) throw std::invalid_argument("eta0 must be > 0");
  materials_.check_mesh(mesh);

  elements_.resize(static_cast<std::size_t>(mesh.num_cells()));
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementGeometry& g = mesh.geometry(k);
    ElementCache& c = elements_[static_cast<std::size_t>(k)];
    c.rule = quadrature(g, quad_order_);
    BasisValues b = eval_basis(g, p_max, c.rule.points, true);
    const Mat2& s = sigma(k);
    c.div_flux = s(0, 0) * b.dxx + 2.0 * s(0, 1) * b.dxy + s(1, 1) * b.dyy;
    c.value = std::move(b.value);
    c.dx = std::move(b.dx);
    c.dy = std::move(b.dy);
    c.weights = to_vector(c.rule.weights);
  }

  faces_.resize(static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    FaceCache& c = faces_[static_cast<std::size_t>(f)];
    c.rule = segment_quadrature(mesh.vertex(face.vertices[0]), mesh.vertex(face.vertices[1]),
                                quad_order_);
    c.weights = to_vector(c.rule.weights);
    for (int side = 0; side < 2; ++side) {
      const int k = face.cells[static_cast<std::size_t>(side)];
      if (k < 0) continue;
      const BasisValues b = eval_basis(mesh.geometry(k), p_max, c.rule.points);
      const Mat2& s = sigma(k);
      const Vec2 sn = s * face.normal;
      const Vec2 st = s * face.tangent;
      FaceSideCache& sc = c.side[static_cast<std::size_t>(side)];
      sc.value = b.value;
      sc.flux_n = sn.x() * b.dx + sn.y() * b.dy;
      sc.flux_t = st.x() * b.dx + st.y() * b.dy;
    }
  }
}

double Discretization::face_penalty(int f, const DegreeField& degrees) const {
  const Face& face = mesh_.face(f);
  if (!face.is_interior()) return 0.0;
  const int a = face.cells[0], b = face.cells[1];
  return penalty_on_face(degrees[a], degrees[b], mesh_.geometry(a).diameter,
                         mesh_.geometry(b).diameter, sigma_magnitude(a), sigma_magnitude(b),
                         eta0_);
}

namespace {

using BlockFn = std::function<Eigen::MatrixXd(int r0, int nr, int c0, int nc)>;

// Resize a block to nr x nc, keeping the overlapping leading part and
// computing only the new row/column strips.
Eigen::MatrixXd resize_block(const Eigen::MatrixXd& old, int nr, int nc, const BlockFn& compute) {
  const int kr = std::min(static_cast<int>(old.rows()), nr);
  const int kc = std::min(static_cast<int>(old.cols()), nc);
  Eigen::MatrixXd out(nr, nc);
  out.topLeftCorner(kr, kc) = old.topLeftCorner(kr, kc);
  if (nc > kc && kr > 0) out.block(0, kc, kr, nc - kc) = compute(0, kr, kc, nc - kc);
  if (nr > kr) out.bottomRows(nr - kr) = compute(kr, nr - kr, 0, nc);
  return out;
}

BlockFn mass_fn(const ElementCache& c) {
  return [&c](int r0, int nr, int c0, int nc) -> Eigen::MatrixXd {
    return c.value.middleRows(r0, nr) * c.weights.asDiagonal() *
           c.value.middleRows(c0, nc).transpose();
  };
}

BlockFn volume_fn(const ElementCache& c, const Mat2& s) {
  return [&c, s](int r0, int nr, int c0, int nc) -> Eigen::MatrixXd {
    const Eigen::MatrixXd gx = s(0, 0) * c.dx.middleRows(r0, nr) + s(0, 1) * c.dy.middleRows(r0, nr);
    const Eigen::MatrixXd gy = s(1, 0) * c.dx.middleRows(r0, nr) + s(1, 1) * c.dy.middleRows(r0, nr);
    return gx * c.weights.asDiagonal() * c.dx.middleRows(c0, nc).transpose() +
           gy * c.weights.asDiagonal() * c.dy.middleRows(c0, nc).transpose();
  };
}

// -1/2 [ s_a (phi_a, flux_b) + s_b (flux_a, phi_b) ]
BlockFn consistency_fn(const FaceCache& c, int a, int b) {
  const double sa = a == 0 ? 1.0 : -1.0;
  const double sb = b == 0 ? 1.0 : -1.0;
  const FaceSideCache& A = c.side[static_cast<std::size_t>(a)];
  const FaceSideCache& B = c.side[static_cast<std::size_t>(b)];
  return [&c, &A, &B, sa, sb](int r0, int nr, int c0, int nc) -> Eigen::MatrixXd {
    return -0.5 * (sa * A.value.middleRows(r0, nr) * c.weights.asDiagonal() *
                       B.flux_n.middleRows(c0, nc).transpose() +
                   sb * A.flux_n.middleRows(r0, nr) * c.weights.asDiagonal() *
                       B.value.middleRows(c0, nc).transpose());
  };
}

Eigen::MatrixXd penalty_block(const FaceCache& c, int a, int b, int na, int nb, double eta) {
  const double sign = (a == b) ? 1.0 : -1.0;
  return (eta * sign) * c.side[static_cast<std::size_t>(a)].value.topRows(na) *
         c.weights.asDiagonal() * c.side[static_cast<std::size_t>(b)].value.topRows(nb).transpose();
}

void compute_penalty(const Discretization& disc, AssembledOperators& ops, int f) {
  const Face& face = disc.mesh().face(f);
  const int n0 = ops.dofs.size(face.cells[0]);
  const int n1 = ops.dofs.size(face.cells[1]);
  const double eta = disc.face_penalty(f, ops.degrees);
  const FaceCache& c = disc.face(f);
  FaceBlocks& fb = ops.penalty[static_cast<std::size_t>(f)];
  fb.b00 = penalty_block(c, 0, 0, n0, n0, eta);
  fb.b01 = penalty_block(c, 0, 1, n0, n1, eta);
  fb.b11 = penalty_block(c, 1, 1, n1, n1, eta);
  ops.eta[static_cast<std::size_t>(f)] = eta;
}

void add_block(std::vector<Eigen::Triplet<double>>& trip, int r0, int c0,
               const Eigen::MatrixXd& b, bool transpose) {
  for (int i = 0; i < b.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      if (transpose) {
        trip.emplace_back(c0 + j, r0 + i, b(i, j));
      } else {
        trip.emplace_back(r0 + i, c0 + j, b(i, j));
      }
    }
  }
}

SparseMatrix build_sparse(const Mesh& mesh, const DofMap& dofs,
                          const std::vector<const std::vector<Eigen::MatrixXd>*>& element_parts,
                          const std::vector<const std::vector<FaceBlocks>*>& face_parts) {
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto* part : element_parts) {
    for (int k = 0; k < mesh.num_cells(); ++k) {
      add_block(trip, dofs.offset(k), dofs.offset(k), (*part)[static_cast<std::size_t>(k)], false);
    }
  }
  for (const auto* part : face_parts) {
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const Face& face = mesh.face(f);
      if (!face.is_interior()) continue;
      const FaceBlocks& fb = (*part)[static_cast<std::size_t>(f)];
      const int o0 = dofs.offset(face.cells[0]);
      const int o1 = dofs.offset(face.cells[1]);
      add_block(trip, o0, o0, fb.b00, false);
      add_block(trip, o1, o1, fb.b11, false);
      add_block(trip, o0, o1, fb.b01, false);
      add_block(trip, o0, o1, fb.b01, true);
    }
  }
  SparseMatrix m(dofs.total, dofs.total);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseMatrix AssembledOperators::M(const Mesh& mesh) const {
  return build_sparse(mesh, dofs, {&mass}, {});
}

SparseMatrix AssembledOperators::A_tilde(const Mesh& mesh) const {
  return build_sparse(mesh, dofs, {&volume}, {&consistency});
}

SparseMatrix AssembledOperators::S(const Mesh& mesh) const {
  return build_sparse(mesh, dofs, {}, {&penalty});
}

SparseMatrix AssembledOperators::A(const Mesh& mesh) const {
  return build_sparse(mesh, dofs, {&volume}, {&consistency, &penalty});
}

AssembledOperators assemble_operators(const Discretization& disc, const DegreeField& degrees) {
  degrees.validate();
  const Mesh& mesh = disc.mesh();
  if (degrees.size() != mesh.num_cells()) {
    throw std::invalid_argument("degree field size does not match the mesh");
  }
  if (degrees.p_max > disc.p_max()) {
    throw std::invalid_argument("degree field p_max exceeds the discretization's p_max");
  }
  AssembledOperators ops;
  ops.degrees = degrees;
  ops.dofs = build_dof_map(degrees);
  const std::size_t ne = static_cast<std::size_t>(mesh.num_cells());
  const std::size_t nf = static_cast<std::size_t>(mesh.num_faces());
  ops.mass.resize(ne);
  ops.volume.resize(ne);
  ops.consistency.resize(nf);
  ops.penalty.resize(nf);
  ops.eta.assign(nf, 0.0);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const int n = ops.dofs.size(k);
    const ElementCache& c = disc.element(k);
    ops.mass[static_cast<std::size_t>(k)] = mass_fn(c)(0, n, 0, n);
    ops.volume[static_cast<std::size_t>(k)] = volume_fn(c, disc.sigma(k))(0, n, 0, n);
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_interior()) continue;
    const int n0 = ops.dofs.size(face.cells[0]);
    const int n1 = ops.dofs.size(face.cells[1]);
    const FaceCache& c = disc.face(f);
    FaceBlocks& fb = ops.consistency[static_cast<std::size_t>(f)];
    fb.b00 = consistency_fn(c, 0, 0)(0, n0, 0, n0);
    fb.b01 = consistency_fn(c, 0, 1)(0, n0, 0, n1);
    fb.b11 = consistency_fn(c, 1, 1)(0, n1, 0, n1);
    compute_penalty(disc, ops, f);
  }
  return ops;
}

SparseMatrix assemble_mass(const Discretization& disc, const DegreeField& degrees) {
  return assemble_operators(disc, degrees).M(disc.mesh());
}

std::pair<SparseMatrix, SparseMatrix> assemble_stiffness(const Discretization& disc,
                                                         const DegreeField& degrees) {
  const AssembledOperators ops = assemble_operators(disc, degrees);
  return {ops.A_tilde(disc.mesh()), ops.S(disc.mesh())};
}

int update_operators(const Discretization& disc, AssembledOperators& ops,
                     const DegreeField& new_degrees) {
  new_degrees.validate();
  const Mesh& mesh = disc.mesh();
  if (new_degrees.size() != ops.degrees.size() || new_degrees.size() != mesh.num_cells()) {
    throw std::invalid_argument("inconsistent layouts in operator update");
  }
  std::vector<char> changed(static_cast<std::size_t>(mesh.num_cells()), 0);
  int n_changed = 0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (new_degrees[k] != ops.degrees[k]) {
      changed[static_cast<std::size_t>(k)] = 1;
      ++n_changed;
    }
  }
  ops.degrees = new_degrees;
  if (n_changed == 0) return 0;
  ops.dofs = build_dof_map(new_degrees);

  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (!changed[static_cast<std::size_t>(k)]) continue;
    const int n = ops.dofs.size(k);
    const ElementCache& c = disc.element(k);
    auto& m = ops.mass[static_cast<std::size_t>(k)];
    auto& v = ops.volume[static_cast<std::size_t>(k)];
    m = resize_block(m, n, n, mass_fn(c));
    v = resize_block(v, n, n, volume_fn(c, disc.sigma(k)));
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_interior()) continue;
    const int a = face.cells[0], b = face.cells[1];
    if (!changed[static_cast<std::size_t>(a)] && !changed[static_cast<std::size_t>(b)]) continue;
    const int n0 = ops.dofs.size(a);
    const int n1 = ops.dofs.size(b);
    const FaceCache& c = disc.face(f);
    FaceBlocks& fb = ops.consistency[static_cast<std::size_t>(f)];
    if (changed[static_cast<std::size_t>(a)]) fb.b00 = resize_block(fb.b00, n0, n0, consistency_fn(c, 0, 0));
    if (changed[static_cast<std::size_t>(b)]) fb.b11 = resize_block(fb.b11, n1, n1, consistency_fn(c, 1, 1));
    fb.b01 = resize_block(fb.b01, n0, n1, consistency_fn(c, 0, 1));
    compute_penalty(disc, ops, f);
  }
  return n_changed;
}

Loads assemble_loads(const Discretization& disc, const DofMap& dofs, const DegreeField& degrees,
                     const Eigen::VectorXd& u, const std::vector<Eigen::VectorXd>& y,
                     const ReactionModel& model, const SourceFunction& source, double t,
                     bool with_source, bool with_reaction) {
  const Mesh& mesh = disc.mesh();
  const int ns = model.num_states();
  if (u.size() != dofs.total || static_cast<int>(y.size()) != ns) {
    throw std::invalid_argument("load assembly: coefficient vectors do not match the layout");
  }
  for (const auto& yl : y) {
    if (yl.size() != dofs.total) {
      throw std::invalid_argument("load assembly: ionic state does not match the layout");
    }
  }
  Loads loads;
  loads.F = Eigen::VectorXd::Zero(dofs.total);
  loads.I = Eigen::VectorXd::Zero(dofs.total);
  loads.G.assign(static_cast<std::size_t>(ns), Eigen::VectorXd::Zero(dofs.total));
  std::vector<double> ys(static_cast<std::size_t>(ns));
  std::vector<double> ms(static_cast<std::size_t>(ns));
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementCache& c = disc.element(k);
    const int n = local_dim(degrees[k]);
    const int off = dofs.offset(k);
    const int nq = static_cast<int>(c.rule.size());
    const auto phi = c.value.topRows(n);
    if (with_source && source) {
      Eigen::VectorXd s(nq);
      for (int q = 0; q < nq; ++q) s[q] = c.weights[q] * source(c.rule.points[q], t);
      loads.F.segment(off, n) = phi * s;
    }
    if (!with_reaction) continue;
    const Eigen::VectorXd uq = phi.transpose() * u.segment(off, n);
    Eigen::MatrixXd yq(ns, nq);
    for (int l = 0; l < ns; ++l) yq.row(l) = (phi.transpose() * y[l].segment(off, n)).transpose();
    Eigen::VectorXd fq(nq);
    Eigen::MatrixXd mq(ns, nq);
    for (int q = 0; q < nq; ++q) {
      for (int l = 0; l < ns; ++l) ys[l] = yq(l, q);
      fq[q] = c.weights[q] * model.current(uq[q], ys.data());
      if (ns > 0) {
        model.dynamics(uq[q], ys.data(), ms.data());
        for (int l = 0; l < ns; ++l) mq(l, q) = c.weights[q] * ms[l];
      }
    }
    loads.I.segment(off, n) = phi * fq;
    for (int l = 0; l < ns; ++l) loads.G[l].segment(off, n) = phi * mq.row(l).transpose();
  }
  return loads;
}

Eigen::VectorXd element_ionic_moments(const Discretization& disc, int k, int p,
                                      const Eigen::VectorXd& u_local,
                                      const std::vector<Eigen::VectorXd>& y_local,
                                      const ReactionModel& model) {
  const ElementCache& c = disc.element(k);
  const int n = local_dim(p);
  const int ns = model.num_states();
  const int nq = static_cast<int>(c.rule.size());
  const auto phi = c.value.topRows(n);
  const Eigen::VectorXd uq = phi.transpose() * u_local;
  Eigen::MatrixXd yq(ns, nq);
  for (int l = 0; l < ns; ++l) yq.row(l) = (phi.transpose() * y_local[l]).transpose();
  std::vector<double> ys(static_cast<std::size_t>(ns));
  Eigen::VectorXd fq(nq);
  for (int q = 0; q < nq; ++q) {
    for (int l = 0; l < ns; ++l) ys[l] = yq(l, q);
    fq[q] = c.weights[q] * model.current(uq[q], ys.data());
  }
  return phi * fq;
}

Eigen::VectorXd assemble_source(const Discretization& disc, const DofMap& dofs,
                                const DegreeField& degrees, const SourceFunction& source,
                                double t) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(dofs.total);
  if (!source) return F;
  const Mesh& mesh = disc.mesh();
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementCache& c = disc.element(k);
    const int n = local_dim(degrees[k]);
    const int nq = static_cast<int>(c.rule.size());
    Eigen::VectorXd s(nq);
    for (int q = 0; q < nq; ++q) s[q] = c.weights[q] * source(c.rule.points[q], t);
    F.segment(dofs.offset(k), n) = c.value.topRows(n) * s;
  }
  return F;
}

Eigen::VectorXd assemble_boundary_flux(const Discretization& disc, const DofMap& dofs,
                                       const DegreeField& degrees, const BoundaryFlux& flux,
                                       double t) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(dofs.total);
  if (!flux) return F;
  const Mesh& mesh = disc.mesh();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.is_interior()) continue;
    const FaceCache& c = disc.face(f);
    const int k = face.cells[0];
    const int n = local_dim(degrees[k]);
    const int nq = static_cast<int>(c.rule.size());
    Eigen::VectorXd g(nq);
    for (int q = 0; q < nq; ++q) g[q] = c.weights[q] * flux(c.rule.points[q], face.normal, t);
    F.segment(dofs.offset(k), n) += c.side[0].value.topRows(n) * g;
  }
  return F;
}

Eigen::VectorXd apply_mass_inverse(const AssembledOperators& ops, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  for (int k = 0; k < ops.dofs.num_elements(); ++k) {
    const int off = ops.dofs.offset(k), n = ops.dofs.size(k);
    Eigen::LLT<Eigen::MatrixXd> llt(ops.mass[static_cast<std::size_t>(k)]);
    out.segment(off, n) = llt.solve(v.segment(off, n));
  }
  return out;
}

std::string dump_coordinates(const SparseMatrix& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int j = 0; j < m.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  return out.str();
}

}  // namespace padg
