#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "padg/assembly.hpp"

using padg::Vec2;

namespace {

padg::MaterialField iso(double s, int label = 0) {
  padg::MaterialField m;
  m.set(label, padg::MaterialField::isotropic(s));
  return m;
}

double rel_diff(const padg::SparseMatrix& a, const padg::SparseMatrix& b) {
  const Eigen::MatrixXd da(a), db(b);
  return (da - db).cwiseAbs().maxCoeff() / std::max(1e-300, db.cwiseAbs().maxCoeff());
}

Eigen::VectorXd project(const padg::Mesh& mesh, const padg::AssembledOperators& ops,
                        const std::function<double(const Vec2&)>& f, int order) {
  Eigen::VectorXd u(ops.dofs.total);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    u.segment(ops.dofs.offset(k), ops.dofs.size(k)) =
        padg::project_l2(f, mesh.geometry(k), ops.degrees[k], order);
  }
  return u;
}

padg::DegreeField random_degrees(int n, int pmax, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(1, pmax);
  padg::DegreeField f(n, 1, pmax);
  for (int k = 0; k < n; ++k) f[k] = d(rng);
  return f;
}

}  // namespace

TEST_CASE("penalty_on_face examples") {
  CHECK(padg::penalty_on_face(2, 2, 0.1, 0.1, 1.0, 1.0, 10.0) == doctest::Approx(400.0).epsilon(1e-14));
  CHECK(padg::penalty_on_face(2, 4, 0.1, 0.3, 1.0, 1.0, 10.0) ==
        doctest::Approx(10.0 * 10.0 / 0.15).epsilon(1e-14));
  CHECK(padg::penalty_on_face(2, 4, 0.1, 0.3, 1.0, 1.0, 20.0) ==
        doctest::Approx(2.0 * padg::penalty_on_face(2, 4, 0.1, 0.3, 1.0, 1.0, 10.0)).epsilon(1e-15));
}

TEST_CASE("MaterialField") {
  padg::MaterialField m;
  Eigen::Matrix2d bad;
  bad << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(m.set(0, bad), std::invalid_argument);
  Eigen::Matrix2d neg;
  neg << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(m.set(0, neg), std::invalid_argument);
  m.set(1, padg::MaterialField::fiber(2.0, 0.5, Vec2(1.0, 0.0)));
  CHECK(m.magnitude(1) == doctest::Approx(2.0));
  CHECK(m.min_eigenvalue() == doctest::Approx(0.5));
  const padg::Mesh mesh = padg::load_mesh(oracle::grid_mesh(2, 1, 0, 2, 0, 1, 3));
  CHECK_THROWS_WITH(m.check_mesh(mesh), doctest::Contains("3"));
}

TEST_CASE("mass matrix") {
  const padg::Mesh mesh = padg::load_mesh(oracle::grid_mesh(3, 2, 0.0, 1.5, 0.0, 1.0));
  const padg::Discretization disc(mesh, iso(1.0), 4, 10.0);
  const padg::DegreeField deg = random_degrees(mesh.num_cells(), 4, 3);
  const padg::SparseMatrix M = padg::assemble_mass(disc, deg);
  const Eigen::MatrixXd dm(M);
  CHECK((dm - Eigen::MatrixXd::Identity(dm.rows(), dm.cols())).cwiseAbs().maxCoeff() <= 1e-12);
  // no coupling between elements
  const padg::DofMap dofs = padg::build_dof_map(deg);
  for (int k = 0; k < padg::SparseMatrix::Index(M.outerSize()); ++k) {
    for (padg::SparseMatrix::InnerIterator it(M, k); it; ++it) {
      int ek = 0, er = 0;
      while (ek + 1 < dofs.num_elements() && dofs.offset(ek + 1) <= it.col()) ++ek;
      while (er + 1 < dofs.num_elements() && dofs.offset(er + 1) <= it.row()) ++er;
      CHECK(ek == er);
    }
  }
}

TEST_CASE("mass block on a pentagon matches dense quadrature") {
  const auto& pg = oracle::pentagon();
  std::ostringstream txt;
  txt.precision(17);
  txt << pg.size() << " 1\n";
  for (const auto& v : pg) txt << v.x() << ' ' << v.y() << '\n';
  txt << "0 5 0 1 2 3 4\n";
  const padg::Mesh mesh = padg::load_mesh(txt.str());
  const padg::Discretization disc(mesh, iso(1.0), 2, 10.0);
  const Eigen::MatrixXd M(padg::assemble_mass(disc, padg::DegreeField(1, 2, 2)));
  const auto& g = mesh.geometry(0);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double ref = oracle::gm_polygon(pg, 3, [&](const Vec2& x) {
        const auto b = padg::eval_basis(g, 2, {x});
        return b.value(i, 0) * b.value(j, 0);
      });
      CHECK(M(i, j) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("stiffness: kernel, symmetry, semi-definiteness") {
  const padg::Mesh mesh = padg::load_mesh_file(std::filesystem::path(PADG_TEST_DATA_DIR) / "meshes" / "square_16.mesh");
  REQUIRE(mesh.num_cells() == 16);
  padg::MaterialField mat;
  mat.set(0, padg::MaterialField::fiber(1.2, 0.3, Vec2(0.6, 0.8)));
  const padg::Discretization disc(mesh, mat, 3, 10.0);
  const padg::DegreeField deg = random_degrees(16, 3, 11);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, deg);
  const Eigen::MatrixXd A(ops.A(mesh));
  const Eigen::VectorXd one = project(mesh, ops, [](const Vec2&) { return 1.0; }, 8);
  const double norm = A.cwiseAbs().maxCoeff();
  CHECK((A * one).cwiseAbs().maxCoeff() <= 1e-10 * norm * one.cwiseAbs().maxCoeff());
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * norm);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());

  const Eigen::MatrixXd M(ops.M(mesh));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
  CHECK(em.eigenvalues().minCoeff() > 0.0);
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * M.cwiseAbs().maxCoeff());

  // S holds the penalty part only
  const Eigen::MatrixXd S(ops.S(mesh)), At(ops.A_tilde(mesh));
  CHECK((At + S - A).cwiseAbs().maxCoeff() <= 1e-12 * norm);
  const auto pair = padg::assemble_stiffness(disc, deg);
  CHECK(rel_diff(pair.first, ops.A_tilde(mesh)) <= 1e-14);
  CHECK(rel_diff(pair.second, ops.S(mesh)) <= 1e-14);
}

TEST_CASE("patch test: linear fields leave only the boundary flux") {
  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(4, 0.2, 5));
  padg::MaterialField mat;
  Eigen::Matrix2d s;
  s << 0.9, 0.2, 0.2, 0.4;
  mat.set(0, s);
  const padg::Discretization disc(mesh, mat, 3, 10.0);
  const padg::DegreeField deg = random_degrees(mesh.num_cells(), 3, 2);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, deg);
  const Vec2 g(1.5, -0.7);
  const Eigen::VectorXd u = project(mesh, ops, [&](const Vec2& x) { return 0.3 + g.dot(x); }, 8);
  const Eigen::VectorXd Au = ops.A(mesh) * u;
  const Eigen::VectorXd flux = padg::assemble_boundary_flux(
      disc, ops.dofs, deg, [&](const Vec2&, const Vec2& n, double) { return (s * g).dot(n); }, 0.0);
  CHECK((Au - flux).cwiseAbs().maxCoeff() <= 1e-10 * Au.cwiseAbs().maxCoeff());
}

TEST_CASE("stiffness scales linearly with the conductivity") {
  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(3, 0.2, 9));
  const padg::DegreeField deg = random_degrees(mesh.num_cells(), 3, 4);
  const padg::Discretization d1(mesh, iso(0.7), 3, 10.0);
  const padg::Discretization d2(mesh, iso(0.7).scaled(4.0), 3, 10.0);
  const Eigen::MatrixXd A1(padg::assemble_operators(d1, deg).A(mesh));
  const Eigen::MatrixXd A2(padg::assemble_operators(d2, deg).A(mesh));
  CHECK((A2 - 4.0 * A1).cwiseAbs().maxCoeff() <= 1e-13 * A2.cwiseAbs().maxCoeff());
}

TEST_CASE("load vectors") {
  const padg::Mesh mesh = padg::load_mesh(oracle::grid_mesh(2, 2, 0, 1, 0, 1));
  const padg::Discretization disc(mesh, iso(1.0), 3, 10.0);
  const padg::DegreeField deg(4, 3, 3);
  const padg::DofMap dofs = padg::build_dof_map(deg);
  const padg::CubicReactionParams cp;
  const padg::CubicModel model(cp);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, deg);

  const Eigen::VectorXd rest = project(mesh, ops, [](const Vec2&) { return -85.0; }, 8);
  const padg::Loads zero = padg::assemble_loads(disc, dofs, deg, rest, {}, model,
                                                [](const Vec2&, double) { return 0.0; }, 0.0);
  CHECK(zero.F.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.I.cwiseAbs().maxCoeff() <= 1e-12);

  // linear field, cubic nonlinearity against Grundmann-Moeller quadrature
  auto lin = [](const Vec2& x) { return -80.0 + 90.0 * x.x() + 20.0 * x.y(); };
  const Eigen::VectorXd u = project(mesh, ops, lin, 8);
  const padg::Loads l = padg::assemble_loads(disc, dofs, deg, u, {}, model, {}, 0.0, false, true);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    std::vector<Vec2> poly;
    for (int v : mesh.cell(k)) poly.push_back(mesh.vertex(v));
    for (int j = 0; j < dofs.size(k); ++j) {
      const double ref = oracle::gm_polygon(poly, 6, [&](const Vec2& x) {
        return padg::cubic_f(lin(x), cp) * padg::eval_basis(mesh.geometry(k), 3, {x}).value(j, 0);
      });
      CHECK(l.I[dofs.offset(k) + j] == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("update_operators examples") {
  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(4, 0.25, 3));
  padg::MaterialField mat;
  mat.set(0, padg::MaterialField::fiber(1.0, 0.2, Vec2(1.0, 1.0).normalized()));
  const padg::Discretization disc(mesh, mat, 4, 10.0);
  const padg::DegreeField start(mesh.num_cells(), 2, 4);
  const padg::AssembledOperators original = padg::assemble_operators(disc, start);

  padg::AssembledOperators ops = original;
  padg::DegreeField down = start;
  down[5] = 1;
  CHECK(padg::update_operators(disc, ops, down) == 1);
  CHECK(ops.mass[5] == original.mass[5].topLeftCorner(3, 3));

  padg::AssembledOperators rt = original;
  padg::DegreeField up = start;
  up[7] = 3;
  padg::update_operators(disc, rt, up);
  padg::update_operators(disc, rt, start);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CHECK(rt.mass[k] == original.mass[k]);
    CHECK(rt.volume[k] == original.volume[k]);
  }
  CHECK(Eigen::MatrixXd(rt.A_tilde(mesh)) == Eigen::MatrixXd(original.A_tilde(mesh)));
}

TEST_CASE("update_operators agrees with fresh assembly") {
  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(5, 0.2, 17));
  REQUIRE(mesh.num_cells() <= 50);
  padg::MaterialField mat;
  mat.set(0, padg::MaterialField::fiber(0.8, 0.1, Vec2(0.3, 1.0).normalized()));
  const padg::Discretization disc(mesh, mat, 5, 10.0);
  padg::DegreeField deg = random_degrees(mesh.num_cells(), 5, 1);
  padg::AssembledOperators ops = padg::assemble_operators(disc, deg);
  for (unsigned trial = 0; trial < 10; ++trial) {
    const padg::DegreeField next = random_degrees(mesh.num_cells(), 5, 100 + trial);
    padg::update_operators(disc, ops, next);
    const padg::AssembledOperators fresh = padg::assemble_operators(disc, next);
    CHECK(rel_diff(ops.A(mesh), fresh.A(mesh)) <= 1e-12);
    CHECK(rel_diff(ops.M(mesh), fresh.M(mesh)) <= 1e-12);
  }
}

TEST_CASE("apply_mass_inverse and coordinate dump") {
  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(2, 0.2, 1));
  const padg::Discretization disc(mesh, iso(1.0), 2, 10.0);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, padg::DegreeField(4, 2, 2));
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(ops.dofs.total, -1.0, 2.0);
  const Eigen::VectorXd r = ops.M(mesh) * padg::apply_mass_inverse(ops, v);
  CHECK((r - v).cwiseAbs().maxCoeff() <= 1e-12);
  const std::string dump = padg::dump_coordinates(ops.M(mesh));
  std::istringstream in(dump);
  int rows = 0, c = 0;
  double val = 0.0;
  int lines = 0;
  while (in >> rows >> c >> val) ++lines;
  CHECK(lines == ops.M(mesh).nonZeros());
}
