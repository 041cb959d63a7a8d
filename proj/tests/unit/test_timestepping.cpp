#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "padg/timestepping.hpp"

using padg::Vec2;

namespace {

class NullModel final : public padg::ReactionModel {
 public:
  int num_states() const override { return 0; }
  double current(double, const double*) const override { return 0.0; }
  void dynamics(double, const double*, double*) const override {}
  std::string name() const override { return "null"; }
};

padg::MaterialField iso(double s) {
  padg::MaterialField m;
  m.set(0, padg::MaterialField::isotropic(s));
  return m;
}

Eigen::VectorXd project(const padg::Mesh& mesh, const padg::AssembledOperators& ops,
                        const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd u(ops.dofs.total);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    u.segment(ops.dofs.offset(k), ops.dofs.size(k)) =
        padg::project_l2(f, mesh.geometry(k), ops.degrees[k], 2 * ops.degrees[k] + 4);
  }
  return u;
}

// Pure diffusion of cos(pi x) cos(pi y) on the unit square to time T.
Eigen::VectorXd diffuse(const padg::Mesh& mesh, const padg::Discretization& disc,
                        const padg::AssembledOperators& ops, double dt, double T) {
  padg::ModelCoefficients c;
  c.chi = 1.0;
  c.cm = 1.0;
  padg::CrankNicolson cn(disc, c, dt);
  padg::SolverState s = padg::make_state(
      project(mesh, ops, [](const Vec2& x) { return std::cos(M_PI * x.x()) * std::cos(M_PI * x.y()); }), {});
  const NullModel model;
  const int n = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < n; ++i) cn.step(s, ops, model, {});
  return s.U;
}

}  // namespace

TEST_CASE("extrapolate_ionic examples") {
  auto one = [](double v) { return Eigen::VectorXd::Constant(1, v); };
  CHECK(padg::extrapolate_ionic(one(2.0), one(0.0))[0] == 3.0);
  CHECK(padg::extrapolate_ionic(one(1.0), one(1.0))[0] == 1.0);
  CHECK(padg::extrapolate_ionic(one(0.4), one(1.0))[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS(padg::extrapolate_ionic(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)));
}

TEST_CASE("solve_linear examples") {
  const int n = 50;
  padg::SparseMatrix I(n, n);
  I.setIdentity();
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  CHECK((padg::solve_linear(I, b) - b).cwiseAbs().maxCoeff() <= 1e-15);

  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) R(i, j) = g(rng);
  }
  const Eigen::MatrixXd spd = R * R.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  const padg::SparseMatrix S = spd.sparseView();
  const Eigen::VectorXd ref = spd.ldlt().solve(b);
  CHECK((padg::solve_linear(S, b) - ref).cwiseAbs().maxCoeff() <= 1e-9 * ref.cwiseAbs().maxCoeff());

  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(3, 0.2, 4));
  const padg::Discretization disc(mesh, iso(1.0), 3, 10.0);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, padg::DegreeField(9, 3, 3));
  const Eigen::VectorXd one = project(mesh, ops, [](const Vec2&) { return 1.0; });
  const padg::SparseMatrix M = ops.M(mesh);
  CHECK((padg::solve_linear(M, M * one) - one).cwiseAbs().maxCoeff() <= 1e-10);

  padg::SparseMatrix indefinite(2, 2);
  indefinite.insert(0, 0) = 1.0;
  indefinite.insert(1, 1) = -1.0;
  CHECK_THROWS_AS(padg::solve_linear(indefinite, Eigen::VectorXd::Ones(2)), padg::SolveError);
}

TEST_CASE("cn_step examples") {
  const padg::Mesh mesh = padg::load_mesh(oracle::grid_mesh(3, 3, 0, 1, 0, 1));
  const padg::Discretization disc(mesh, iso(0.5), 3, 10.0);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, padg::DegreeField(9, 3, 3));
  const NullModel model;
  padg::CrankNicolson cn(disc, padg::ModelCoefficients{}, 0.01);

  padg::SolverState zero = padg::make_state(Eigen::VectorXd::Zero(ops.dofs.total), {});
  for (int i = 0; i < 5; ++i) cn.step(zero, ops, model, {});
  CHECK(zero.U.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.step == 5);
  CHECK(zero.t == doctest::Approx(0.05));

  const Eigen::VectorXd c = project(mesh, ops, [](const Vec2&) { return -85.0; });
  padg::SolverState s = padg::make_state(c, {});
  for (int i = 0; i < 20; ++i) cn.step(s, ops, model, {});
  CHECK((s.U - c).cwiseAbs().maxCoeff() <= 1e-11 * c.cwiseAbs().maxCoeff());
}

TEST_CASE("cubic rest state is a fixed point") {
  const padg::Mesh mesh = padg::load_mesh(oracle::grid_mesh(3, 2, 0, 1, 0, 1));
  const padg::Discretization disc(mesh, iso(0.1), 2, 10.0);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, padg::DegreeField(6, 2, 2));
  const padg::CubicModel model{padg::CubicReactionParams{}};
  padg::CrankNicolson cn(disc, padg::ModelCoefficients{}, 0.01);
  const Eigen::VectorXd c = project(mesh, ops, [](const Vec2&) { return -85.0; });
  padg::SolverState s = padg::make_state(c, {});
  for (int i = 0; i < 50; ++i) cn.step(s, ops, model, {});
  CHECK((s.U - c).cwiseAbs().maxCoeff() <= 1e-10 * 85.0);
}

TEST_CASE("diffusion is second order in time") {
  const padg::Mesh mesh = padg::load_mesh(oracle::grid_mesh(4, 4, 0, 1, 0, 1));
  const padg::Discretization disc(mesh, iso(0.1), 3, 10.0);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, padg::DegreeField(16, 3, 3));
  const double T = 0.5, dt = 0.05;
  const Eigen::VectorXd ref = diffuse(mesh, disc, ops, dt / 100.0, T);
  const Eigen::VectorXd u1 = diffuse(mesh, disc, ops, dt, T);
  const Eigen::VectorXd u2 = diffuse(mesh, disc, ops, dt / 2, T);
  const padg::SparseMatrix M = ops.M(mesh);
  auto l2 = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(M * v)); };
  const double ratio = l2(u1 - ref) / l2(u2 - ref);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("charge conservation and energy dissipation") {
  const padg::Mesh mesh = padg::load_mesh(oracle::perturbed_mesh(4, 0.2, 12));
  padg::MaterialField mat;
  mat.set(0, padg::MaterialField::fiber(0.5, 0.05, Vec2(1.0, 0.4).normalized()));
  const padg::Discretization disc(mesh, mat, 3, 10.0);
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> d(1, 3);
  padg::DegreeField deg(mesh.num_cells(), 1, 3);
  for (int k = 0; k < deg.size(); ++k) deg[k] = d(rng);
  const padg::AssembledOperators ops = padg::assemble_operators(disc, deg);
  const NullModel model;
  padg::CrankNicolson cn(disc, padg::ModelCoefficients{}, 0.05);
  padg::SolverState s = padg::make_state(
      project(mesh, ops, [](const Vec2& x) { return std::exp(-20.0 * (x - Vec2(0.3, 0.6)).squaredNorm()); }), {});
  const padg::SparseMatrix M = ops.M(mesh), A = ops.A(mesh);
  const Eigen::VectorXd one = project(mesh, ops, [](const Vec2&) { return 1.0; });
  const double q0 = one.dot(M * s.U);
  double e_prev = s.U.dot(A * s.U);
  for (int i = 0; i < 100; ++i) {
    cn.step(s, ops, model, {});
    const double e = s.U.dot(A * s.U);
    CHECK(e <= e_prev * (1.0 + 1e-10) + 1e-14);
    e_prev = e;
  }
  CHECK(one.dot(M * s.U) == doctest::Approx(q0).epsilon(1e-10));
}

TEST_CASE("transfer_vector truncates and pads") {
  padg::DegreeField a(2, 2, 3), b(2, 2, 3);
  b[0] = 1;
  b[1] = 3;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(12, 1.0, 12.0);
  const Eigen::VectorXd w = padg::transfer_vector(v, a, b);
  REQUIRE(w.size() == 13);
  CHECK(w.head(3) == v.head(3));
  CHECK(w.segment(3, 6) == v.segment(6, 6));
  CHECK(w.tail(4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(padg::transfer_vector(padg::transfer_vector(v, a, padg::DegreeField(2, 3, 3)), padg::DegreeField(2, 3, 3), a) == v);
}
