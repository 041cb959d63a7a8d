#include "padg/timestepping.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace padg {

Eigen::VectorXd extrapolate_ionic(const Eigen::VectorXd& ik, const Eigen::VectorXd& ikm1) {
  if (ik.size() != ikm1.size()) {
    throw std::invalid_argument("ionic history vectors differ in length");
  }
  return 1.5 * ik - 0.5 * ikm1;
}

void LinearSolver::factorize(const SparseMatrix& a) {
  a_ = a;
  llt_.compute(a_);
  if (llt_.info() != Eigen::Success) {
    ready_ = false;
    throw SolveError("Cholesky factorization failed: system not positive definite "
                     "(penalty eta0 too small?)",
                     std::nan(""));
  }
  ready_ = true;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b, double tol) const {
  if (!ready_) throw std::logic_error("linear solver used before factorization");
  const double bn = b.norm();
  if (bn == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd x = llt_.solve(b);
  double rel = (b - a_ * x).norm() / bn;
  // a few steps of iterative refinement for badly scaled systems
  for (int it = 0; it < 3 && rel > tol; ++it) {
    x += llt_.solve(b - a_ * x);
    rel = (b - a_ * x).norm() / bn;
  }
  if (!(rel <= tol)) {
    throw SolveError("linear solve did not reach tolerance, relative residual " +
                         std::to_string(rel),
                     rel);
  }
  return x;
}

Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, double tol) {
  LinearSolver s;
  s.factorize(a);
  return s.solve(b, tol);
}

CrankNicolson::CrankNicolson(const Discretization& disc, ModelCoefficients coeffs, double dt)
    : disc_(disc), coeffs_(coeffs), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(coeffs.chi > 0.0) || !(coeffs.cm > 0.0)) {
    throw std::invalid_argument("chi and C_m must be > 0");
  }
}

void CrankNicolson::prepare(const AssembledOperators& ops) {
  if (solver_.ready()) return;
  const SparseMatrix M = ops.M(disc_.mesh());
  const SparseMatrix A = ops.A(disc_.mesh());
  const double cap = coeffs_.chi * coeffs_.cm;
  const SparseMatrix lhs = cap * M + (0.5 * dt_) * A;
  rhs_matrix_ = cap * M - (0.5 * dt_) * A;
  solver_.factorize(lhs);
}

void CrankNicolson::step(SolverState& state, const AssembledOperators& ops,
                         const ReactionModel& model, const SourceFunction& source) {
  prepare(ops);
  const DofMap& dofs = ops.dofs;
  if (state.U.size() != dofs.total) {
    throw std::invalid_argument("state does not match the operator layout");
  }
  const double t_next = state.t + dt_;
  const Loads now = assemble_loads(disc_, dofs, ops.degrees, state.U, state.Y, model, source,
                                   state.t, false, true);
  const double t_src = source_time_ == SourceTime::end ? t_next : state.t + 0.5 * dt_;
  Eigen::VectorXd F = assemble_source(disc_, dofs, ops.degrees, source, t_src);
  if (flux_) F += assemble_boundary_flux(disc_, dofs, ops.degrees, flux_, t_src);
  const Eigen::VectorXd& I_prev = state.I_prev.size() == now.I.size() ? state.I_prev : now.I;
  const Eigen::VectorXd I_next = extrapolate_ionic(now.I, I_prev);

  const Eigen::VectorXd rhs = rhs_matrix_ * state.U - (coeffs_.chi * dt_) * I_next + dt_ * F;
  Eigen::VectorXd U_next;
  try {
    U_next = solver_.solve(rhs);
  } catch (const SolveError& e) {
    throw SolveError(std::string(e.what()) + " at step " + std::to_string(state.step + 1),
                     e.residual);
  }
  if (!U_next.allFinite()) {
    throw std::runtime_error("non-finite potential at step " + std::to_string(state.step + 1));
  }

  state.Y_prev = state.Y;
  for (std::size_t l = 0; l < state.Y.size(); ++l) {
    state.Y[l] -= dt_ * apply_mass_inverse(ops, now.G[l]);
    if (!state.Y[l].allFinite()) {
      throw std::runtime_error("non-finite ionic state at step " + std::to_string(state.step + 1));
    }
  }
  state.U_prev = std::move(state.U);
  state.U = std::move(U_next);
  state.I_prev = now.I;
  state.step += 1;
  state.t = t_next;
}

SolverState make_state(const Eigen::VectorXd& u, std::vector<Eigen::VectorXd> y) {
  SolverState s;
  s.U = u;
  s.U_prev = u;
  s.Y = std::move(y);
  s.Y_prev = s.Y;
  return s;
}

Eigen::VectorXd transfer_vector(const Eigen::VectorXd& v, const DegreeField& old_deg,
                                const DegreeField& new_deg) {
  if (old_deg.size() != new_deg.size()) throw std::invalid_argument("layout mismatch");
  const DofMap a = build_dof_map(old_deg);
  const DofMap b = build_dof_map(new_deg);
  if (v.size() != a.total) throw std::invalid_argument("layout mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(b.total);
  for (int k = 0; k < old_deg.size(); ++k) {
    const int n = std::min(a.size(k), b.size(k));
    out.segment(b.offset(k), n) = v.segment(a.offset(k), n);
  }
  return out;
}

void transfer_state(const Discretization& disc, SolverState& state, const DegreeField& old_deg,
                    const DegreeField& new_deg, const ReactionModel& model) {
  const DofMap a = build_dof_map(old_deg);
  const DofMap b = build_dof_map(new_deg);
  const bool has_history = state.I_prev.size() == a.total;
  Eigen::VectorXd I_new;
  if (has_history) {
    I_new = Eigen::VectorXd::Zero(b.total);
    const int ns = model.num_states();
    for (int k = 0; k < old_deg.size(); ++k) {
      if (new_deg[k] <= old_deg[k]) {
        I_new.segment(b.offset(k), b.size(k)) = state.I_prev.segment(a.offset(k), b.size(k));
        continue;
      }
      // pad the previous fields and integrate the new moments
      Eigen::VectorXd u = Eigen::VectorXd::Zero(b.size(k));
      u.head(a.size(k)) = state.U_prev.segment(a.offset(k), a.size(k));
      std::vector<Eigen::VectorXd> y(static_cast<std::size_t>(ns));
      for (int l = 0; l < ns; ++l) {
        y[l] = Eigen::VectorXd::Zero(b.size(k));
        y[l].head(a.size(k)) = state.Y_prev[l].segment(a.offset(k), a.size(k));
      }
      Eigen::VectorXd m = element_ionic_moments(disc, k, new_deg[k], u, y, model);
      m.head(a.size(k)) = state.I_prev.segment(a.offset(k), a.size(k));
      I_new.segment(b.offset(k), b.size(k)) = m;
    }
  }
  state.U = transfer_vector(state.U, old_deg, new_deg);
  state.U_prev = transfer_vector(state.U_prev, old_deg, new_deg);
  for (auto& y : state.Y) y = transfer_vector(y, old_deg, new_deg);
  for (auto& y : state.Y_prev) y = transfer_vector(y, old_deg, new_deg);
  state.I_prev = has_history ? I_new : Eigen::VectorXd();
}

}  // namespace padg
