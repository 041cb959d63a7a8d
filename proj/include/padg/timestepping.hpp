#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "padg/assembly.hpp"

namespace padg {

struct TimeGrid {
  double dt = 0.0;
  int steps = 0;

  double final_time() const { return dt * steps; }
};

/// Coefficients of the potential and the ionic states, plus the two ionic-load
/// snapshots needed by the extrapolation and the indicator.
struct SolverState {
  Eigen::VectorXd U;
  std::vector<Eigen::VectorXd> Y;
  // ionic load at the previous step; empty before the first step
  Eigen::VectorXd I_prev;
  // potential at the previous step, for the indicator's time term
  Eigen::VectorXd U_prev;
  std::vector<Eigen::VectorXd> Y_prev;
  int step = 0;
  double t = 0.0;
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

/// I^{k+1} = 3/2 I^k - 1/2 I^{k-1}
Eigen::VectorXd extrapolate_ionic(const Eigen::VectorXd& ik, const Eigen::VectorXd& ikm1);

/// Sparse Cholesky solve with residual check; throws SolveError when the
/// factorization fails or the relative residual stays above `tol`.
class LinearSolver {
 public:
  void factorize(const SparseMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol = 1e-10) const;
  bool ready() const { return ready_; }
  void reset() { ready_ = false; }

 private:
  SparseMatrix a_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  bool ready_ = false;
};

Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = 1e-10);

/// Where the forcing is sampled within a step: t^{k+1}, or t^{k+1/2} which
/// keeps a strong time-dependent forcing second order.
enum class SourceTime { end, midpoint };

/// Crank-Nicolson stepper with explicit ionic extrapolation. The factorization
/// of chi C M + dt/2 A is cached until invalidate() is called.
class CrankNicolson {
 public:
  CrankNicolson(const Discretization& disc, ModelCoefficients coeffs, double dt);

  void invalidate() { solver_.reset(); }
  void set_boundary_flux(BoundaryFlux flux) { flux_ = std::move(flux); }
  void set_source_time(SourceTime when) { source_time_ = when; }
  double dt() const { return dt_; }
  const ModelCoefficients& coefficients() const { return coeffs_; }

  /// Advances state by one step.
  void step(SolverState& state, const AssembledOperators& ops, const ReactionModel& model,
            const SourceFunction& source);

 private:
  void prepare(const AssembledOperators& ops);

  const Discretization& disc_;
  ModelCoefficients coeffs_;
  double dt_;
  LinearSolver solver_;
  SparseMatrix rhs_matrix_;
  BoundaryFlux flux_;
  SourceTime source_time_ = SourceTime::end;
};

/// Builds the initial state from coefficient vectors of u and y.
SolverState make_state(const Eigen::VectorXd& u, std::vector<Eigen::VectorXd> y);

/// Moves the state to a new degree field: coefficients are truncated or padded
/// with zeros per element; the ionic-load history is truncated on degree
/// decrease and recomputed from the padded previous fields on increase.
void transfer_state(const Discretization& disc, SolverState& state, const DegreeField& old_deg,
                    const DegreeField& new_deg, const ReactionModel& model);

/// Per-element truncate/pad of one coefficient vector.
Eigen::VectorXd transfer_vector(const Eigen::VectorXd& v, const DegreeField& old_deg,
                                const DegreeField& new_deg);

}  // namespace padg
