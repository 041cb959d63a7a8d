#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padg/adaptivity.hpp"
#include "padg/analysis.hpp"
#include "padg/config.hpp"

namespace padg {

/// Failure during the time loop; `step` is the step being computed.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, int step) : std::runtime_error(what), step(step) {}
  int step;
};

struct ErrorRecord {
  double t = 0.0;
  double l2 = 0.0;
  double dg = 0.0;
  double energy = 0.0;  // NaN unless errors are sampled every few steps
};

/// One configured solve: owns the mesh, operators, state and adaptor and
/// advances them one step at a time.
class Simulation {
 public:
  explicit Simulation(RunConfig config);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const RunConfig& config() const { return config_; }
  const Mesh& mesh() const { return *mesh_; }
  const Discretization& disc() const { return *disc_; }
  const AssembledOperators& ops() const { return ops_; }
  const SolverState& state() const { return state_; }
  const ReactionModel& model() const { return *model_; }
  const SourceFunction& source() const { return source_; }
  /// Null when adaptivity is off.
  const Adaptor* adaptor() const { return adaptor_.get(); }
  int total_steps() const { return config_.time.steps; }
  bool finished() const { return state_.step >= config_.time.steps; }

  /// Adapts the degrees if due, then performs one Crank-Nicolson step.
  /// The returned stats have adapted == false when no adaptation ran.
  AdaptStats advance();

  /// Indicator inputs bound to the current state.
  IndicatorInputs indicator_inputs() const;
  /// Full indicator sweep on the current state.
  IndicatorField full_indicator() const;

  std::optional<ExactField> exact() const;
  /// Error against the exact wave at the current time.
  ErrorNorms errors() const;

 private:
  RunConfig config_;
  std::unique_ptr<Mesh> mesh_;
  std::unique_ptr<Discretization> disc_;
  AssembledOperators ops_;
  std::unique_ptr<ReactionModel> model_;
  SourceFunction source_;
  BoundaryFlux neumann_;
  SolverState state_;
  std::unique_ptr<CrankNicolson> stepper_;
  std::unique_ptr<Adaptor> adaptor_;
};

/// Coefficients of the configured initial condition at the given degrees.
Eigen::VectorXd initial_field(const RunConfig& config, const Discretization& disc,
                              const AssembledOperators& ops);

struct RunSummary {
  int steps = 0;
  double t_final = 0.0;
  int final_ndof = 0;
  double u_min = 0.0;
  double u_max = 0.0;
  double wall_seconds = 0.0;
  int adaptations = 0;
  int snapshots = 0;
  std::vector<ErrorRecord> errors;
  std::vector<std::pair<double, int>> ndof;
};

/// Runs the configured solve to T and writes the outputs to
/// config.output_dir (if set): ndof_evolution.csv, updated_elements.csv,
/// degree_counts.csv, errors.csv, snapshot_NNNN.vtk, line_NNNN.csv, summary.json.
RunSummary run_simulation(const RunConfig& config, std::ostream* log = nullptr);

/// Range of u_h over the element quadrature points.
std::pair<double, double> field_range(const Discretization& disc, const AssembledOperators& ops,
                                      const Eigen::VectorXd& u);

}  // namespace padg
