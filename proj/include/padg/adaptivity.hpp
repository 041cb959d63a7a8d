#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "padg/indicator.hpp"
#include "padg/timestepping.hpp"

namespace padg {

enum class ThresholdMode { min, mean };

/// Lloyd's algorithm in 1D with k = 2, seeded with the minimum-SSE split of the
/// sorted values. Ties go to the lower centroid. Returns (lower, upper).
std::pair<double, double> kmeans2(const std::vector<double>& values);

double threshold_from_centroids(double c1, double c2, ThresholdMode mode);

/// ceil(p_max (2/pi) atan(tau / threshold)) clamped to [1, p_max].
int degree_from_indicator(double tau, double threshold, int p_max);

/// At most one degree up or down towards p_arctan.
int smooth_update(int p_old, int p_arctan);

/// Elements changed at the previous adaptation or at p_max, plus their
/// face neighbours. Sorted ascending.
std::vector<int> update_active_set(const std::vector<char>& changed, const DegreeField& degrees,
                                   const Mesh& mesh);

/// Truncate/pad U and each Y block to the new degrees.
std::pair<Eigen::VectorXd, std::vector<Eigen::VectorXd>> transfer_solution(
    const Eigen::VectorXd& U, const std::vector<Eigen::VectorXd>& Y, const DegreeField& old_deg,
    const DegreeField& new_deg);

struct AdaptConfig {
  int p_max = 5;
  int period = 1;  // adapt every `period` steps
  int full_sweep_period = 200;
  ThresholdMode threshold_mode = ThresholdMode::min;
  MarkingIndicator marking = MarkingIndicator::full;
  bool cluster_on_initial = false;

  void validate() const;
};

struct AdaptStats {
  int step = 0;
  double t = 0.0;
  bool adapted = false;
  int ndof = 0;
  int n_updated = 0;
  int active_size = 0;
  bool full_sweep = false;
  std::vector<int> count_per_degree;  // index p-1
};

std::vector<int> degree_histogram(const DegreeField& degrees, int p_max);

/// Algorithm driver: threshold bookkeeping, active sets and degree updates.
class Adaptor {
 public:
  Adaptor(AdaptConfig config, int n_elements);

  const AdaptConfig& config() const { return config_; }
  bool due(int step) const { return step >= 1 && (step - 1) % config_.period == 0; }
  bool has_threshold() const { return has_threshold_; }
  double threshold() const { return threshold_; }
  std::pair<double, double> centroids() const { return centroids_; }
  const IndicatorField& indicator() const { return indicator_; }
  const std::vector<int>& active_set() const { return active_; }

  /// Full indicator sweep on the current state and clustering, without
  /// changing degrees. Used when clustering on the initial condition.
  void initialize_threshold(IndicatorInputs inputs, int step);

  /// Refresh the indicator on the active set, update degrees, operators and
  /// the solver state. `inputs` supplies the model, source and coefficients;
  /// the solution pointers are taken from `state`.
  AdaptStats adapt(const Discretization& disc, AssembledOperators& ops, SolverState& state,
                   CrankNicolson& stepper, const ReactionModel& model, IndicatorInputs inputs);

  /// Sets the threshold directly (for scripted tests).
  void set_threshold(double th);

 private:
  void cluster(const Eigen::VectorXd& values);

  AdaptConfig config_;
  IndicatorField indicator_;
  std::vector<char> last_changed_;
  std::vector<int> active_;
  int adaptations_ = 0;
  int last_full_sweep_ = 0;
  bool has_threshold_ = false;
  double threshold_ = 0.0;
  std::pair<double, double> centroids_{0.0, 0.0};
};

}  // namespace padg
