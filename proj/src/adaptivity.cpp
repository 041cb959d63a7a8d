#include "padg/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace padg {

std::pair<double, double> kmeans2(const std::vector<double>& input) {
  if (input.empty()) throw std::invalid_argument("kmeans2 needs at least one value");
  // sorted so the cluster sums do not depend on input order
  std::vector<double> values = input;
  std::sort(values.begin(), values.end());
  if (values.front() == values.back()) return {values.front(), values.back()};
  // Seed with the best contiguous split of the sorted values (the global
  // optimum in 1D); a (min, max) start can stall in a worse fixed point.
  const std::size_t n = values.size();
  std::vector<double> mean_l(n + 1, 0.0), m2_l(n + 1, 0.0), mean_r(n + 1, 0.0), m2_r(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - mean_l[i];
    mean_l[i + 1] = mean_l[i] + d / static_cast<double>(i + 1);
    m2_l[i + 1] = m2_l[i] + d * (values[i] - mean_l[i + 1]);
  }
  for (std::size_t i = n; i-- > 0;) {
    const double d = values[i] - mean_r[i + 1];
    mean_r[i] = mean_r[i + 1] + d / static_cast<double>(n - i);
    m2_r[i] = m2_r[i + 1] + d * (values[i] - mean_r[i]);
  }
  std::size_t cut = 1;
  for (std::size_t c = 2; c < n; ++c) {
    if (m2_l[c] + m2_r[c] < m2_l[cut] + m2_r[cut]) cut = c;
  }
  double c1 = mean_l[cut], c2 = mean_r[cut];
  std::vector<char> upper(values.size(), 0);
  for (int it = 0; it < 10000; ++it) {
    bool moved = false;
    double s1 = 0.0, s2 = 0.0;
    std::size_t n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      const char up = std::abs(v - c2) < std::abs(v - c1) ? 1 : 0;
      moved = moved || up != upper[i];
      upper[i] = up;
      if (up) {
        s2 += v;
        ++n2;
      } else {
        s1 += v;
        ++n1;
      }
    }
    if (it > 0 && !moved) break;
    if (n1) c1 = s1 / static_cast<double>(n1);
    if (n2) c2 = s2 / static_cast<double>(n2);
  }
  if (c1 > c2) std::swap(c1, c2);
  return {c1, c2};
}

double threshold_from_centroids(double c1, double c2, ThresholdMode mode) {
  return mode == ThresholdMode::min ? std::min(c1, c2) : 0.5 * (c1 + c2);
}

int degree_from_indicator(double tau, double threshold, int p_max) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  const double x = p_max * (2.0 / std::numbers::pi) * std::atan(tau / threshold);
  const int p = static_cast<int>(std::ceil(x));
  return std::clamp(p, 1, p_max);
}

int smooth_update(int p_old, int p_arctan) {
  if (p_old <= p_arctan) return std::min(p_old + 1, p_arctan);
  return std::max(p_old - 1, p_arctan);
}

std::vector<int> update_active_set(const std::vector<char>& changed, const DegreeField& degrees,
                                   const Mesh& mesh) {
  std::vector<char> in(static_cast<std::size_t>(mesh.num_cells()), 0);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (changed[static_cast<std::size_t>(k)] || degrees[k] == degrees.p_max) {
      in[static_cast<std::size_t>(k)] = 1;
      for (int nb : mesh.neighbors(k)) in[static_cast<std::size_t>(nb)] = 1;
    }
  }
  std::vector<int> out;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (in[static_cast<std::size_t>(k)]) out.push_back(k);
  }
  return out;
}

std::pair<Eigen::VectorXd, std::vector<Eigen::VectorXd>> transfer_solution(
    const Eigen::VectorXd& U, const std::vector<Eigen::VectorXd>& Y, const DegreeField& old_deg,
    const DegreeField& new_deg) {
  std::vector<Eigen::VectorXd> Y2;
  Y2.reserve(Y.size());
  for (const auto& y : Y) Y2.push_back(transfer_vector(y, old_deg, new_deg));
  return {transfer_vector(U, old_deg, new_deg), std::move(Y2)};
}

void AdaptConfig::validate() const {
  if (p_max < 1) throw std::invalid_argument("adapt.p_max must be >= 1");
  if (period < 1) throw std::invalid_argument("adapt.period must be >= 1");
  if (full_sweep_period < 1) throw std::invalid_argument("adapt.full_sweep_period must be >= 1");
}

std::vector<int> degree_histogram(const DegreeField& degrees, int p_max) {
  std::vector<int> h(static_cast<std::size_t>(p_max), 0);
  for (int p : degrees.p) ++h[static_cast<std::size_t>(p - 1)];
  return h;
}

Adaptor::Adaptor(AdaptConfig config, int n_elements)
    : config_(config),
      indicator_(n_elements),
      last_changed_(static_cast<std::size_t>(n_elements), 0) {
  config_.validate();
}

void Adaptor::set_threshold(double th) {
  threshold_ = th > 0.0 ? th : std::numeric_limits<double>::min();
  has_threshold_ = true;
}

void Adaptor::cluster(const Eigen::VectorXd& values) {
  std::vector<double> v(values.data(), values.data() + values.size());
  centroids_ = kmeans2(v);
  set_threshold(threshold_from_centroids(centroids_.first, centroids_.second,
                                         config_.threshold_mode));
}

void Adaptor::initialize_threshold(IndicatorInputs inputs, int step) {
  std::vector<int> all(static_cast<std::size_t>(indicator_.size()));
  std::iota(all.begin(), all.end(), 0);
  compute_indicator(inputs, all, indicator_, step);
  cluster(marking_values(indicator_, config_.marking));
}

AdaptStats Adaptor::adapt(const Discretization& disc, AssembledOperators& ops, SolverState& state,
                          CrankNicolson& stepper, const ReactionModel& model,
                          IndicatorInputs inputs) {
  const Mesh& mesh = disc.mesh();
  const int n = mesh.num_cells();
  AdaptStats stats;
  stats.step = state.step;
  stats.t = state.t;
  stats.adapted = true;

  if (adaptations_ == 0) {
    active_.resize(static_cast<std::size_t>(n));
    std::iota(active_.begin(), active_.end(), 0);
    last_full_sweep_ = state.step;
  } else if (state.step - last_full_sweep_ >= config_.full_sweep_period) {
    active_.resize(static_cast<std::size_t>(n));
    std::iota(active_.begin(), active_.end(), 0);
    last_full_sweep_ = state.step;
    stats.full_sweep = true;
  } else {
    active_ = update_active_set(last_changed_, ops.degrees, mesh);
  }
  stats.active_size = static_cast<int>(active_.size());

  inputs.disc = &disc;
  inputs.ops = &ops;
  inputs.u = &state.U;
  inputs.u_prev = &state.U_prev;
  inputs.y = &state.Y;
  inputs.model = &model;
  inputs.t = state.t;
  compute_indicator(inputs, active_, indicator_, state.step);

  const Eigen::VectorXd marks = marking_values(indicator_, config_.marking);
  if (!has_threshold_) cluster(marks);

  DegreeField next = ops.degrees;
  std::fill(last_changed_.begin(), last_changed_.end(), 0);
  for (int k = 0; k < n; ++k) {
    const int target = degree_from_indicator(marks[k], threshold_, config_.p_max);
    next[k] = smooth_update(ops.degrees[k], target);
    if (next[k] != ops.degrees[k]) {
      last_changed_[static_cast<std::size_t>(k)] = 1;
      ++stats.n_updated;
    }
  }
  ++adaptations_;
  if (stats.n_updated > 0) {
    const DegreeField old = ops.degrees;
    update_operators(disc, ops, next);
    transfer_state(disc, state, old, next, model);
    stepper.invalidate();
  }
  stats.ndof = ops.dofs.total;
  stats.count_per_degree = degree_histogram(ops.degrees, config_.p_max);
  return stats;
}

}  // namespace padg
