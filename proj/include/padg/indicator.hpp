#pragma once

#include <vector>

#include <Eigen/Core>

#include "padg/assembly.hpp"
#include "padg/timestepping.hpp"

namespace padg {

/// Per-element indicator and its components.
struct IndicatorField {
  Eigen::VectorXd tau;
  Eigen::VectorXd residual;
  Eigen::VectorXd normal;
  Eigen::VectorXd jump;
  Eigen::VectorXd tangential;
  Eigen::VectorXd oscillation;
  // step at which each element was last refreshed, -1 if never
  std::vector<int> updated_step;

  explicit IndicatorField(int n = 0);
  int size() const { return static_cast<int>(tau.size()); }
};

/// Everything the indicator reads. `u_prev` must share the layout of `u`.
struct IndicatorInputs {
  const Discretization* disc = nullptr;
  const AssembledOperators* ops = nullptr;
  const Eigen::VectorXd* u = nullptr;
  const Eigen::VectorXd* u_prev = nullptr;
  const std::vector<Eigen::VectorXd>* y = nullptr;
  const ReactionModel* model = nullptr;
  ModelCoefficients coeffs;
  SourceFunction source;
  // Neumann data; the boundary normal term measures Sigma grad u . n - g
  BoundaryFlux neumann;
  double t = 0.0;
  double dt = 1.0;
};

/// ||h_K R||_{L2(K)} for one element.
double residual_term(const IndicatorInputs& in, int k);
/// ||h_K (Pi I_ext - I_ext)||_{L2(K)} for one element.
double oscillation_term(const IndicatorInputs& in, int k);

struct JumpTerms {
  double normal = 0.0;
  double jump = 0.0;
  double tangential = 0.0;
};
/// Face terms of one element: normal-flux jump (plus the boundary flux on
/// Neumann faces), sqrt(eta) value jump and tangential-flux jump on interior faces.
JumpTerms jump_terms(const IndicatorInputs& in, int k);

/// sqrt of the sum of squares of the five components.
double combine(double r, double n, double j, double t, double o);

/// Refreshes the listed elements; others keep their previous values.
void compute_indicator(const IndicatorInputs& in, const std::vector<int>& elements,
                       IndicatorField& field, int step);

/// Values used for marking.
enum class MarkingIndicator { full, jump, residual };
Eigen::VectorXd marking_values(const IndicatorField& field, MarkingIndicator which);

}  // namespace padg
