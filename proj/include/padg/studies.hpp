#pragma once

#include <filesystem>
#include <vector>

#include "padg/simulation.hpp"

namespace padg {

struct ConvergenceRow {
  int p = 1;
  double h = 0.0;
  int elements = 0;
  int ndof = 0;
  double error = 0.0;  // energy norm at T
  double l2 = 0.0;     // L2 at T
  double rate = 0.0;   // against the previous mesh with the same p; 0 for the first
};

/// Uniform-degree solves of `base` on each mesh and degree. Adaptivity and
/// file output are switched off; errors are taken every step.
std::vector<ConvergenceRow> convergence_study(const RunConfig& base,
                                              const std::vector<std::filesystem::path>& meshes,
                                              const std::vector<int>& degrees);

/// Header `p,h,elements,ndof,error,l2,rate`.
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows);

struct CompareRow {
  double t = 0.0;
  int ndof_uniform = 0;
  int ndof_adaptive = 0;
  // errors against the exact wave; NaN without one
  double error_uniform = 0.0;
  double error_adaptive = 0.0;
  // ||u_ad - u_un|| in L2
  double difference = 0.0;
  // 1 - ndof_adaptive / ndof_uniform
  double reduction = 0.0;
};

struct CompareReport {
  int elements = 0;
  std::vector<CompareRow> at_times;
  // every step: t, uniform NDoF, adaptive NDoF, elements at p_max (adaptive)
  std::vector<double> t;
  std::vector<int> ndof_uniform;
  std::vector<int> ndof_adaptive;
  std::vector<std::vector<int>> degree_counts;
};

/// Runs the uniform-p_max and the adaptive variants of `config` in lockstep and
/// compares them at `times` (nearest step).
CompareReport adaptive_vs_uniform_report(const RunConfig& config, const std::vector<double>& times);

/// Header `t,ndof_uniform,ndof_adaptive,error_uniform,error_adaptive,difference,reduction`.
void write_compare_csv(const std::filesystem::path& path, const CompareReport& report);

/// L2 norm of u_a - u_b for two fields on the same mesh with different degrees.
double l2_difference(const Discretization& disc, const AssembledOperators& a,
                     const Eigen::VectorXd& ua, const AssembledOperators& b,
                     const Eigen::VectorXd& ub);

}  // namespace padg
