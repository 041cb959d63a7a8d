#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "padg/assembly.hpp"

namespace padg {

/// Planar tanh front moving along `direction` with speed `speed`:
/// u = V_rest + (V_depol - V_rest)/2 (1 - tanh(z/eps)), z = d.x - x0 - speed t.
struct TravelingWaveSpec {
  double v_rest = -85.0;
  double v_depol = 30.0;
  double eps = 0.2;
  double speed = 0.5;
  Vec2 direction{1.0, 0.0};
  double x0 = 0.0;

  double front(double t) const { return x0 + speed * t; }
};

double exact_traveling_wave(const Vec2& x, double t, const TravelingWaveSpec& spec);
Vec2 exact_traveling_wave_gradient(const Vec2& x, double t, const TravelingWaveSpec& spec);
double exact_traveling_wave_dt(const Vec2& x, double t, const TravelingWaveSpec& spec);
/// div(Sigma grad u) for a constant tensor.
double exact_traveling_wave_div_flux(const Vec2& x, double t, const TravelingWaveSpec& spec,
                                     const Mat2& sigma);

/// I_ext = chi C du/dt - div(Sigma grad u) + chi f(u): makes the wave exact.
SourceFunction manufactured_source(const TravelingWaveSpec& spec, const Mat2& sigma,
                                   const ModelCoefficients& coeffs,
                                   const CubicReactionParams& cubic);

/// (Sigma grad u_ex) . n, the Neumann data that keeps the wave exact.
BoundaryFlux manufactured_flux(const TravelingWaveSpec& spec, const Mat2& sigma);

/// Compatible speed and thickness of the cubic model for an isotropic sigma:
/// c = sqrt(kD/2)(V_r + V_d - 2 V_t), eps = 2 sqrt(2D/k)/(V_d - V_r),
/// with D = sigma/(chi C) and k = a/C.
std::pair<double, double> compatible_wave(double sigma, const ModelCoefficients& coeffs,
                                          const CubicReactionParams& cubic);

/// Two fronts: depolarized outside [x_left, x_right], at rest in between.
struct DoubleWaveSpec {
  double v_rest = -85.0;
  double v_depol = 30.0;
  double x_left = -1.5;
  double eps_left = 0.1;
  double x_right = 3.0;
  double eps_right = 0.4;
};

double double_wave_initial(const Vec2& x, const DoubleWaveSpec& spec);

/// Exact field u(x, t) with its spatial gradient.
struct ExactField {
  std::function<double(const Vec2&, double)> value;
  std::function<Vec2(const Vec2&, double)> gradient;
};

ExactField traveling_wave_field(const TravelingWaveSpec& spec);

struct ErrorNorms {
  double l2 = 0.0;
  double dg = 0.0;
  // integral of e^4
  double l4_pow4 = 0.0;
};

/// Norms of u_h - u_ex. The jump part uses the jumps of u_h (u_ex is continuous).
ErrorNorms error_norms(const Discretization& disc, const AssembledOperators& ops,
                       const Eigen::VectorXd& u, const ExactField& exact, double t);

/// Per-element energy-type error sqrt(||e||^2_K + ||grad e||^2_K).
Eigen::VectorXd element_errors(const Discretization& disc, const AssembledOperators& ops,
                               const Eigen::VectorXd& u, const ExactField& exact, double t);

/// Norms of a discrete field.
double l2_norm(const AssembledOperators& ops, const Eigen::VectorXd& u);
double dg_norm(const Discretization& disc, const AssembledOperators& ops, const Eigen::VectorXd& u);
double l4_pow4(const Discretization& disc, const AssembledOperators& ops, const Eigen::VectorXd& u);

/// Accumulates the time integrals of the energy norm by the trapezoidal rule.
class EnergyNorm {
 public:
  /// mu: coercivity constant (smallest eigenvalue of Sigma); a: cubic coefficient.
  EnergyNorm(double mu, double a, const ModelCoefficients& coeffs);

  void add(double t, double dg_squared, double l4_pow4);
  double integral() const { return integral_; }
  /// sqrt(||v(t)||^2 + integrals)
  double value(double l2_at_t) const;

 private:
  double w_dg_;
  double w_l4_;
  bool started_ = false;
  double last_t_ = 0.0;
  double last_integrand_ = 0.0;
  double integral_ = 0.0;
};

struct NormReport {
  double l2 = 0.0;
  double dg = 0.0;
  double energy = 0.0;
};

/// Spearman rank correlation (average ranks for ties).
double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Observed convergence rate between two (h, error) pairs.
double observed_rate(double h_coarse, double e_coarse, double h_fine, double e_fine);

/// Log-log interpolation in a tabulated (h, error) curve; extrapolates linearly.
double loglog_interpolate(const std::vector<std::pair<double, double>>& curve, double h);

}  // namespace padg
