#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "padg/mesh.hpp"

namespace padg {

/// f(u) = a (u - V_rest)(u - V_thres)(u - V_depol)
struct CubicReactionParams {
  double a = 1.4e-5;  // mS mm^-2 mV^-2
  double v_rest = -85.0;
  double v_thres = -57.6;
  double v_depol = 30.0;

  void validate() const;
};

double cubic_f(double u, const CubicReactionParams& p);
double cubic_df(double u, const CubicReactionParams& p);

/// Which sign pattern to use for the pump, glia and K-current terms of the
/// concentration equations. `reference` follows the original Cressman model;
/// `printed` flips the pump/glia/current contributions.
enum class ConcentrationSigns { reference, printed };

struct BarretoCressmanParams {
  // conductances, mS/cm^2
  double g_nal = 0.0175;
  double g_na = 100.0;
  double g_k = 40.0;
  double g_ahp = 0.01;
  double g_kl = 0.05;
  double g_cll = 0.05;
  double g_ca = 0.1;
  double g_glia = 66.66;  // mM/s
  double k_bath = 8.0;    // mM
  double c_m = 1.0;       // uF/cm^2
  double gamma = 0.0445;
  double beta = 7.0;
  double tau = 1000.0;
  double rho = 1.25;
  double eps_diff = 1.2;
  double e_ca = 120.0;
  double phi = 3.0;
  ConcentrationSigns signs = ConcentrationSigns::reference;

  void validate() const;
};

/// s = [Na]_i, k = [K]_o, c = [Ca]_i, then gating g^s, g^k, g^c.
struct IonicState {
  std::array<double, 6> y{15.5, 7.8, 0.0, 0.0936, 0.96859, 0.08553};

  double s() const { return y[0]; }
  double k() const { return y[1]; }
  double c() const { return y[2]; }
  double gs() const { return y[3]; }
  double gk() const { return y[4]; }
  double gc() const { return y[5]; }
};

struct BcCurrents {
  double i_na = 0.0;
  double i_k = 0.0;
  double i_cl = 0.0;
  double e_na = 0.0;
  double e_k = 0.0;
  double e_cl = 0.0;

  double total() const { return i_na + i_k + i_cl; }
};

/// Membrane currents in uA/cm^2. Throws std::domain_error on a non-finite
/// reversal potential.
BcCurrents bc_currents(double u, const IonicState& y, const BarretoCressmanParams& p);

/// dy/dt = -m(u, y). Throws std::domain_error on non-finite output.
std::array<double, 6> bc_rhs(double u, const IonicState& y, const BarretoCressmanParams& p);

/// Steady state and time constant of the three gating variables at u.
struct GatingRates {
  std::array<double, 3> inf{};
  std::array<double, 3> tau{};
};
GatingRates bc_gating(double u, const BarretoCressmanParams& p);

/// Clamps gating to [0,1] and concentrations to >= 0; returns the number of
/// components that were modified.
int clamp_state(IonicState& y);

/// External forcing A / (1 + e^{sin t}) on a support region.
struct ForcingSpec {
  enum class Region { everywhere, disk, polygon };

  double amplitude = 0.0;
  Region region = Region::everywhere;
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
  std::vector<Vec2> polygon;

  bool contains(const Vec2& x) const;
};

double forcing_value(double t, const Vec2& x, const ForcingSpec& spec);

struct SpikeTrace {
  std::vector<double> t;
  std::vector<double> u;
  std::vector<IonicState> y;
  std::vector<double> spikes;
  long clamp_events = 0;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, long step) : std::runtime_error(what), step(step) {}
  long step;
};

/// Forward Euler for C du/dt = -I_ion + I_ext, dy/dt = -m. The forcing is a
/// membrane current density in uA/cm^2. Spikes are upward crossings of 0 mV
/// separated by at least 1 ms. Samples are stored every `record_every` steps.
SpikeTrace integrate_0d(const BarretoCressmanParams& params, double u0, IonicState y0, double dt,
                        double t_end, const ForcingSpec& forcing, int record_every = 1);

std::string trace_csv(const SpikeTrace& trace);

/// Pointwise reaction model used by the PDE solver.
class ReactionModel {
 public:
  virtual ~ReactionModel() = default;
  virtual int num_states() const = 0;
  /// Ionic current f(u, y) per unit membrane area (uA/mm^2).
  virtual double current(double u, const double* y) const = 0;
  /// m(u, y) with dy/dt = -m.
  virtual void dynamics(double u, const double* y, double* m) const = 0;
  virtual std::vector<double> initial_state() const { return {}; }
  /// Rest value used for flat initial conditions.
  virtual std::string name() const = 0;
};

class CubicModel final : public ReactionModel {
 public:
  explicit CubicModel(CubicReactionParams p) : p_(p) { p_.validate(); }
  int num_states() const override { return 0; }
  double current(double u, const double*) const override { return cubic_f(u, p_); }
  void dynamics(double, const double*, double*) const override {}
  std::string name() const override { return "cubic"; }
  const CubicReactionParams& params() const { return p_; }

 private:
  CubicReactionParams p_;
};

class BarretoCressmanModel final : public ReactionModel {
 public:
  /// current_scale converts uA/cm^2 to the solver's current units (0.01 for uA/mm^2).
  BarretoCressmanModel(BarretoCressmanParams p, IonicState initial, double current_scale)
      : p_(p), initial_(initial), scale_(current_scale) {
    p_.validate();
  }
  int num_states() const override { return 6; }
  double current(double u, const double* y) const override;
  void dynamics(double u, const double* y, double* m) const override;
  std::vector<double> initial_state() const override {
    return {initial_.y.begin(), initial_.y.end()};
  }
  std::string name() const override { return "barreto-cressman"; }
  const BarretoCressmanParams& params() const { return p_; }
  double current_scale() const { return scale_; }

 private:
  BarretoCressmanParams p_;
  IonicState initial_;
  double scale_;
};

}  // namespace padg
