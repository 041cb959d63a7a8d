#include "padg/ionic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace padg {

namespace {

constexpr double kNernst = 26.64;  // RT/F in mV
constexpr double kClIn = 6.0;
constexpr double kClOut = 130.0;

// x / (1 - e^{-x/10}) scaled; regular at x = 0.
double alpha_linear(double scale, double x) {
  if (std::abs(x) < 1e-9) return scale * 10.0;
  return scale * x / (-std::expm1(-0.1 * x));
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string("non-finite ") + what);
}

}  // namespace

void CubicReactionParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("cubic reaction: a must be > 0");
  if (!(v_rest <= v_thres && v_thres <= v_depol)) {
    throw std::invalid_argument("cubic reaction: need v_rest <= v_thres <= v_depol");
  }
}

double cubic_f(double u, const CubicReactionParams& p) {
  return p.a * (u - p.v_rest) * (u - p.v_thres) * (u - p.v_depol);
}

double cubic_df(double u, const CubicReactionParams& p) {
  const double a = u - p.v_rest, b = u - p.v_thres, c = u - p.v_depol;
  return p.a * (a * b + b * c + a * c);
}

void BarretoCressmanParams::validate() const {
  for (double g : {g_nal, g_na, g_k, g_ahp, g_kl, g_cll, g_ca, g_glia}) {
    if (g < 0.0) throw std::invalid_argument("Barreto-Cressman: negative conductance");
  }
  if (!(k_bath > 0.0)) throw std::invalid_argument("Barreto-Cressman: k_bath must be > 0");
  if (!(c_m > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument("Barreto-Cressman: c_m and tau must be > 0");
  }
}

BcCurrents bc_currents(double u, const IonicState& y, const BarretoCressmanParams& p) {
  const double s = y.s(), k = y.k(), c = y.c();
  const double k_in = 140.0 + (18.0 - s);
  const double na_out = 144.0 - p.beta * (s - 18.0);
  BcCurrents out;
  out.e_na = kNernst * std::log(na_out / s);
  out.e_k = kNernst * std::log(k / k_in);
  out.e_cl = kNernst * std::log(kClIn / kClOut);
  check_finite(out.e_na, "sodium reversal potential");
  check_finite(out.e_k, "potassium reversal potential");
  const double gs = y.gs(), gk = y.gk(), gc = y.gc();
  out.i_na = (p.g_nal + p.g_na * gs * gs * gs * gk) * (u - out.e_na);
  out.i_k = (p.g_k * gc * gc * gc * gc + p.g_ahp * c / (1.0 + c) + p.g_kl) * (u - out.e_k);
  out.i_cl = p.g_cll * (u - out.e_cl);
  return out;
}

GatingRates bc_gating(double u, const BarretoCressmanParams& p) {
  const double am = alpha_linear(0.1, u + 30.0);
  const double bm = 4.0 * std::exp(-(u + 55.0) / 18.0);
  const double ah = 0.07 * std::exp(-(u + 44.0) / 20.0);
  const double bh = 1.0 / (1.0 + std::exp(-0.1 * (u + 14.0)));
  const double an = alpha_linear(0.01, u + 34.0);
  const double bn = 0.125 * std::exp(-(u + 44.0) / 80.0);
  GatingRates r;
  const std::array<std::pair<double, double>, 3> ab{{{am, bm}, {ah, bh}, {an, bn}}};
  for (int i = 0; i < 3; ++i) {
    const double sum = ab[i].first + ab[i].second;
    r.inf[i] = ab[i].first / sum;
    r.tau[i] = 1.0 / sum;
  }
  (void)p;
  return r;
}

std::array<double, 6> bc_rhs(double u, const IonicState& y, const BarretoCressmanParams& p) {
  const BcCurrents cur = bc_currents(u, y, p);
  const double s = y.s(), k = y.k(), c = y.c();
  const double pump = p.rho / (1.0 + std::exp((25.0 - s) / 3.0)) / (1.0 + std::exp(5.5 - k));
  const double glia = p.g_glia / (1.0 + std::exp((18.0 - k) / 2.5));
  const double diff = p.eps_diff * (k - p.k_bath);
  double m_k, m_s;
  if (p.signs == ConcentrationSigns::reference) {
    m_k = (diff + 14.0 * pump + glia - 7.0 * p.gamma * cur.i_k) / p.tau;
    m_s = (p.gamma * cur.i_na + 3.0 * pump) / p.tau;
  } else {
    m_k = (diff - 14.0 * pump - glia + 7.0 * p.gamma * cur.i_k) / p.tau;
    m_s = (p.gamma * cur.i_na - 3.0 * pump) / p.tau;
  }
  const double m_c = c / 80.0 + p.g_ca * 0.002 * (u - p.e_ca) / (1.0 + std::exp(-(25.0 + u) / 2.5));
  const GatingRates g = bc_gating(u, p);
  std::array<double, 6> dydt{-m_s, -m_k, -m_c, 0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) dydt[3 + i] = -p.phi * (y.y[3 + i] - g.inf[i]) / g.tau[i];
  for (double v : dydt) check_finite(v, "ionic right-hand side");
  return dydt;
}

int clamp_state(IonicState& y) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    if (y.y[i] < 0.0) {
      y.y[i] = 0.0;
      ++n;
    }
  }
  for (int i = 3; i < 6; ++i) {
    const double v = std::clamp(y.y[i], 0.0, 1.0);
    if (v != y.y[i]) {
      y.y[i] = v;
      ++n;
    }
  }
  return n;
}

bool ForcingSpec::contains(const Vec2& x) const {
  switch (region) {
    case Region::everywhere:
      return true;
    case Region::disk:
      return (x - center).norm() <= radius;
    case Region::polygon:
      return point_in_polygon(x, polygon);
  }
  return false;
}

double forcing_value(double t, const Vec2& x, const ForcingSpec& spec) {
  if (spec.amplitude == 0.0 || !spec.contains(x)) return 0.0;
  return spec.amplitude / (1.0 + std::exp(std::sin(t)));
}

SpikeTrace integrate_0d(const BarretoCressmanParams& params, double u0, IonicState y0, double dt,
                        double t_end, const ForcingSpec& forcing, int record_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (record_every < 1) record_every = 1;
  params.validate();
  SpikeTrace trace;
  const long steps = std::lround(t_end / dt);
  double u = u0;
  IonicState y = y0;
  double last_spike = -1e300;
  trace.t.push_back(0.0);
  trace.u.push_back(u);
  trace.y.push_back(y);
  const Vec2 origin(0.0, 0.0);
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    const double f = bc_currents(u, y, params).total();
    const std::array<double, 6> dydt = bc_rhs(u, y, params);
    const double i_ext = forcing.amplitude == 0.0 ? 0.0 : forcing_value(t, origin, forcing);
    const double u_new = u + dt * (-f + i_ext) / params.c_m;
    for (int i = 0; i < 6; ++i) y.y[i] += dt * dydt[i];
    trace.clamp_events += clamp_state(y);
    const double t_new = (n + 1) * dt;
    if (u < 0.0 && u_new >= 0.0 && t_new - last_spike > 1.0) {
      trace.spikes.push_back(t_new);
      last_spike = t_new;
    }
    u = u_new;
    if (!std::isfinite(u) || std::abs(u) > 500.0) {
      throw BlowUpError("0D integration blew up at step " + std::to_string(n + 1), n + 1);
    }
    if ((n + 1) % record_every == 0) {
      trace.t.push_back(t_new);
      trace.u.push_back(u);
      trace.y.push_back(y);
    }
  }
  return trace;
}

std::string trace_csv(const SpikeTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(9) << "t,v\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i) out << trace.t[i] << ',' << trace.u[i] << '\n';
  return out.str();
}

namespace {

IonicState safe_state(const double* y) {
  IonicState s;
  for (int i = 0; i < 6; ++i) s.y[i] = y[i];
  clamp_state(s);
  for (int i = 0; i < 2; ++i) s.y[i] = std::max(s.y[i], 1e-8);
  return s;
}

}  // namespace

double BarretoCressmanModel::current(double u, const double* y) const {
  return scale_ * bc_currents(u, safe_state(y), p_).total();
}

void BarretoCressmanModel::dynamics(double u, const double* y, double* m) const {
  const std::array<double, 6> dydt = bc_rhs(u, safe_state(y), p_);
  for (int i = 0; i < 6; ++i) m[i] = -dydt[i];
}

}  // namespace padg
