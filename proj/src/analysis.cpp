#include "padg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace padg {

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
}

double wave_coordinate(const Vec2& x, double t, const TravelingWaveSpec& s) {
  return s.direction.normalized().dot(x) - s.x0 - s.speed * t;
}

}  // namespace

double exact_traveling_wave(const Vec2& x, double t, const TravelingWaveSpec& spec) {
  const double z = wave_coordinate(x, t, spec);
  return spec.v_rest + 0.5 * (spec.v_depol - spec.v_rest) * (1.0 - std::tanh(z / spec.eps));
}

Vec2 exact_traveling_wave_gradient(const Vec2& x, double t, const TravelingWaveSpec& spec) {
  const double z = wave_coordinate(x, t, spec);
  const double du_dz = -0.5 * (spec.v_depol - spec.v_rest) / spec.eps * sech2(z / spec.eps);
  return du_dz * spec.direction.normalized();
}

double exact_traveling_wave_dt(const Vec2& x, double t, const TravelingWaveSpec& spec) {
  const double z = wave_coordinate(x, t, spec);
  return 0.5 * (spec.v_depol - spec.v_rest) * spec.speed / spec.eps * sech2(z / spec.eps);
}

double exact_traveling_wave_div_flux(const Vec2& x, double t, const TravelingWaveSpec& spec,
                                     const Mat2& sigma) {
  const double z = wave_coordinate(x, t, spec);
  const Vec2 d = spec.direction.normalized();
  const double u_zz = (spec.v_depol - spec.v_rest) / (spec.eps * spec.eps) * sech2(z / spec.eps) *
                      std::tanh(z / spec.eps);
  return d.dot(sigma * d) * u_zz;
}

SourceFunction manufactured_source(const TravelingWaveSpec& spec, const Mat2& sigma,
                                   const ModelCoefficients& coeffs,
                                   const CubicReactionParams& cubic) {
  return [spec, sigma, coeffs, cubic](const Vec2& x, double t) {
    const double u = exact_traveling_wave(x, t, spec);
    return coeffs.chi * coeffs.cm * exact_traveling_wave_dt(x, t, spec) -
           exact_traveling_wave_div_flux(x, t, spec, sigma) + coeffs.chi * cubic_f(u, cubic);
  };
}

BoundaryFlux manufactured_flux(const TravelingWaveSpec& spec, const Mat2& sigma) {
  return [spec, sigma](const Vec2& x, const Vec2& n, double t) {
    return (sigma * exact_traveling_wave_gradient(x, t, spec)).dot(n);
  };
}

std::pair<double, double> compatible_wave(double sigma, const ModelCoefficients& coeffs,
                                          const CubicReactionParams& cubic) {
  const double D = sigma / (coeffs.chi * coeffs.cm);
  const double k = cubic.a / coeffs.cm;
  const double c = std::sqrt(k * D / 2.0) * (cubic.v_rest + cubic.v_depol - 2.0 * cubic.v_thres);
  const double eps = 2.0 * std::sqrt(2.0 * D / k) / (cubic.v_depol - cubic.v_rest);
  return {c, eps};
}

double double_wave_initial(const Vec2& x, const DoubleWaveSpec& s) {
  const double amp = 0.5 * (s.v_depol - s.v_rest);
  return amp * (std::tanh((x.x() - s.x_right) / s.eps_right) -
                std::tanh((x.x() - s.x_left) / s.eps_left)) +
         s.v_depol;
}

ExactField traveling_wave_field(const TravelingWaveSpec& spec) {
  ExactField f;
  f.value = [spec](const Vec2& x, double t) { return exact_traveling_wave(x, t, spec); };
  f.gradient = [spec](const Vec2& x, double t) { return exact_traveling_wave_gradient(x, t, spec); };
  return f;
}

namespace {

struct ElementError {
  double l2 = 0.0;
  double grad = 0.0;
  double l4 = 0.0;
};

ElementError element_error(const Discretization& disc, const AssembledOperators& ops,
                           const Eigen::VectorXd& u, const ExactField& exact, double t, int k) {
  const ElementCache& c = disc.element(k);
  const int n = ops.dofs.size(k);
  const Eigen::VectorXd uk = u.segment(ops.dofs.offset(k), n);
  const Eigen::VectorXd uq = c.value.topRows(n).transpose() * uk;
  const Eigen::VectorXd gx = c.dx.topRows(n).transpose() * uk;
  const Eigen::VectorXd gy = c.dy.topRows(n).transpose() * uk;
  ElementError e;
  for (int q = 0; q < static_cast<int>(c.rule.size()); ++q) {
    const Vec2& x = c.rule.points[q];
    const double d = uq[q] - (exact.value ? exact.value(x, t) : 0.0);
    const Vec2 g = exact.gradient ? exact.gradient(x, t) : Vec2(0.0, 0.0);
    const double ex = gx[q] - g.x(), ey = gy[q] - g.y();
    const double w = c.weights[q];
    e.l2 += w * d * d;
    e.grad += w * (ex * ex + ey * ey);
    e.l4 += w * d * d * d * d;
  }
  return e;
}

double jump_squared(const Discretization& disc, const AssembledOperators& ops,
                    const Eigen::VectorXd& u) {
  const Mesh& mesh = disc.mesh();
  double acc = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_interior()) continue;
    const FaceCache& c = disc.face(f);
    const int a = face.cells[0], b = face.cells[1];
    const int na = ops.dofs.size(a), nb = ops.dofs.size(b);
    const Eigen::VectorXd ju =
        c.side[0].value.topRows(na).transpose() * u.segment(ops.dofs.offset(a), na) -
        c.side[1].value.topRows(nb).transpose() * u.segment(ops.dofs.offset(b), nb);
    acc += ops.eta[static_cast<std::size_t>(f)] * c.weights.dot(ju.cwiseAbs2());
  }
  return acc;
}

}  // namespace

ErrorNorms error_norms(const Discretization& disc, const AssembledOperators& ops,
                       const Eigen::VectorXd& u, const ExactField& exact, double t) {
  double l2 = 0.0, grad = 0.0, l4 = 0.0;
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    const ElementError e = element_error(disc, ops, u, exact, t, k);
    l2 += e.l2;
    grad += e.grad;
    l4 += e.l4;
  }
  ErrorNorms out;
  out.l2 = std::sqrt(l2);
  out.dg = std::sqrt(grad + jump_squared(disc, ops, u));
  out.l4_pow4 = l4;
  return out;
}

Eigen::VectorXd element_errors(const Discretization& disc, const AssembledOperators& ops,
                               const Eigen::VectorXd& u, const ExactField& exact, double t) {
  Eigen::VectorXd out(disc.mesh().num_cells());
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    const ElementError e = element_error(disc, ops, u, exact, t, k);
    out[k] = std::sqrt(e.l2 + e.grad);
  }
  return out;
}

double l2_norm(const AssembledOperators& ops, const Eigen::VectorXd& u) {
  double acc = 0.0;
  for (int k = 0; k < ops.dofs.num_elements(); ++k) {
    const auto uk = u.segment(ops.dofs.offset(k), ops.dofs.size(k));
    acc += uk.dot(ops.mass[static_cast<std::size_t>(k)] * uk);
  }
  return std::sqrt(std::max(acc, 0.0));
}

double dg_norm(const Discretization& disc, const AssembledOperators& ops,
               const Eigen::VectorXd& u) {
  const ExactField zero;
  double grad = 0.0;
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    grad += element_error(disc, ops, u, zero, 0.0, k).grad;
  }
  return std::sqrt(grad + jump_squared(disc, ops, u));
}

double l4_pow4(const Discretization& disc, const AssembledOperators& ops,
               const Eigen::VectorXd& u) {
  const ExactField zero;
  double acc = 0.0;
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    acc += element_error(disc, ops, u, zero, 0.0, k).l4;
  }
  return acc;
}

EnergyNorm::EnergyNorm(double mu, double a, const ModelCoefficients& coeffs)
    : w_dg_(2.0 * mu / (coeffs.cm * coeffs.chi)), w_l4_(a / coeffs.cm) {}

void EnergyNorm::add(double t, double dg_squared, double l4) {
  const double g = w_dg_ * dg_squared + w_l4_ * l4;
  if (started_) integral_ += 0.5 * (t - last_t_) * (g + last_integrand_);
  started_ = true;
  last_t_ = t;
  last_integrand_ = g;
}

double EnergyNorm::value(double l2_at_t) const {
  return std::sqrt(l2_at_t * l2_at_t + integral_);
}

namespace {

Eigen::VectorXd ranks(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&v](int a, int b) { return v[a] < v[b]; });
  Eigen::VectorXd r(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (int m = i; m <= j; ++m) r[idx[m]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: bad sizes");
  const Eigen::VectorXd ra = ranks(a), rb = ranks(b);
  const Eigen::VectorXd da = ra.array() - ra.mean();
  const Eigen::VectorXd db = rb.array() - rb.mean();
  const double den = std::sqrt(da.squaredNorm() * db.squaredNorm());
  return den > 0.0 ? da.dot(db) / den : 0.0;
}

double observed_rate(double h_coarse, double e_coarse, double h_fine, double e_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

double loglog_interpolate(const std::vector<std::pair<double, double>>& curve, double h) {
  if (curve.size() < 2) throw std::invalid_argument("need at least two points");
  std::vector<std::pair<double, double>> c = curve;
  std::sort(c.begin(), c.end());
  std::size_t i = 0;
  while (i + 2 < c.size() && h > c[i + 1].first) ++i;
  const double x0 = std::log(c[i].first), x1 = std::log(c[i + 1].first);
  const double y0 = std::log(c[i].second), y1 = std::log(c[i + 1].second);
  const double s = (std::log(h) - x0) / (x1 - x0);
  return std::exp(y0 + s * (y1 - y0));
}

}  // namespace padg
