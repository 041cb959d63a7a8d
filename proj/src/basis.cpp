#include "padg/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace padg {

void DegreeField::validate() const {
  if (p_max < 1) throw std::invalid_argument("p_max must be >= 1");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < 1 || p[k] > p_max) {
      throw std::invalid_argument("degree of element " + std::to_string(k) + " is " +
                                  std::to_string(p[k]) + ", outside [1, " +
                                  std::to_string(p_max) + "]");
    }
  }
}

DofMap build_dof_map(const std::vector<int>& degrees) {
  DofMap map;
  map.offsets.resize(degrees.size());
  map.sizes.resize(degrees.size());
  int off = 0;
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    map.offsets[k] = off;
    map.sizes[k] = local_dim(degrees[k]);
    off += map.sizes[k];
  }
  map.total = off;
  return map;
}

DofMap build_dof_map(const DegreeField& degrees) { return build_dof_map(degrees.p); }

std::pair<int, int> mode_exponents(int m) {
  int d = 0;
  while (local_dim(d) <= m) ++d;
  const int j = m - local_dim(d - 1);
  return {d - j, j};
}

namespace {

// Normalized Legendre values and first/second derivatives on [-1, 1].
void legendre(int n, double x, std::vector<double>& v, std::vector<double>& d1,
              std::vector<double>& d2) {
  v.assign(static_cast<std::size_t>(n + 1), 0.0);
  d1.assign(static_cast<std::size_t>(n + 1), 0.0);
  d2.assign(static_cast<std::size_t>(n + 1), 0.0);
  v[0] = 1.0;
  if (n >= 1) {
    v[1] = x;
    d1[1] = 1.0;
  }
  for (int k = 1; k < n; ++k) {
    v[k + 1] = ((2.0 * k + 1.0) * x * v[k] - k * v[k - 1]) / (k + 1.0);
    d1[k + 1] = d1[k - 1] + (2.0 * k + 1.0) * v[k];
    d2[k + 1] = d2[k - 1] + (2.0 * k + 1.0) * d1[k];
  }
  for (int k = 0; k <= n; ++k) {
    const double s = std::sqrt((2.0 * k + 1.0) / 2.0);
    v[k] *= s;
    d1[k] *= s;
    d2[k] *= s;
  }
}

}  // namespace

BasisValues eval_basis(const BoundingBox& box, int p, const std::vector<Vec2>& points,
                       bool hessians) {
  const int nm = local_dim(p);
  const int np = static_cast<int>(points.size());
  const double hx = box.width();
  const double hy = box.height();
  const double norm = 2.0 / std::sqrt(hx * hy);
  const double sx = 2.0 / hx;
  const double sy = 2.0 / hy;
  const Vec2 mid = 0.5 * (box.lower + box.upper);

  BasisValues out;
  out.value.resize(nm, np);
  out.dx.resize(nm, np);
  out.dy.resize(nm, np);
  if (hessians) {
    out.dxx.resize(nm, np);
    out.dxy.resize(nm, np);
    out.dyy.resize(nm, np);
  }
  std::vector<double> lx, dlx, ddlx, ly, dly, ddly;
  for (int q = 0; q < np; ++q) {
    const double xi = sx * (points[q].x() - mid.x());
    const double et = sy * (points[q].y() - mid.y());
    legendre(p, xi, lx, dlx, ddlx);
    legendre(p, et, ly, dly, ddly);
    int m = 0;
    for (int d = 0; d <= p; ++d) {
      for (int j = 0; j <= d; ++j, ++m) {
        const int i = d - j;
        out.value(m, q) = norm * lx[i] * ly[j];
        out.dx(m, q) = norm * sx * dlx[i] * ly[j];
        out.dy(m, q) = norm * sy * lx[i] * dly[j];
        if (hessians) {
          out.dxx(m, q) = norm * sx * sx * ddlx[i] * ly[j];
          out.dxy(m, q) = norm * sx * sy * dlx[i] * dly[j];
          out.dyy(m, q) = norm * sy * sy * lx[i] * ddly[j];
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd local_mass(const ElementGeometry& geom, int p, int order) {
  const QuadratureRule rule = quadrature(geom, order);
  const BasisValues b = eval_basis(geom, p, rule.points);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                            static_cast<Eigen::Index>(rule.weights.size()));
  return b.value * w.asDiagonal() * b.value.transpose();
}

Eigen::VectorXd project_l2(const std::function<double(const Vec2&)>& f,
                           const ElementGeometry& geom, int p, int order) {
  const QuadratureRule rule = quadrature(geom, order);
  const BasisValues b = eval_basis(geom, p, rule.points);
  Eigen::VectorXd wf(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t q = 0; q < rule.size(); ++q) wf[q] = rule.weights[q] * f(rule.points[q]);
  Eigen::VectorXd rhs = b.value * wf;
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                            static_cast<Eigen::Index>(rule.weights.size()));
  Eigen::MatrixXd mass = b.value * w.asDiagonal() * b.value.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("singular local mass matrix in L2 projection");
  }
  return llt.solve(rhs);
}

Eigen::VectorXd evaluate(const ElementGeometry& geom, const Eigen::VectorXd& coeffs,
                         const std::vector<Vec2>& points) {
  int p = 0;
  while (local_dim(p) < coeffs.size()) ++p;
  if (local_dim(p) != coeffs.size()) {
    throw std::invalid_argument("coefficient vector length is not a local dimension");
  }
  const BasisValues b = eval_basis(geom, p, points);
  return b.value.transpose() * coeffs;
}

}  // namespace padg
