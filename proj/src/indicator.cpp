#include "padg/indicator.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace padg {

IndicatorField::IndicatorField(int n)
    : tau(Eigen::VectorXd::Zero(n)),
      residual(Eigen::VectorXd::Zero(n)),
      normal(Eigen::VectorXd::Zero(n)),
      jump(Eigen::VectorXd::Zero(n)),
      tangential(Eigen::VectorXd::Zero(n)),
      oscillation(Eigen::VectorXd::Zero(n)),
      updated_step(static_cast<std::size_t>(n), -1) {}

namespace {

void check_inputs(const IndicatorInputs& in) {
  if (!in.disc || !in.ops || !in.u) throw std::invalid_argument("indicator: missing inputs");
  if (in.u->size() != in.ops->dofs.total) {
    throw std::invalid_argument("indicator: solution does not match the layout");
  }
  if (in.u_prev && in.u_prev->size() != in.u->size()) {
    throw std::invalid_argument("indicator: layout mismatch between u^k and u^{k-1}");
  }
}

// Source values at the quadrature points and their projection onto P^p(K).
void source_and_projection(const IndicatorInputs& in, int k, Eigen::VectorXd& s,
                           Eigen::VectorXd& pis) {
  const ElementCache& c = in.disc->element(k);
  const int nq = static_cast<int>(c.rule.size());
  s = Eigen::VectorXd::Zero(nq);
  pis = Eigen::VectorXd::Zero(nq);
  if (!in.source) return;
  for (int q = 0; q < nq; ++q) s[q] = in.source(c.rule.points[q], in.t);
  const int n = in.ops->dofs.size(k);
  const auto phi = c.value.topRows(n);
  Eigen::LLT<Eigen::MatrixXd> llt(in.ops->mass[static_cast<std::size_t>(k)]);
  const Eigen::VectorXd coef = llt.solve(phi * c.weights.cwiseProduct(s));
  pis = phi.transpose() * coef;
}

}  // namespace

double residual_term(const IndicatorInputs& in, int k) {
  check_inputs(in);
  const ElementCache& c = in.disc->element(k);
  const int n = in.ops->dofs.size(k);
  const int off = in.ops->dofs.offset(k);
  const int nq = static_cast<int>(c.rule.size());
  const auto phi = c.value.topRows(n);
  const Eigen::VectorXd uk = in.u->segment(off, n);
  const Eigen::VectorXd uq = phi.transpose() * uk;
  const Eigen::VectorXd div = c.div_flux.topRows(n).transpose() * uk;
  Eigen::VectorXd dudt = Eigen::VectorXd::Zero(nq);
  if (in.u_prev) dudt = phi.transpose() * (uk - in.u_prev->segment(off, n)) / in.dt;

  Eigen::VectorXd s, pis;
  source_and_projection(in, k, s, pis);

  const int ns = in.model ? in.model->num_states() : 0;
  std::vector<double> ys(static_cast<std::size_t>(ns));
  Eigen::MatrixXd yq(ns, nq);
  for (int l = 0; l < ns; ++l) yq.row(l) = (phi.transpose() * (*in.y)[l].segment(off, n)).transpose();

  double acc = 0.0;
  for (int q = 0; q < nq; ++q) {
    double f = 0.0;
    if (in.model) {
      for (int l = 0; l < ns; ++l) ys[l] = yq(l, q);
      f = in.model->current(uq[q], ys.data());
    }
    const double r = in.coeffs.chi * f - div[q] + in.coeffs.chi * in.coeffs.cm * dudt[q] - pis[q];
    acc += c.weights[q] * r * r;
  }
  return in.disc->mesh().geometry(k).diameter * std::sqrt(acc);
}

double oscillation_term(const IndicatorInputs& in, int k) {
  check_inputs(in);
  if (!in.source) return 0.0;
  const ElementCache& c = in.disc->element(k);
  Eigen::VectorXd s, pis;
  source_and_projection(in, k, s, pis);
  const double acc = c.weights.dot((pis - s).cwiseAbs2());
  return in.disc->mesh().geometry(k).diameter * std::sqrt(acc);
}

JumpTerms jump_terms(const IndicatorInputs& in, int k) {
  check_inputs(in);
  const Mesh& mesh = in.disc->mesh();
  const DofMap& dofs = in.ops->dofs;
  const double h = mesh.geometry(k).diameter;
  double sn = 0.0, sj = 0.0, st = 0.0;
  for (int f : mesh.cell_faces(k)) {
    const Face& face = mesh.face(f);
    const FaceCache& c = in.disc->face(f);
    if (!face.is_interior()) {
      const int n = dofs.size(k);
      Eigen::VectorXd flux =
          c.side[0].flux_n.topRows(n).transpose() * in.u->segment(dofs.offset(k), n);
      if (in.neumann) {
        for (int q = 0; q < flux.size(); ++q) flux[q] -= in.neumann(c.rule.points[q], face.normal, in.t);
      }
      sn += h * c.weights.dot(flux.cwiseAbs2());
      continue;
    }
    const int a = face.cells[0], b = face.cells[1];
    const int na = dofs.size(a), nb = dofs.size(b);
    const Eigen::VectorXd ua = in.u->segment(dofs.offset(a), na);
    const Eigen::VectorXd ub = in.u->segment(dofs.offset(b), nb);
    const Eigen::VectorXd ju =
        c.side[0].value.topRows(na).transpose() * ua - c.side[1].value.topRows(nb).transpose() * ub;
    const Eigen::VectorXd jn = c.side[0].flux_n.topRows(na).transpose() * ua -
                               c.side[1].flux_n.topRows(nb).transpose() * ub;
    const Eigen::VectorXd jt = c.side[0].flux_t.topRows(na).transpose() * ua -
                               c.side[1].flux_t.topRows(nb).transpose() * ub;
    sn += h * c.weights.dot(jn.cwiseAbs2());
    sj += in.ops->eta[static_cast<std::size_t>(f)] * c.weights.dot(ju.cwiseAbs2());
    st += h * c.weights.dot(jt.cwiseAbs2());
  }
  return {std::sqrt(sn), std::sqrt(sj), std::sqrt(st)};
}

double combine(double r, double n, double j, double t, double o) {
  return std::sqrt(r * r + n * n + j * j + t * t + o * o);
}

void compute_indicator(const IndicatorInputs& in, const std::vector<int>& elements,
                       IndicatorField& field, int step) {
  check_inputs(in);
  for (int k : elements) {
    const double r = residual_term(in, k);
    const double o = oscillation_term(in, k);
    const JumpTerms j = jump_terms(in, k);
    field.residual[k] = r;
    field.oscillation[k] = o;
    field.normal[k] = j.normal;
    field.jump[k] = j.jump;
    field.tangential[k] = j.tangential;
    field.tau[k] = combine(r, j.normal, j.jump, j.tangential, o);
    field.updated_step[static_cast<std::size_t>(k)] = step;
  }
}

Eigen::VectorXd marking_values(const IndicatorField& field, MarkingIndicator which) {
  switch (which) {
    case MarkingIndicator::full:
      return field.tau;
    case MarkingIndicator::jump:
      return field.jump;
    case MarkingIndicator::residual:
      return field.residual;
  }
  return field.tau;
}

}  // namespace padg
