#include "padg/studies.hpp"

#include <cmath>
#include <limits>

#include "padg/output.hpp"

namespace padg {

std::vector<ConvergenceRow> convergence_study(const RunConfig& base,
                                              const std::vector<std::filesystem::path>& meshes,
                                              const std::vector<int>& degrees) {
  if (!base.has_exact_solution()) {
    throw std::invalid_argument("convergence study needs a manufactured wave");
  }
  std::vector<ConvergenceRow> rows;
  for (int p : degrees) {
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      RunConfig c = base;
      c.mesh = meshes[i];
      c.p_max = c.adapt.p_max = p;
      c.p_init = p;
      c.adaptive = false;
      c.output_dir.clear();
      c.snapshot_every = 0;
      c.line_every = 0;
      c.errors_every = 1;
      c.error_times.clear();
      const RunSummary s = run_simulation(c);
      const Mesh mesh = load_mesh_file(c.mesh);
      ConvergenceRow r;
      r.p = p;
      r.h = mesh.mesh_size();
      r.elements = mesh.num_cells();
      r.ndof = s.final_ndof;
      r.error = s.errors.back().energy;
      r.l2 = s.errors.back().l2;
      if (i > 0) {
        const ConvergenceRow& prev = rows.back();
        r.rate = observed_rate(prev.h, prev.error, r.h, r.error);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows) {
  CsvWriter csv(path, {"p", "h", "elements", "ndof", "error", "l2", "rate"});
  for (const auto& r : rows) {
    csv.row({static_cast<double>(r.p), r.h, static_cast<double>(r.elements),
             static_cast<double>(r.ndof), r.error, r.l2, r.rate});
  }
}

double l2_difference(const Discretization& disc, const AssembledOperators& a,
                     const Eigen::VectorXd& ua, const AssembledOperators& b,
                     const Eigen::VectorXd& ub) {
  double acc = 0.0;
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    const ElementCache& c = disc.element(k);
    const int na = a.dofs.size(k), nb = b.dofs.size(k);
    const Eigen::VectorXd d = c.value.topRows(na).transpose() * ua.segment(a.dofs.offset(k), na) -
                              c.value.topRows(nb).transpose() * ub.segment(b.dofs.offset(k), nb);
    acc += c.weights.dot(d.cwiseAbs2());
  }
  return std::sqrt(acc);
}

CompareReport adaptive_vs_uniform_report(const RunConfig& config,
                                         const std::vector<double>& times) {
  RunConfig cu = config;
  cu.adaptive = false;
  cu.p_init = cu.p_max;
  cu.output_dir.clear();
  cu.errors_every = 0;
  cu.error_times.clear();
  RunConfig ca = cu;
  ca.adaptive = true;

  Simulation un(cu);
  Simulation ad(ca);
  CompareReport rep;
  rep.elements = un.mesh().num_cells();
  std::vector<double> pending = times;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto record = [&]() {
    const double t = un.state().t;
    rep.t.push_back(t);
    rep.ndof_uniform.push_back(un.ops().dofs.total);
    rep.ndof_adaptive.push_back(ad.ops().dofs.total);
    rep.degree_counts.push_back(degree_histogram(ad.ops().degrees, ca.p_max));
    for (auto it = pending.begin(); it != pending.end();) {
      if (std::abs(*it - t) > 0.5 * cu.time.dt) {
        ++it;
        continue;
      }
      it = pending.erase(it);
      CompareRow r;
      r.t = t;
      r.ndof_uniform = un.ops().dofs.total;
      r.ndof_adaptive = ad.ops().dofs.total;
      r.error_uniform = un.exact() ? un.errors().l2 : nan;
      r.error_adaptive = ad.exact() ? ad.errors().l2 : nan;
      r.difference = l2_difference(un.disc(), un.ops(), un.state().U, ad.ops(), ad.state().U);
      r.reduction = 1.0 - static_cast<double>(r.ndof_adaptive) / r.ndof_uniform;
      rep.at_times.push_back(r);
    }
  };

  record();
  while (!un.finished()) {
    un.advance();
    ad.advance();
    record();
  }
  return rep;
}

void write_compare_csv(const std::filesystem::path& path, const CompareReport& report) {
  CsvWriter csv(path, {"t", "ndof_uniform", "ndof_adaptive", "error_uniform", "error_adaptive",
                       "difference", "reduction"});
  for (const auto& r : report.at_times) {
    csv.row({r.t, static_cast<double>(r.ndof_uniform), static_cast<double>(r.ndof_adaptive),
             r.error_uniform, r.error_adaptive, r.difference, r.reduction});
  }
}

}  // namespace padg
