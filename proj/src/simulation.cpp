#include "padg/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "padg/output.hpp"

namespace padg {

namespace {

std::unique_ptr<ReactionModel> make_model(const RunConfig& c) {
  if (c.model == ModelKind::cubic) return std::make_unique<CubicModel>(c.cubic);
  return std::make_unique<BarretoCressmanModel>(c.bc, c.bc_initial, c.bc_current_scale);
}

SourceFunction make_source(const RunConfig& c) {
  switch (c.source) {
    case SourceKind::none:
      return {};
    case SourceKind::manufactured:
      return manufactured_source(c.wave, c.materials.tensors().begin()->second, c.coeffs, c.cubic);
    case SourceKind::forcing: {
      const double scale = c.forcing_membrane ? c.coeffs.chi * c.bc_current_scale : 1.0;
      const ForcingSpec f = c.forcing;
      return [f, scale](const Vec2& x, double t) { return scale * forcing_value(t, x, f); };
    }
  }
  return {};
}

std::function<double(const Vec2&)> initial_function(const RunConfig& c) {
  switch (c.initial) {
    case InitialKind::constant: {
      const double v = c.initial_value;
      return [v](const Vec2&) { return v; };
    }
    case InitialKind::wave: {
      const TravelingWaveSpec w = c.wave;
      return [w](const Vec2& x) { return exact_traveling_wave(x, 0.0, w); };
    }
    case InitialKind::double_wave: {
      const DoubleWaveSpec w = c.double_wave;
      return [w](const Vec2& x) { return double_wave_initial(x, w); };
    }
    case InitialKind::region: {
      const RegionSpec r = c.initial_region;
      const double in = c.initial_inside, out = c.initial_value;
      return [r, in, out](const Vec2& x) { return r.contains(x) ? in : out; };
    }
  }
  return {};
}

Eigen::VectorXd project(const std::function<double(const Vec2&)>& f, const Discretization& disc,
                        const AssembledOperators& ops) {
  Eigen::VectorXd out(ops.dofs.total);
  const int order = disc.quad_order();
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    out.segment(ops.dofs.offset(k), ops.dofs.size(k)) =
        project_l2(f, disc.mesh().geometry(k), ops.degrees[k], order);
  }
  return out;
}

}  // namespace

Eigen::VectorXd initial_field(const RunConfig& config, const Discretization& disc,
                              const AssembledOperators& ops) {
  return project(initial_function(config), disc, ops);
}

Simulation::Simulation(RunConfig config) : config_(std::move(config)) {
  mesh_ = std::make_unique<Mesh>(load_mesh_file(config_.mesh));
  try {
    config_.materials.check_mesh(*mesh_);
  } catch (const std::exception& e) {
    throw ConfigError("material", e.what());
  }
  disc_ = std::make_unique<Discretization>(*mesh_, config_.materials, config_.p_max, config_.eta0,
                                           config_.quad_order);
  const DegreeField degrees(mesh_->num_cells(), config_.initial_degree(), config_.p_max);
  ops_ = assemble_operators(*disc_, degrees);
  model_ = make_model(config_);
  source_ = make_source(config_);

  std::vector<Eigen::VectorXd> y;
  for (double y0 : model_->initial_state()) {
    y.push_back(project([y0](const Vec2&) { return y0; }, *disc_, ops_));
  }
  state_ = make_state(initial_field(config_, *disc_, ops_), std::move(y));
  stepper_ = std::make_unique<CrankNicolson>(*disc_, config_.coeffs, config_.time.dt);
  stepper_->set_source_time(config_.source_time);
  if (config_.source == SourceKind::manufactured) {
    neumann_ = manufactured_flux(config_.wave, config_.materials.tensors().begin()->second);
    stepper_->set_boundary_flux(neumann_);
  }

  if (config_.adaptive) {
    adaptor_ = std::make_unique<Adaptor>(config_.adapt, mesh_->num_cells());
    if (config_.adapt.cluster_on_initial) {
      IndicatorInputs in = indicator_inputs();
      in.u_prev = nullptr;
      adaptor_->initialize_threshold(in, 0);
    }
  }
}

IndicatorInputs Simulation::indicator_inputs() const {
  IndicatorInputs in;
  in.disc = disc_.get();
  in.ops = &ops_;
  in.u = &state_.U;
  in.u_prev = state_.step > 0 ? &state_.U_prev : nullptr;
  in.y = &state_.Y;
  in.model = model_.get();
  in.coeffs = config_.coeffs;
  in.source = source_;
  in.neumann = neumann_;
  in.t = state_.t;
  in.dt = config_.time.dt;
  return in;
}

IndicatorField Simulation::full_indicator() const {
  IndicatorField field(mesh_->num_cells());
  std::vector<int> all(static_cast<std::size_t>(mesh_->num_cells()));
  std::iota(all.begin(), all.end(), 0);
  compute_indicator(indicator_inputs(), all, field, state_.step);
  return field;
}

AdaptStats Simulation::advance() {
  if (finished()) throw std::logic_error("simulation already reached T");
  AdaptStats stats;
  try {
    if (adaptor_ && adaptor_->due(state_.step)) {
      stats = adaptor_->adapt(*disc_, ops_, state_, *stepper_, *model_, indicator_inputs());
    }
    stepper_->step(state_, ops_, *model_, source_);
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(std::string(e.what()) + " (step " + std::to_string(state_.step + 1) + ")",
                          state_.step + 1);
  }
  return stats;
}

std::optional<ExactField> Simulation::exact() const {
  if (!config_.has_exact_solution()) return std::nullopt;
  return traveling_wave_field(config_.wave);
}

ErrorNorms Simulation::errors() const {
  const auto ex = exact();
  if (!ex) throw std::logic_error("no exact solution for this configuration");
  return error_norms(*disc_, ops_, state_.U, *ex, state_.t);
}

std::pair<double, double> field_range(const Discretization& disc, const AssembledOperators& ops,
                                      const Eigen::VectorXd& u) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k < disc.mesh().num_cells(); ++k) {
    const int n = ops.dofs.size(k);
    const Eigen::VectorXd uq =
        disc.element(k).value.topRows(n).transpose() * u.segment(ops.dofs.offset(k), n);
    lo = std::min(lo, uq.minCoeff());
    hi = std::max(hi, uq.maxCoeff());
  }
  return {lo, hi};
}

namespace {

std::string numbered(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.%s", stem, i, ext);
  return buf;
}

}  // namespace

RunSummary run_simulation(const RunConfig& config, std::ostream* log) {
  namespace fs = std::filesystem;
  const auto wall0 = std::chrono::steady_clock::now();
  Simulation sim(config);
  const Mesh& mesh = sim.mesh();
  const bool write = !config.output_dir.empty();
  const fs::path dir = config.output_dir;
  if (write) fs::create_directories(dir);

  std::unique_ptr<CsvWriter> ndof_csv, updated_csv, degree_csv, error_csv;
  if (write) {
    ndof_csv = std::make_unique<CsvWriter>(dir / "ndof_evolution.csv", std::vector<std::string>{"t", "v"});
    if (config.adaptive) {
      updated_csv = std::make_unique<CsvWriter>(dir / "updated_elements.csv",
                                                std::vector<std::string>{"t", "v"});
      std::vector<std::string> h{"t"};
      for (int p = 1; p <= config.p_max; ++p) h.push_back("p" + std::to_string(p));
      degree_csv = std::make_unique<CsvWriter>(dir / "degree_counts.csv", h);
    }
    if (config.has_exact_solution() && (config.errors_every > 0 || !config.error_times.empty())) {
      error_csv = std::make_unique<CsvWriter>(dir / "errors.csv",
                                              std::vector<std::string>{"t", "l2", "dg", "energy"});
    }
  }

  RunSummary summary;
  const double mu = config.materials.min_eigenvalue();
  EnergyNorm energy(mu, config.cubic.a, config.coeffs);
  std::vector<double> pending_times = config.error_times;

  auto record_degrees = [&](double t) {
    if (!degree_csv) return;
    std::vector<double> row{t};
    for (int c : degree_histogram(sim.ops().degrees, config.p_max)) row.push_back(c);
    degree_csv->row(row);
  };
  auto snapshot = [&]() {
    const int i = summary.snapshots++;
    const Eigen::VectorXd tau = sim.adaptor() ? sim.adaptor()->indicator().tau
                                              : (sim.state().step > 0 ? sim.full_indicator().tau
                                                                      : Eigen::VectorXd::Zero(mesh.num_cells()));
    write_snapshot(dir / numbered("snapshot", i, "vtk"), mesh, sim.ops().degrees.p, tau,
                   cell_means(sim.disc(), sim.ops(), sim.state().U));
  };
  auto line_sample = [&]() {
    const int i = sim.state().step / config.line_every;
    write_line_csv(dir / numbered("line", i, "csv"),
                   sample_line(mesh, sim.ops(), sim.state().U, *config.line));
  };
  auto errors = [&](bool every) {
    if (!sim.exact()) return;
    const double t = sim.state().t;
    const double half = 0.5 * config.time.dt;
    bool due_time = false;
    for (auto it = pending_times.begin(); it != pending_times.end();) {
      if (std::abs(*it - t) <= half) {
        due_time = true;
        it = pending_times.erase(it);
      } else {
        ++it;
      }
    }
    if (!every && !due_time) return;
    const ErrorNorms e = sim.errors();
    if (every) energy.add(t, e.dg * e.dg, e.l4_pow4);
    // the time integrals need errors_every; without it the energy norm is not available
    const double en = config.errors_every > 0 ? energy.value(e.l2) : std::numeric_limits<double>::quiet_NaN();
    ErrorRecord r{t, e.l2, e.dg, en};
    summary.errors.push_back(r);
    if (error_csv) error_csv->row({r.t, r.l2, r.dg, r.energy});
  };

  const int steps = config.time.steps;
  summary.ndof.emplace_back(0.0, sim.ops().dofs.total);
  if (ndof_csv) ndof_csv->row({0.0, static_cast<double>(sim.ops().dofs.total)});
  record_degrees(0.0);
  if (write && config.snapshot_every > 0) snapshot();
  if (write && config.line_every > 0) line_sample();
  errors(config.errors_every > 0);

  while (!sim.finished()) {
    const AdaptStats st = sim.advance();
    const int k = sim.state().step;
    const double t = sim.state().t;
    if (st.adapted) {
      ++summary.adaptations;
      if (updated_csv) updated_csv->row({st.t, static_cast<double>(st.n_updated)});
      record_degrees(st.t);
    }
    summary.ndof.emplace_back(t, sim.ops().dofs.total);
    if (ndof_csv) ndof_csv->row({t, static_cast<double>(sim.ops().dofs.total)});
    if (write && config.snapshot_every > 0 && k % config.snapshot_every == 0) snapshot();
    if (write && config.line_every > 0 && k % config.line_every == 0) line_sample();
    errors(config.errors_every > 0 && k % config.errors_every == 0);
    if (log && steps >= 10 && k % (steps / 10) == 0) {
      *log << "step " << k << "/" << steps << "  t=" << fmt9(t)
           << "  ndof=" << sim.ops().dofs.total << '\n';
    }
  }

  summary.steps = sim.state().step;
  summary.t_final = sim.state().t;
  summary.final_ndof = sim.ops().dofs.total;
  std::tie(summary.u_min, summary.u_max) = field_range(sim.disc(), sim.ops(), sim.state().U);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  if (write) {
    nlohmann::json j;
    j["steps"] = summary.steps;
    j["t_final"] = summary.t_final;
    j["elements"] = mesh.num_cells();
    j["final_ndof"] = summary.final_ndof;
    j["u_min"] = summary.u_min;
    j["u_max"] = summary.u_max;
    j["wall_seconds"] = summary.wall_seconds;
    j["adaptations"] = summary.adaptations;
    j["snapshots"] = summary.snapshots;
    if (sim.adaptor() && sim.adaptor()->has_threshold()) {
      j["threshold"] = sim.adaptor()->threshold();
    }
    if (!summary.errors.empty()) {
      const ErrorRecord& e = summary.errors.back();
      j["final_error"] = {{"t", e.t}, {"l2", e.l2}, {"dg", e.dg}, {"energy", e.energy}};
    }
    j["config"] = config.entries;
    std::ofstream out(dir / "summary.json");
    out << j.dump(2) << '\n';
  }
  return summary;
}

}  // namespace padg
