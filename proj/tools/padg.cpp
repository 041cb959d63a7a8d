// padg: command-line driver for the p-adaptive DG monodomain solver.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "padg/output.hpp"
#include "padg/scenarios.hpp"
#include "padg/studies.hpp"

namespace {

struct Source {
  std::string config;
  std::string scenario;
  std::string scale = "desk";
  std::vector<std::string> set;
};

void add_source_options(CLI::App* app, Source& s) {
  app->add_option("config", s.config, "Configuration file");
  app->add_option("-s,--scenario", s.scenario, "Shipped scenario name");
  app->add_option("--scale", s.scale, "Scenario scale")->check(CLI::IsMember({"paper", "desk"}));
  app->add_option("--set", s.set, "Override an entry, key=value (repeatable)");
}

padg::RunConfig resolve(const Source& s) {
  if (!s.scenario.empty()) return padg::instantiate(s.scenario, padg::parse_scale(s.scale), s.set);
  if (s.config.empty()) throw CLI::ValidationError("give a config file or --scenario");
  return padg::load_config(s.config, s.set);
}

int run(const Source& src, const std::string& out) {
  padg::RunConfig c = resolve(src);
  if (!out.empty()) c.output_dir = out;
  const padg::RunSummary s = padg::run_simulation(c, &std::cout);
  std::cout << "steps " << s.steps << "  t " << padg::fmt9(s.t_final) << "  ndof "
            << s.final_ndof << "  u in [" << padg::fmt9(s.u_min) << ", " << padg::fmt9(s.u_max)
            << "]  adaptations " << s.adaptations << "  wall " << padg::fmt9(s.wall_seconds)
            << " s\n";
  for (const auto& e : s.errors) {
    std::cout << "error t=" << padg::fmt9(e.t) << "  l2=" << padg::fmt9(e.l2)
              << "  dg=" << padg::fmt9(e.dg) << "  energy=" << padg::fmt9(e.energy) << '\n';
  }
  return 0;
}

int convergence(const Source& src, std::vector<std::string> meshes, const std::vector<int>& degrees,
                const std::string& out) {
  const padg::RunConfig c = resolve(src);
  if (meshes.empty()) {
    for (const char* m : {"test1a_0070", "test1a_0160", "test1a_0360", "test1a_0800"}) {
      meshes.push_back((padg::data_dir() / "meshes" / (std::string(m) + ".mesh")).string());
    }
  }
  // same lookup as the mesh entry of a config: working directory, then data directory
  std::vector<std::filesystem::path> paths;
  for (const auto& m : meshes) {
    const std::filesystem::path p(m);
    const bool local = p.is_absolute() || std::filesystem::exists(p);
    paths.push_back(local ? p : padg::data_dir() / p);
  }
  const auto rows = padg::convergence_study(c, paths, degrees);
  std::cout << "p  h           elements  ndof    energy       l2           rate\n";
  for (const auto& r : rows) {
    std::cout << r.p << "  " << padg::fmt9(r.h) << "  " << r.elements << "  " << r.ndof << "  "
              << padg::fmt9(r.error) << "  " << padg::fmt9(r.l2) << "  " << padg::fmt9(r.rate)
              << '\n';
  }
  if (!out.empty()) padg::write_convergence_csv(out, rows);
  return 0;
}

int compare(const Source& src, const std::vector<double>& times, const std::string& out) {
  const padg::RunConfig c = resolve(src);
  const auto rep = padg::adaptive_vs_uniform_report(c, times);
  std::cout << "t  ndof_uniform  ndof_adaptive  err_uniform  err_adaptive  difference  reduction\n";
  for (const auto& r : rep.at_times) {
    std::cout << padg::fmt9(r.t) << "  " << r.ndof_uniform << "  " << r.ndof_adaptive << "  "
              << padg::fmt9(r.error_uniform) << "  " << padg::fmt9(r.error_adaptive) << "  "
              << padg::fmt9(r.difference) << "  " << padg::fmt9(r.reduction) << '\n';
  }
  if (!out.empty()) padg::write_compare_csv(out, rep);
  return 0;
}

int ode(double k_bath, double amplitude, double dt, double t_end, double u0,
        const std::string& signs, const std::string& out) {
  padg::BarretoCressmanParams p;
  p.k_bath = k_bath;
  p.signs = signs == "printed" ? padg::ConcentrationSigns::printed
                               : padg::ConcentrationSigns::reference;
  padg::ForcingSpec f;
  f.amplitude = amplitude;
  const int every = std::max(1, static_cast<int>(0.01 / dt));
  const padg::SpikeTrace tr = padg::integrate_0d(p, u0, padg::IonicState{}, dt, t_end, f, every);
  std::cout << "spikes (ms):";
  for (double s : tr.spikes) std::cout << ' ' << padg::fmt9(s);
  std::cout << "\nclamp events: " << tr.clamp_events << '\n';
  if (!out.empty()) {
    std::ofstream o(out);
    o << padg::trace_csv(tr);
  }
  return 0;
}

int mesh_info(const std::string& path) {
  const padg::Mesh m = padg::load_mesh_file(path);
  std::set<int> labels(m.materials().begin(), m.materials().end());
  std::cout << "vertices " << m.num_vertices() << "\ncells " << m.num_cells() << "\nfaces "
            << m.num_faces() << "\ninterior faces " << m.num_interior_faces() << "\nh "
            << padg::fmt9(m.mesh_size()) << "\narea " << padg::fmt9(m.total_area())
            << "\nmin face/diameter " << padg::fmt9(m.min_face_to_diameter_ratio()) << "\nlabels";
  for (int l : labels) std::cout << ' ' << l;
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adaptive polytopal DG solver for the monodomain equation"};
  app.require_subcommand(1);

  Source run_src;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run a configuration");
  add_source_options(run_cmd, run_src);
  run_cmd->add_option("-o,--out", run_out, "Output directory (overrides output.dir)");

  Source conv_src;
  std::vector<std::string> conv_meshes;
  std::vector<int> conv_degrees{1, 2, 3};
  std::string conv_out;
  auto* conv_cmd = app.add_subcommand("convergence", "Uniform-degree convergence table");
  add_source_options(conv_cmd, conv_src);
  conv_cmd->add_option("-m,--mesh", conv_meshes, "Mesh sequence, coarse to fine");
  conv_cmd->add_option("-p,--degrees", conv_degrees, "Degrees")->capture_default_str();
  conv_cmd->add_option("-o,--out", conv_out, "CSV output");

  Source cmp_src;
  std::vector<double> cmp_times;
  std::string cmp_out;
  auto* cmp_cmd = app.add_subcommand("compare", "Adaptive against uniform p_max");
  add_source_options(cmp_cmd, cmp_src);
  cmp_cmd->add_option("-t,--times", cmp_times, "Comparison times (ms)")->required();
  cmp_cmd->add_option("-o,--out", cmp_out, "CSV output");

  double k_bath = 8.0, amplitude = 0.0, ode_dt = 1e-3, t_end = 100.0, u0 = -50.0;
  std::string signs = "reference", ode_out;
  auto* ode_cmd = app.add_subcommand("ode", "Single-cell Barreto-Cressman integration");
  ode_cmd->add_option("--k-bath", k_bath, "Bath potassium (mM)")->capture_default_str();
  ode_cmd->add_option("-A,--amplitude", amplitude, "Forcing amplitude")->capture_default_str();
  ode_cmd->add_option("--dt", ode_dt, "Time step (ms)")->capture_default_str();
  ode_cmd->add_option("-T,--t-end", t_end, "Final time (ms)")->capture_default_str();
  ode_cmd->add_option("--u0", u0, "Initial potential (mV)")->capture_default_str();
  ode_cmd->add_option("--signs", signs, "Concentration sign convention")
      ->check(CLI::IsMember({"reference", "printed"}))
      ->capture_default_str();
  ode_cmd->add_option("-o,--out", ode_out, "Trace CSV");

  std::string mesh_path;
  auto* mesh_cmd = app.add_subcommand("mesh-info", "Mesh statistics");
  mesh_cmd->add_option("mesh", mesh_path, "Mesh file")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(run_src, run_out);
    if (*conv_cmd) return convergence(conv_src, conv_meshes, conv_degrees, conv_out);
    if (*cmp_cmd) return compare(cmp_src, cmp_times, cmp_out);
    if (*ode_cmd) return ode(k_bath, amplitude, ode_dt, t_end, u0, signs, ode_out);
    if (*mesh_cmd) return mesh_info(mesh_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
