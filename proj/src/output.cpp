#include "padg/output.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace padg {

std::string fmt9(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path_.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("csv row has the wrong width");
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path_.string());
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << fmt9(values[i]);
  out << '\n';
}

Eigen::VectorXd cell_means(const Discretization& disc, const AssembledOperators& ops,
                           const Eigen::VectorXd& u) {
  const Mesh& mesh = disc.mesh();
  Eigen::VectorXd out(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementCache& c = disc.element(k);
    const int n = ops.dofs.size(k);
    const Eigen::VectorXd uq = c.value.topRows(n).transpose() * u.segment(ops.dofs.offset(k), n);
    out[k] = c.weights.dot(uq) / c.weights.sum();
  }
  return out;
}

namespace {

bool in_box(const Mesh& mesh, int k, const Vec2& x, double rel) {
  const BoundingBox& b = mesh.geometry(k).bbox;
  const double tol = rel * (1.0 + mesh.geometry(k).diameter);
  return x.x() >= b.lower.x() - tol && x.x() <= b.upper.x() + tol && x.y() >= b.lower.y() - tol &&
         x.y() <= b.upper.y() + tol;
}

}  // namespace

int locate_cell(const Mesh& mesh, const Vec2& x) {
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (!in_box(mesh, k, x, 1e-12)) continue;
    std::vector<Vec2> poly;
    for (int v : mesh.cell(k)) poly.push_back(mesh.vertex(v));
    if (point_in_polygon(x, poly)) return k;
  }
  // points on the boundary can miss the ray test; fall back to the nearest centroid
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (!in_box(mesh, k, x, 1e-9)) continue;
    const double d = (x - mesh.geometry(k).centroid).norm();
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  return best;
}

Eigen::VectorXd point_values(const Mesh& mesh, const AssembledOperators& ops,
                             const Eigen::VectorXd& u, const std::vector<Vec2>& points) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int k = locate_cell(mesh, points[i]);
    if (k < 0) {
      out[static_cast<Eigen::Index>(i)] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const Eigen::VectorXd v =
        evaluate(mesh.geometry(k), u.segment(ops.dofs.offset(k), ops.dofs.size(k)), {points[i]});
    out[static_cast<Eigen::Index>(i)] = v[0];
  }
  return out;
}

LineValues sample_line(const Mesh& mesh, const AssembledOperators& ops, const Eigen::VectorXd& u,
                       const LineSample& line) {
  LineValues out;
  const double len = (line.b - line.a).norm();
  for (int i = 0; i < line.points; ++i) {
    const double r = static_cast<double>(i) / (line.points - 1);
    out.s.push_back(r * len);
    out.x.push_back(line.a + r * (line.b - line.a));
  }
  const Eigen::VectorXd v = point_values(mesh, ops, u, out.x);
  out.u.assign(v.data(), v.data() + v.size());
  return out;
}

void write_line_csv(const std::filesystem::path& path, const LineValues& values) {
  CsvWriter csv(path, {"s", "x", "y", "v"});
  for (std::size_t i = 0; i < values.s.size(); ++i) {
    csv.row({values.s[i], values.x[i].x(), values.x[i].y(), values.u[i]});
  }
}

void write_snapshot(const std::filesystem::path& path, const Mesh& mesh,
                    const std::vector<int>& degrees, const Eigen::VectorXd& indicator,
                    const Eigen::VectorXd& u_mean) {
  const auto n = static_cast<std::size_t>(mesh.num_cells());
  if (degrees.size() != n || static_cast<std::size_t>(indicator.size()) != n ||
      static_cast<std::size_t>(u_mean.size()) != n) {
    throw std::invalid_argument("snapshot fields do not match the mesh");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# vtk DataFile Version 2.0\npadg snapshot\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices()) out << fmt9(v.x()) << ' ' << fmt9(v.y()) << " 0\n";
  std::size_t size = 0;
  for (int k = 0; k < mesh.num_cells(); ++k) size += mesh.cell(k).size() + 1;
  out << "POLYGONS " << n << ' ' << size << '\n';
  for (int k = 0; k < mesh.num_cells(); ++k) {
    out << mesh.cell(k).size();
    for (int v : mesh.cell(k)) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_DATA " << n << '\n';
  out << "SCALARS degree int 1\nLOOKUP_TABLE default\n";
  for (int p : degrees) out << p << '\n';
  out << "SCALARS indicator double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index k = 0; k < indicator.size(); ++k) out << fmt9(indicator[k]) << '\n';
  out << "SCALARS u_mean double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index k = 0; k < u_mean.size(); ++k) out << fmt9(u_mean[k]) << '\n';
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

std::vector<double> read_snapshot_array(const std::filesystem::path& path,
                                        const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  long count = -1;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "CELL_DATA") ls >> count;
    if (tag != "SCALARS") continue;
    std::string array;
    ls >> array;
    if (array != name) continue;
    std::getline(in, line);  // LOOKUP_TABLE
    std::vector<double> out;
    for (long i = 0; i < count; ++i) {
      double v;
      if (!(in >> v)) throw std::runtime_error("truncated array " + name);
      out.push_back(v);
    }
    return out;
  }
  throw std::runtime_error("array " + name + " not found in " + path.string());
}

}  // namespace padg
