#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "padg/assembly.hpp"
#include "padg/config.hpp"

namespace padg {

/// Formats with 9 significant digits.
std::string fmt9(double v);

/// Minimal CSV writer; numbers use fmt9.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::filesystem::path path_;
  std::size_t columns_;
};

/// Cell averages (1/|K|) int_K u_h.
Eigen::VectorXd cell_means(const Discretization& disc, const AssembledOperators& ops,
                           const Eigen::VectorXd& u);

/// Index of a cell containing x, or -1.
int locate_cell(const Mesh& mesh, const Vec2& x);

/// u_h at arbitrary points; points outside the mesh give NaN.
Eigen::VectorXd point_values(const Mesh& mesh, const AssembledOperators& ops,
                             const Eigen::VectorXd& u, const std::vector<Vec2>& points);

struct LineValues {
  std::vector<double> s;
  std::vector<Vec2> x;
  std::vector<double> u;
};

/// Samples u_h at `line.points` equispaced points from a to b.
LineValues sample_line(const Mesh& mesh, const AssembledOperators& ops, const Eigen::VectorXd& u,
                       const LineSample& line);

/// Header `s,x,y,v`.
void write_line_csv(const std::filesystem::path& path, const LineValues& values);

/// VTK legacy 2.0 ASCII, POLYDATA with POLYGONS; CELL_DATA arrays `degree`,
/// `indicator` and `u_mean`. Throws std::runtime_error if the file cannot be written.
void write_snapshot(const std::filesystem::path& path, const Mesh& mesh,
                    const std::vector<int>& degrees, const Eigen::VectorXd& indicator,
                    const Eigen::VectorXd& u_mean);

/// Reads one named CELL_DATA array back from a file written by write_snapshot.
std::vector<double> read_snapshot_array(const std::filesystem::path& path, const std::string& name);

}  // namespace padg
