#include <doctest.h>

#include <fstream>
#include <sstream>

#include "padg/scenarios.hpp"

TEST_CASE("every catalog entry parses at both scales") {
  const auto names = padg::scenario_names();
  for (const char* required : {"test1a", "test1b", "test1c", "test2a", "test2b", "test3"}) {
    CHECK(std::find(names.begin(), names.end(), required) != names.end());
  }
  for (const auto& n : names) {
    for (padg::Scale s : {padg::Scale::paper, padg::Scale::desk}) {
      CAPTURE(n);
      const padg::RunConfig c = padg::instantiate(n, s);
      CHECK(std::filesystem::exists(c.mesh));
      // the file text parses to the same document
      std::ifstream in(padg::scenario_path(n, s));
      std::stringstream text;
      text << in.rdbuf();
      const padg::RunConfig again = padg::parse_config(text.str(), padg::scenario_path(n, s).parent_path());
      CHECK(again.entries == c.entries);
      CHECK(again.time.steps == c.time.steps);
      const padg::Mesh mesh = padg::load_mesh_file(c.mesh);
      CHECK_NOTHROW(c.materials.check_mesh(mesh));
    }
  }
}

TEST_CASE("unknown scenario") {
  CHECK_THROWS_AS(padg::instantiate("test9", padg::Scale::desk), std::invalid_argument);
  CHECK_THROWS(padg::parse_scale("huge"));
}

TEST_CASE("test1b paper scale") {
  const padg::RunConfig c = padg::instantiate("test1b", padg::Scale::paper);
  CHECK(padg::load_mesh_file(c.mesh).num_cells() == 1500);
  CHECK(c.p_max == 5);
  CHECK(c.adaptive);
  CHECK(c.adapt.period == 5);
  CHECK(c.materials.at(0)(0, 0) == 0.0081);
  CHECK(c.materials.at(0)(1, 1) == 0.0081);
  CHECK(c.materials.at(0)(0, 1) == 0.0);
}

TEST_CASE("test1b desk scale keeps the physics") {
  const padg::RunConfig p = padg::instantiate("test1b", padg::Scale::paper);
  const padg::RunConfig d = padg::instantiate("test1b", padg::Scale::desk);
  const int np = padg::load_mesh_file(p.mesh).num_cells(), nd = padg::load_mesh_file(d.mesh).num_cells();
  CHECK(nd * 4 <= np + 300);
  CHECK(d.materials.at(0) == p.materials.at(0));
  CHECK(d.wave.speed == p.wave.speed);
  CHECK(d.coeffs.chi == p.coeffs.chi);
}

TEST_CASE("test3 parameters") {
  const padg::RunConfig c = padg::instantiate("test3", padg::Scale::paper);
  CHECK(c.model == padg::ModelKind::barreto_cressman);
  CHECK(c.bc.k_bath == 8.0);
  CHECK(c.forcing.amplitude == 9.0);
  CHECK(c.source == padg::SourceKind::forcing);
  CHECK(c.materials.at(0)(0, 0) == 0.7734);
}

TEST_CASE("test2b conductivity jump") {
  const padg::RunConfig c = padg::instantiate("test2b", padg::Scale::paper);
  CHECK(c.materials.at(1)(0, 0) == 0.0081);
  CHECK(c.materials.at(2)(0, 0) == 0.0551);
  const padg::Mesh mesh = padg::load_mesh_file(c.mesh);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const double x = mesh.geometry(k).centroid.x();
    CHECK(mesh.material(k) == (x < 1.0 ? 1 : 2));
  }
}

TEST_CASE("overrides reach the instantiated config") {
  const padg::RunConfig c = padg::instantiate("test1c", padg::Scale::desk, {"adapt.marking=residual"});
  CHECK(c.adapt.marking == padg::MarkingIndicator::residual);
}
