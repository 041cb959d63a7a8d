#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "padg/adaptivity.hpp"
#include "padg/analysis.hpp"
#include "padg/ionic.hpp"

namespace padg {

/// Raised for invalid configuration documents; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key(key) {}
  std::string key;
};

enum class ModelKind { cubic, barreto_cressman };
enum class InitialKind { constant, wave, double_wave, region };
enum class SourceKind { none, manufactured, forcing };

struct RegionSpec {
  ForcingSpec::Region shape = ForcingSpec::Region::disk;
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
  std::vector<Vec2> polygon;

  bool contains(const Vec2& x) const;
};

struct LineSample {
  Vec2 a{0.0, 0.0};
  Vec2 b{0.0, 0.0};
  int points = 200;
};

struct RunConfig {
  std::filesystem::path mesh;
  MaterialField materials;

  ModelKind model = ModelKind::cubic;
  CubicReactionParams cubic;
  BarretoCressmanParams bc;
  IonicState bc_initial;
  double bc_current_scale = 0.01;
  ModelCoefficients coeffs;

  InitialKind initial = InitialKind::constant;
  // constant value; for `region` the value outside the region
  double initial_value = -85.0;
  double initial_inside = 0.0;
  RegionSpec initial_region;
  TravelingWaveSpec wave;
  DoubleWaveSpec double_wave;

  SourceKind source = SourceKind::none;
  // amplitude and support of A / (1 + e^{sin t})
  ForcingSpec forcing;
  // forcing given as a membrane current density (scaled by chi and the current scale)
  bool forcing_membrane = true;

  TimeGrid time;
  SourceTime source_time = SourceTime::end;

  int p_max = 5;
  double eta0 = 10.0;
  int p_init = -1;  // -1: p_max
  int quad_order = -1;

  bool adaptive = false;
  AdaptConfig adapt;

  std::filesystem::path output_dir;
  int snapshot_every = 0;
  std::optional<LineSample> line;
  int line_every = 0;
  // error norms against the exact wave every n steps (0: off)
  int errors_every = 0;
  std::vector<double> error_times;

  // expected metrics shipped with a scenario, informational only
  std::map<std::string, double> expect;
  // the document as parsed, key -> raw value
  std::map<std::string, std::string> entries;

  int initial_degree() const { return p_init > 0 ? p_init : p_max; }
  bool has_exact_solution() const {
    return source == SourceKind::manufactured && initial == InitialKind::wave;
  }
};

/// Parses a flat `key = value` document. Relative mesh paths are resolved
/// against `base_dir` first and then against the shipped data directory.
/// Throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Replaces or appends `key = value` entries given as "key=value" strings.
std::string override_entries(std::string_view text, const std::vector<std::string>& assignments);

/// Directory holding the shipped meshes.
std::filesystem::path data_dir();

}  // namespace padg
