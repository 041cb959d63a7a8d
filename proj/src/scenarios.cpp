#include "padg/scenarios.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace padg {

std::vector<std::string> scenario_names() {
  return {"test1a", "test1b", "test1c", "test2a", "test2b", "test3", "twomat"};
}

std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("PADG_SCENARIO_DIR")) return env;
#ifdef PADG_SCENARIO_DIR_DEFAULT
  return PADG_SCENARIO_DIR_DEFAULT;
#else
  return "scenarios";
#endif
}

std::filesystem::path scenario_path(const std::string& name, Scale scale) {
  const auto names = scenario_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  return scenario_dir() / (name + (scale == Scale::paper ? "_paper.cfg" : "_desk.cfg"));
}

RunConfig instantiate(const std::string& name, Scale scale,
                      const std::vector<std::string>& overrides) {
  return load_config(scenario_path(name, scale), overrides);
}

Scale parse_scale(const std::string& s) {
  if (s == "paper") return Scale::paper;
  if (s == "desk") return Scale::desk;
  throw std::invalid_argument("scale must be paper or desk, got '" + s + "'");
}

}  // namespace padg
