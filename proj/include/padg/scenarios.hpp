#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "padg/config.hpp"

namespace padg {

enum class Scale { paper, desk };

/// Names in the shipped catalog.
std::vector<std::string> scenario_names();

/// Directory holding the scenario files (PADG_SCENARIO_DIR overrides).
std::filesystem::path scenario_dir();
std::filesystem::path scenario_path(const std::string& name, Scale scale);

/// Loads `<name>_<scale>.cfg`. Throws std::invalid_argument for unknown names.
RunConfig instantiate(const std::string& name, Scale scale,
                      const std::vector<std::string>& overrides = {});

Scale parse_scale(const std::string& s);

}  // namespace padg
