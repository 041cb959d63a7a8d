#include "padg/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace padg {

bool RegionSpec::contains(const Vec2& x) const {
  switch (shape) {
    case ForcingSpec::Region::everywhere:
      return true;
    case ForcingSpec::Region::disk:
      return (x - center).norm() <= radius;
    case ForcingSpec::Region::polygon:
      return point_in_polygon(x, polygon);
  }
  return false;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("PADG_DATA_DIR")) return env;
#ifdef PADG_DATA_DIR_DEFAULT
  return PADG_DATA_DIR_DEFAULT;
#else
  return "data";
#endif
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> numbers(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw ConfigError(key, "not a number: '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

double number(const std::string& key, const std::string& value) {
  const auto v = numbers(key, value);
  if (v.size() != 1) throw ConfigError(key, "expected one number");
  return v[0];
}

int integer(const std::string& key, const std::string& value) {
  const double v = number(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "expected an integer");
  return static_cast<int>(v);
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "off" || value == "no" || value == "0") return false;
  throw ConfigError(key, "expected true or false");
}

Vec2 point(const std::string& key, const std::string& value) {
  const auto v = numbers(key, value);
  if (v.size() != 2) throw ConfigError(key, "expected two numbers");
  return {v[0], v[1]};
}

std::vector<Vec2> polygon(const std::string& key, const std::string& value) {
  const auto v = numbers(key, value);
  if (v.size() < 6 || v.size() % 2) throw ConfigError(key, "expected at least three x y pairs");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < v.size(); i += 2) out.emplace_back(v[i], v[i + 1]);
  return out;
}

ForcingSpec::Region region_shape(const std::string& key, const std::string& value) {
  if (value == "everywhere") return ForcingSpec::Region::everywhere;
  if (value == "disk") return ForcingSpec::Region::disk;
  if (value == "polygon") return ForcingSpec::Region::polygon;
  throw ConfigError(key, "expected everywhere, disk or polygon");
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  return v;
}

struct PartialTensor {
  std::optional<double> iso, xx, xy, yy;
  std::optional<std::vector<double>> fiber;
};

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> s;
  auto num = [](double RunConfig::*field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) {
      c.*field = number(k, v);
    };
  };
  s["mesh"] = [](RunConfig& c, const std::string&, const std::string& v) { c.mesh = v; };
  s["model"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "cubic") {
      c.model = ModelKind::cubic;
    } else if (v == "barreto-cressman") {
      c.model = ModelKind::barreto_cressman;
    } else {
      throw ConfigError(k, "expected cubic or barreto-cressman");
    }
  };

  s["cubic.a"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.cubic.a = positive(k, number(k, v));
  };
  s["cubic.v_rest"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.cubic.v_rest = number(k, v);
  };
  s["cubic.v_thres"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.cubic.v_thres = number(k, v);
  };
  s["cubic.v_depol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.cubic.v_depol = number(k, v);
  };

  const std::vector<std::pair<std::string, double BarretoCressmanParams::*>> bc_fields = {
      {"g_nal", &BarretoCressmanParams::g_nal}, {"g_na", &BarretoCressmanParams::g_na},
      {"g_k", &BarretoCressmanParams::g_k},     {"g_ahp", &BarretoCressmanParams::g_ahp},
      {"g_kl", &BarretoCressmanParams::g_kl},   {"g_cll", &BarretoCressmanParams::g_cll},
      {"g_ca", &BarretoCressmanParams::g_ca},   {"g_glia", &BarretoCressmanParams::g_glia},
      {"k_bath", &BarretoCressmanParams::k_bath}, {"c_m", &BarretoCressmanParams::c_m},
      {"gamma", &BarretoCressmanParams::gamma}, {"beta", &BarretoCressmanParams::beta},
      {"tau", &BarretoCressmanParams::tau},     {"rho", &BarretoCressmanParams::rho},
      {"eps_diff", &BarretoCressmanParams::eps_diff}, {"e_ca", &BarretoCressmanParams::e_ca},
      {"phi", &BarretoCressmanParams::phi}};
  for (const auto& [name, field] : bc_fields) {
    s["bc." + name] = [field](RunConfig& c, const std::string& k, const std::string& v) {
      c.bc.*field = number(k, v);
    };
  }
  s["bc.signs"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "reference") {
      c.bc.signs = ConcentrationSigns::reference;
    } else if (v == "printed") {
      c.bc.signs = ConcentrationSigns::printed;
    } else {
      throw ConfigError(k, "expected reference or printed");
    }
  };
  s["bc.current_scale"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.bc_current_scale = positive(k, number(k, v));
  };
  s["bc.initial"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    const auto y = numbers(k, v);
    if (y.size() != 6) throw ConfigError(k, "expected six values");
    for (int i = 0; i < 6; ++i) c.bc_initial.y[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
  };

  s["coeff.chi"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.coeffs.chi = positive(k, number(k, v));
  };
  s["coeff.cm"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.coeffs.cm = positive(k, number(k, v));
  };

  s["initial.type"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "constant") {
      c.initial = InitialKind::constant;
    } else if (v == "wave") {
      c.initial = InitialKind::wave;
    } else if (v == "double_wave") {
      c.initial = InitialKind::double_wave;
    } else if (v == "region") {
      c.initial = InitialKind::region;
    } else {
      throw ConfigError(k, "expected constant, wave, double_wave or region");
    }
  };
  s["initial.value"] = num(&RunConfig::initial_value);
  s["initial.inside"] = num(&RunConfig::initial_inside);
  s["initial.region"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.initial_region.shape = region_shape(k, v);
  };
  s["initial.center"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.initial_region.center = point(k, v);
  };
  s["initial.radius"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.initial_region.radius = positive(k, number(k, v));
  };
  s["initial.polygon"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.initial_region.polygon = polygon(k, v);
  };

  s["wave.speed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.wave.speed = number(k, v);
  };
  s["wave.eps"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.wave.eps = positive(k, number(k, v));
  };
  s["wave.x0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.wave.x0 = number(k, v);
  };
  s["wave.direction"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    const Vec2 d = point(k, v);
    if (d.norm() == 0.0) throw ConfigError(k, "direction must be nonzero");
    c.wave.direction = d.normalized();
  };
  s["double.x_left"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.double_wave.x_left = number(k, v);
  };
  s["double.x_right"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.double_wave.x_right = number(k, v);
  };
  s["double.eps_left"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.double_wave.eps_left = positive(k, number(k, v));
  };
  s["double.eps_right"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.double_wave.eps_right = positive(k, number(k, v));
  };

  s["source.type"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "none") {
      c.source = SourceKind::none;
    } else if (v == "manufactured") {
      c.source = SourceKind::manufactured;
    } else if (v == "forcing") {
      c.source = SourceKind::forcing;
    } else {
      throw ConfigError(k, "expected none, manufactured or forcing");
    }
  };
  s["forcing.amplitude"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.forcing.amplitude = number(k, v);
  };
  s["forcing.region"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.forcing.region = region_shape(k, v);
  };
  s["forcing.center"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.forcing.center = point(k, v);
  };
  s["forcing.radius"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.forcing.radius = positive(k, number(k, v));
  };
  s["forcing.polygon"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.forcing.polygon = polygon(k, v);
  };
  s["forcing.membrane"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.forcing_membrane = boolean(k, v);
  };

  s["time.dt"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.time.dt = positive(k, number(k, v));
  };
  s["time.source_eval"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "end") {
      c.source_time = SourceTime::end;
    } else if (v == "midpoint") {
      c.source_time = SourceTime::midpoint;
    } else {
      throw ConfigError(k, "expected end or midpoint");
    }
  };
  // time.T is resolved against time.dt after all keys are read
  s["time.T"] = [](RunConfig&, const std::string& k, const std::string& v) {
    positive(k, number(k, v));
  };

  s["dg.p_max"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.p_max = integer(k, v);
    if (c.p_max < 1 || c.p_max > 12) throw ConfigError(k, "must be in [1, 12]");
  };
  s["dg.eta0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.eta0 = positive(k, number(k, v));
  };
  s["dg.p_init"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.p_init = integer(k, v);
    if (c.p_init < 1) throw ConfigError(k, "must be >= 1");
  };
  s["dg.quad_order"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.quad_order = integer(k, v);
    if (c.quad_order < 1) throw ConfigError(k, "must be >= 1");
  };

  s["adapt.enabled"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.adaptive = boolean(k, v);
  };
  s["adapt.period"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.adapt.period = integer(k, v);
    if (c.adapt.period < 1) throw ConfigError(k, "must be >= 1");
  };
  s["adapt.full_sweep_period"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.adapt.full_sweep_period = integer(k, v);
    if (c.adapt.full_sweep_period < 1) throw ConfigError(k, "must be >= 1");
  };
  s["adapt.threshold"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "min") {
      c.adapt.threshold_mode = ThresholdMode::min;
    } else if (v == "mean") {
      c.adapt.threshold_mode = ThresholdMode::mean;
    } else {
      throw ConfigError(k, "expected min or mean");
    }
  };
  s["adapt.marking"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "full") {
      c.adapt.marking = MarkingIndicator::full;
    } else if (v == "jump") {
      c.adapt.marking = MarkingIndicator::jump;
    } else if (v == "residual") {
      c.adapt.marking = MarkingIndicator::residual;
    } else {
      throw ConfigError(k, "expected full, jump or residual");
    }
  };
  s["adapt.cluster_on_initial"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.adapt.cluster_on_initial = boolean(k, v);
  };

  s["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v) {
    c.output_dir = v;
  };
  s["output.snapshot_every"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.snapshot_every = integer(k, v);
    if (c.snapshot_every < 0) throw ConfigError(k, "must be >= 0");
  };
  s["output.line"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    const auto x = numbers(k, v);
    if (x.size() != 4) throw ConfigError(k, "expected ax ay bx by");
    LineSample line = c.line.value_or(LineSample{});
    line.a = {x[0], x[1]};
    line.b = {x[2], x[3]};
    c.line = line;
  };
  s["output.line_points"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    LineSample line = c.line.value_or(LineSample{});
    line.points = integer(k, v);
    if (line.points < 2) throw ConfigError(k, "must be >= 2");
    c.line = line;
  };
  s["output.line_every"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.line_every = integer(k, v);
    if (c.line_every < 0) throw ConfigError(k, "must be >= 0");
  };
  s["output.errors_every"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.errors_every = integer(k, v);
    if (c.errors_every < 0) throw ConfigError(k, "must be >= 0");
  };
  s["output.error_times"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    c.error_times = numbers(k, v);
    for (double t : c.error_times) {
      if (t < 0.0) throw ConfigError(k, "times must be >= 0");
    }
  };
  return s;
}

// material.<label>[.xx|.xy|.yy|.fiber]
bool material_key(const std::string& key, int& label, std::string& part) {
  if (key.rfind("material.", 0) != 0) return false;
  const std::string rest = key.substr(9);
  const auto dot = rest.find('.');
  const std::string lab = rest.substr(0, dot);
  part = dot == std::string::npos ? "" : rest.substr(dot + 1);
  if (lab.empty() || lab.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key, "material label must be a non-negative integer");
  }
  if (part != "" && part != "xx" && part != "xy" && part != "yy" && part != "fiber") {
    throw ConfigError(key, "unknown key");
  }
  label = std::stoi(lab);
  return true;
}

std::filesystem::path resolve_mesh(const std::filesystem::path& mesh,
                                   const std::filesystem::path& base_dir) {
  namespace fs = std::filesystem;
  if (mesh.is_absolute()) return mesh;
  if (!base_dir.empty() && fs::exists(base_dir / mesh)) return base_dir / mesh;
  if (fs::exists(data_dir() / mesh)) return data_dir() / mesh;
  return mesh;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  static const std::map<std::string, Setter> table = setters();
  RunConfig c;
  std::map<int, PartialTensor> tensors;
  std::map<std::string, int> seen_line;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (value.empty()) throw ConfigError(key, "empty value");
    if (seen_line.count(key)) {
      throw ConfigError(key, "duplicate key (first on line " + std::to_string(seen_line[key]) + ")");
    }
    seen_line[key] = lineno;
    c.entries[key] = value;

    int label = 0;
    std::string part;
    if (material_key(key, label, part)) {
      PartialTensor& t = tensors[label];
      if (part.empty()) {
        t.iso = positive(key, number(key, value));
      } else if (part == "xx") {
        t.xx = number(key, value);
      } else if (part == "xy") {
        t.xy = number(key, value);
      } else if (part == "yy") {
        t.yy = number(key, value);
      } else {
        t.fiber = numbers(key, value);
        if (t.fiber->size() != 4) throw ConfigError(key, "expected sigma_l sigma_n nx ny");
      }
      continue;
    }
    if (key.rfind("expect.", 0) == 0 && key.size() > 7) {
      c.expect[key.substr(7)] = number(key, value);
      continue;
    }
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second(c, key, value);
  }

  for (const char* req : {"mesh", "model", "time.dt", "time.T"}) {
    if (!c.entries.count(req)) throw ConfigError(req, "missing required key");
  }
  if (tensors.empty()) throw ConfigError("material", "at least one material.<label> is required");

  for (const auto& [label, t] : tensors) {
    const std::string key = "material." + std::to_string(label);
    const int forms = (t.iso ? 1 : 0) + (t.fiber ? 1 : 0) + ((t.xx || t.xy || t.yy) ? 1 : 0);
    if (forms != 1) throw ConfigError(key, "give exactly one of: value, .xx/.xy/.yy, .fiber");
    Mat2 s;
    if (t.iso) {
      s = MaterialField::isotropic(*t.iso);
    } else if (t.fiber) {
      const auto& f = *t.fiber;
      const Vec2 n(f[2], f[3]);
      if (n.norm() == 0.0) throw ConfigError(key + ".fiber", "fiber direction must be nonzero");
      s = MaterialField::fiber(f[0], f[1], n.normalized());
    } else {
      if (!t.xx || !t.yy) throw ConfigError(key, "anisotropic tensor needs .xx and .yy");
      s << *t.xx, t.xy.value_or(0.0), t.xy.value_or(0.0), *t.yy;
    }
    try {
      c.materials.set(label, s);
    } catch (const std::exception& e) {
      throw ConfigError(key, e.what());
    }
  }

  const double T = number("time.T", c.entries["time.T"]);
  const double n = T / c.time.dt;
  c.time.steps = static_cast<int>(std::lround(n));
  if (c.time.steps < 1 || std::abs(c.time.steps * c.time.dt - T) > 1e-9 * T) {
    throw ConfigError("time.T", "must be an integer multiple of time.dt");
  }

  if (c.p_init > c.p_max) throw ConfigError("dg.p_init", "must not exceed dg.p_max");
  c.adapt.p_max = c.p_max;

  try {
    c.cubic.validate();
  } catch (const std::exception& e) {
    throw ConfigError("cubic", e.what());
  }
  try {
    c.bc.validate();
  } catch (const std::exception& e) {
    throw ConfigError("bc", e.what());
  }

  c.wave.v_rest = c.double_wave.v_rest = c.cubic.v_rest;
  c.wave.v_depol = c.double_wave.v_depol = c.cubic.v_depol;

  if (c.initial == InitialKind::region) {
    if (!c.entries.count("initial.inside")) throw ConfigError("initial.inside", "missing for region");
    if (c.initial_region.shape == ForcingSpec::Region::disk && c.initial_region.radius <= 0.0) {
      throw ConfigError("initial.radius", "missing for a disk region");
    }
    if (c.initial_region.shape == ForcingSpec::Region::polygon && c.initial_region.polygon.empty()) {
      throw ConfigError("initial.polygon", "missing for a polygon region");
    }
  }
  if (c.source == SourceKind::manufactured) {
    if (c.model != ModelKind::cubic) throw ConfigError("source.type", "manufactured needs model = cubic");
    if (c.materials.tensors().size() != 1) {
      throw ConfigError("source.type", "manufactured needs a single material");
    }
  }
  if (c.source == SourceKind::forcing) {
    if (c.forcing.region == ForcingSpec::Region::disk && c.forcing.radius <= 0.0) {
      throw ConfigError("forcing.radius", "missing for a disk region");
    }
    if (c.forcing.region == ForcingSpec::Region::polygon && c.forcing.polygon.empty()) {
      throw ConfigError("forcing.polygon", "missing for a polygon region");
    }
  }
  if ((c.errors_every > 0 || !c.error_times.empty()) && !c.has_exact_solution()) {
    throw ConfigError(c.errors_every > 0 ? "output.errors_every" : "output.error_times",
                      "errors need initial.type = wave with source.type = manufactured");
  }
  for (double t : c.error_times) {
    if (t > c.time.final_time() * (1.0 + 1e-12)) {
      throw ConfigError("output.error_times", "time beyond time.T");
    }
  }
  if (c.line_every > 0 && !c.line) throw ConfigError("output.line_every", "needs output.line");

  c.mesh = resolve_mesh(c.mesh, base_dir);
  if (!std::filesystem::exists(c.mesh)) {
    throw ConfigError("mesh", "file not found: " + c.mesh.string());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = overrides.empty() ? ss.str() : override_entries(ss.str(), overrides);
  return parse_config(text, path.parent_path());
}

std::string override_entries(std::string_view text, const std::vector<std::string>& assignments) {
  std::map<std::string, std::string> replace;
  std::vector<std::string> order;
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError(a, "override must look like key=value");
    const std::string key = trim(a.substr(0, eq));
    if (!replace.count(key)) order.push_back(key);
    replace[key] = trim(a.substr(eq + 1));
  }
  std::istringstream in{std::string(text)};
  std::ostringstream out;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    const auto eq = line.find('=');
    if (eq != std::string::npos && replace.count(trim(line.substr(0, eq)))) continue;
    out << raw << '\n';
  }
  for (const std::string& key : order) out << key << " = " << replace[key] << '\n';
  return out.str();
}

}  // namespace padg
