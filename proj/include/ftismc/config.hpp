#pragma once

// INI-style scenario configuration. Sections: [robot], [admittance], [force],
// [controller], [simulation]. Every key maps onto one SimConfig field; unknown
// keys, sections and unparsable values are errors.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ftismc/simulation.hpp"

namespace ftismc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace config_detail {

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

inline double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  // Accept simple fractions such as 5/7 so exponents can be written exactly.
  if (const auto slash = v.find('/'); slash != std::string::npos) {
    const double num = parse_double(key, v.substr(0, slash));
    const double den = parse_double(key, v.substr(slash + 1));
    if (den == 0.0) throw ConfigError(key + ": zero denominator in '" + v + "'");
    return num / den;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (v.empty() || ec != std::errc() || ptr != last)
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  return out;
}

inline std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(raw);
  while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
  return parts;
}

/// "a, b" or a single value broadcast to both axes.
inline Vec2 parse_vec2(const std::string& key, const std::string& raw, bool allow_scalar) {
  const auto parts = split_list(raw);
  if (parts.size() == 1 && allow_scalar) {
    const double v = parse_double(key, parts[0]);
    return {v, v};
  }
  if (parts.size() != 2) throw ConfigError(key + ": expected two comma-separated values");
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

inline int parse_int(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + raw + "'");
  return out;
}

// Shortest text that round-trips to the same double.
inline std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string fmt(const Vec2& v) { return fmt(v[0]) + ", " + fmt(v[1]); }

inline std::string fmt(bool b) { return b ? "true" : "false"; }

}  // namespace config_detail

inline std::string_view to_string(PlantKind p) {
  return p == PlantKind::manipulator ? "manipulator" : "task_space";
}

inline std::string_view to_string(SurfaceKind s) {
  switch (s) {
    case SurfaceKind::none: return "none";
    case SurfaceKind::linear: return "linear";
    case SurfaceKind::fixed_time: return "fixed_time";
    case SurfaceKind::nonsingular: return "nonsingular";
  }
  return "?";
}

/// Accessors for every configurable field, keyed "section.key".
class ConfigSchema {
 public:
  struct Entry {
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
  };

  static const ConfigSchema& instance() {
    static const ConfigSchema s;
    return s;
  }

  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

  /// Resolves "section.key" or a bare key that is unique across sections.
  std::string resolve(const std::string& key) const {
    if (entries_.count(key)) return key;
    if (key.find('.') != std::string::npos) throw ConfigError("unknown config key '" + key + "'");
    std::vector<std::string> hits;
    for (const auto& [full, _] : entries_)
      if (full.substr(full.find('.') + 1) == key) hits.push_back(full);
    if (hits.empty()) throw ConfigError("unknown config key '" + key + "'");
    if (hits.size() > 1) {
      std::string msg = "ambiguous config key '" + key + "':";
      for (const auto& h : hits) msg += " " + h;
      throw ConfigError(msg);
    }
    return hits.front();
  }

  void set(SimConfig& cfg, const std::string& key, const std::string& value) const {
    const std::string full = resolve(key);
    entries_.at(full).set(cfg, value);
  }

  std::map<std::string, std::string> dump(const SimConfig& cfg) const {
    std::map<std::string, std::string> out;
    for (const auto& [k, e] : entries_) out[k] = e.get(cfg);
    return out;
  }

 private:
  ConfigSchema() {
    using namespace config_detail;
    auto num = [this](const std::string& key, auto field) {
      entries_[key] = {[key, field](SimConfig& c, const std::string& v) { field(c) = parse_double(key, v); },
                       [field](const SimConfig& c) { return fmt(field(c)); }};
    };
    auto vec = [this](const std::string& key, auto field, bool allow_scalar) {
      entries_[key] = {[key, field, allow_scalar](SimConfig& c, const std::string& v) {
                         field(c) = parse_vec2(key, v, allow_scalar);
                       },
                       [field](const SimConfig& c) { return fmt(field(c)); }};
    };
    auto flag = [this](const std::string& key, auto field) {
      entries_[key] = {[key, field](SimConfig& c, const std::string& v) { field(c) = parse_bool(key, v); },
                       [field](const SimConfig& c) { return fmt(field(c)); }};
    };

    num("robot.m1", [](auto& c) -> auto& { return c.robot.m1; });
    num("robot.m2", [](auto& c) -> auto& { return c.robot.m2; });
    num("robot.l1", [](auto& c) -> auto& { return c.robot.l1; });
    num("robot.l2", [](auto& c) -> auto& { return c.robot.l2; });
    num("robot.g", [](auto& c) -> auto& { return c.robot.g; });
    flag("robot.gravity", [](auto& c) -> auto& { return c.gravity; });
    flag("robot.disturbance", [](auto& c) -> auto& { return c.disturbance; });

    vec("admittance.km", [](auto& c) -> auto& { return c.admittance.km; }, true);
    vec("admittance.kb", [](auto& c) -> auto& { return c.admittance.kb; }, true);
    vec("admittance.kk", [](auto& c) -> auto& { return c.admittance.kk; }, true);

    vec("force.amplitude", [](auto& c) -> auto& { return c.force.amplitude; }, true);
    num("force.t_on", [](auto& c) -> auto& { return c.force.t_on; });
    num("force.t_full", [](auto& c) -> auto& { return c.force.t_full; });
    num("force.t_rampdown", [](auto& c) -> auto& { return c.force.t_rampdown; });
    num("force.t_off", [](auto& c) -> auto& { return c.force.t_off; });
    flag("force.enabled", [](auto& c) -> auto& { return c.force_enabled; });
    flag("force.on_robot", [](auto& c) -> auto& { return c.force_on_robot; });

    num("controller.pid_kp", [](auto& c) -> auto& { return c.controller.pid.kp; });
    num("controller.pid_kd", [](auto& c) -> auto& { return c.controller.pid.kd; });
    num("controller.pid_ki", [](auto& c) -> auto& { return c.controller.pid.ki; });
    num("controller.pid_integral_clamp",
        [](auto& c) -> auto& { return c.controller.pid.integral_clamp; });
    num("controller.ctc_kp", [](auto& c) -> auto& { return c.controller.ctc.kp; });
    num("controller.ctc_kd", [](auto& c) -> auto& { return c.controller.ctc.kd; });
    num("controller.bsp_lambda1", [](auto& c) -> auto& { return c.controller.bsp.lambda1; });
    num("controller.bsp_lambda2", [](auto& c) -> auto& { return c.controller.bsp.lambda2; });
    num("controller.bsp_lambda3", [](auto& c) -> auto& { return c.controller.bsp.lambda3; });
    num("controller.bsp_alpha", [](auto& c) -> auto& { return c.controller.bsp.alpha; });
    num("controller.bsp_beta", [](auto& c) -> auto& { return c.controller.bsp.beta; });
    num("controller.k1", [](auto& c) -> auto& { return c.controller.ft.k1; });
    num("controller.k2", [](auto& c) -> auto& { return c.controller.ft.k2; });
    num("controller.alpha", [](auto& c) -> auto& { return c.controller.ft.alpha; });
    num("controller.beta", [](auto& c) -> auto& { return c.controller.ft.beta; });
    num("controller.k5", [](auto& c) -> auto& { return c.controller.ns.k5; });
    num("controller.k6", [](auto& c) -> auto& { return c.controller.ns.k6; });
    num("controller.m", [](auto& c) -> auto& { return c.controller.ns.m; });
    num("controller.n", [](auto& c) -> auto& { return c.controller.ns.n; });
    num("controller.rho", [](auto& c) -> auto& { return c.controller.comp.rho; });
    num("controller.epsilon", [](auto& c) -> auto& { return c.controller.comp.epsilon; });
    num("controller.k3", [](auto& c) -> auto& { return c.controller.comp.k3; });
    num("controller.k4", [](auto& c) -> auto& { return c.controller.comp.k4; });
    num("controller.p", [](auto& c) -> auto& { return c.controller.comp.p_exp; });
    num("controller.q", [](auto& c) -> auto& { return c.controller.comp.q_exp; });
    num("controller.boundary_layer",
        [](auto& c) -> auto& { return c.controller.comp.boundary_layer; });
    num("controller.c", [](auto& c) -> auto& { return c.controller.linear.c; });
    num("controller.error_floor", [](auto& c) -> auto& { return c.controller.error_floor; });
    entries_["controller.surface"] = {
        [](SimConfig& c, const std::string& v) {
          const std::string s = trim(v);
          if (s == "nonsingular") {
            c.controller.ftismc_surface = SurfaceKind::nonsingular;
          } else if (s == "fixed_time") {
            c.controller.ftismc_surface = SurfaceKind::fixed_time;
          } else {
            throw ConfigError("controller.surface: expected nonsingular or fixed_time, got '" + v + "'");
          }
        },
        [](const SimConfig& c) { return std::string(to_string(c.controller.ftismc_surface)); }};

    entries_["simulation.controller"] = {
        [](SimConfig& c, const std::string& v) {
          const auto kind = parse_controller_kind(trim(v));
          if (!kind) throw ConfigError("simulation.controller: unknown controller '" + trim(v) + "'");
          c.controller.kind = *kind;
        },
        [](const SimConfig& c) { return std::string(to_string(c.controller.kind)); }};
    num("simulation.dt", [](auto& c) -> auto& { return c.dt; });
    num("simulation.duration", [](auto& c) -> auto& { return c.duration; });
    entries_["simulation.decimation"] = {
        [](SimConfig& c, const std::string& v) { c.decimation = parse_int("simulation.decimation", v); },
        [](const SimConfig& c) { return std::to_string(c.decimation); }};
    flag("simulation.zoh", [](auto& c) -> auto& { return c.zoh; });
    vec("simulation.q0", [](auto& c) -> auto& { return c.q0; }, false);
    vec("simulation.qd0", [](auto& c) -> auto& { return c.qd0; }, false);
    entries_["simulation.plant"] = {
        [](SimConfig& c, const std::string& v) {
          const std::string s = trim(v);
          if (s == "manipulator") {
            c.plant = PlantKind::manipulator;
          } else if (s == "task_space") {
            c.plant = PlantKind::task_space;
          } else {
            throw ConfigError("simulation.plant: expected manipulator or task_space, got '" + v + "'");
          }
        },
        [](const SimConfig& c) { return std::string(to_string(c.plant)); }};
    vec("simulation.x0_offset", [](auto& c) -> auto& { return c.x0_offset; }, false);
    num("simulation.singularity_threshold",
        [](auto& c) -> auto& { return c.singularity_threshold; });
    num("simulation.transient", [](auto& c) -> auto& { return c.transient; });
    num("simulation.settle_threshold", [](auto& c) -> auto& { return c.settle_threshold; });
    entries_["simulation.output"] = {[](SimConfig& c, const std::string& v) { c.output = trim(v); },
                                     [](const SimConfig& c) { return c.output; }};
    entries_["simulation.seed"] = {
        [](SimConfig& c, const std::string& v) { c.seed = parse_u64("simulation.seed", v); },
        [](const SimConfig& c) { return std::to_string(c.seed); }};
  }

  std::map<std::string, Entry> entries_;
};

/// Applies every key of an INI stream on top of `cfg`.
inline void apply_ini(SimConfig& cfg, std::istream& in, const std::string& source = "<config>") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  const auto& schema = ConfigSchema::instance();
  for (const auto& [section, body] : tree) {
    if (body.empty())
      throw ConfigError(source + ": key '" + section + "' must appear inside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!schema.entries().count(full)) throw ConfigError(source + ": unknown key '" + full + "'");
      schema.entries().at(full).set(cfg, value.data());
    }
  }
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  SimConfig cfg;
  apply_ini(cfg, in, path);
  return cfg;
}

/// Applies "key=value" overrides; keys may be bare when unique.
inline void apply_overrides(SimConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override '" + kv + "' must have the form key=value");
    ConfigSchema::instance().set(cfg, config_detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
}

/// Serializes the full effective configuration back to INI text.
inline std::string to_ini(const SimConfig& cfg) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [full, value] : ConfigSchema::instance().dump(cfg)) {
    const auto dot = full.find('.');
    sections[full.substr(0, dot)].emplace_back(full.substr(dot + 1), value);
  }
  std::ostringstream out;
  for (const auto& [name, kvs] : sections) {
    out << "[" << name << "]\n";
    for (const auto& [k, v] : kvs) out << k << " = " << v << "\n";
    out << "\n";
  }
  return out.str();
}

}  // namespace ftismc
