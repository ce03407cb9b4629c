#include "gyro/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <initializer_list>

#include "gyro/errors.hpp"
#include "gyro/husimi.hpp"

namespace gyro {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(fmt::format("'{}' must be an object", where));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(fmt::format("unknown key '{}' in '{}'", key, where));
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(fmt::format("'{}.{}' has the wrong type", where, key));
  }
}

Vec2 get_vec(const json& j, const char* key, Vec2 fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto v = get_or<std::vector<double>>(j, key, {}, where);
  if (v.size() != 2) throw ValidationError(fmt::format("'{}.{}' must be a pair of numbers", where, key));
  return {v[0], v[1]};
}

json vec_json(Vec2 v) { return json::array({v.x1, v.x2}); }

GaussianBump bump_from_json(const json& j) {
  reject_unknown(j, "potential.V[]", {"amplitude", "center", "width"});
  GaussianBump g;
  g.amplitude = get_or(j, "amplitude", 0.0, "potential.V[]");
  g.center = get_vec(j, "center", {}, "potential.V[]");
  g.width = get_or(j, "width", 1.0, "potential.V[]");
  return g;
}

TestFunction test_function_from_json(const json& j) {
  reject_unknown(j, "test_functions[]", {"amplitude", "center", "width", "tilt"});
  TestFunction f;
  f.amplitude = get_or(j, "amplitude", 1.0, "test_functions[]");
  f.center = get_vec(j, "center", {}, "test_functions[]");
  f.width = get_or(j, "width", 1.0, "test_functions[]");
  f.tilt = get_vec(j, "tilt", {}, "test_functions[]");
  return f;
}

const char* field_name(FieldSnapshots f) {
  switch (f) {
    case FieldSnapshots::all:
      return "all";
    case FieldSnapshots::endpoints:
      return "endpoints";
    default:
      return "none";
  }
}

}  // namespace

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.potential.V = {{1.0, {0.0, 0.0}, 0.5}, {-0.4, {0.3, -0.2}, 0.35}};
  c.potential.w = {0.5, 0.3};
  c.test_functions = {{1.0, {0.3, 0.1}, 0.3, {0.0, 0.0}}, {1.0, {-0.1, 0.25}, 0.35, {1.0, -0.5}}};
  return c;
}

int ScenarioConfig::states_for(double b) const {
  const int minimum = pauli_minimum_states(make_scaling(b));
  return lattice.rule == KRule::pauli_minimum ? minimum : lattice.K;
}

int ScenarioConfig::cutoff_for(double b) const {
  return cutoff ? *cutoff : cutoff_schedule(make_scaling(b), numerics.n_max);
}

void ScenarioConfig::validate() const {
  if (b.empty()) throw ValidationError("config: b list is empty");
  for (double v : b) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("config: every b must be positive");
    const int K = states_for(v);
    if (K < pauli_minimum_states(make_scaling(v))) {
      throw ValidationError(fmt::format("config: K = {} violates the Pauli feasibility K >= 1/(2 pi l_b^2) at b = {}", K, v));
    }
    if (lattice.disk_radius) {
      const ScalingParams s = make_scaling(v);
      LatticeSpec layout;
      layout.spacing = lattice.spacing;
      layout.center = lattice.center;
      for (Vec2 p : lattice_points(K, layout, s)) {
        if (norm(p - lattice.center) > *lattice.disk_radius) {
          throw ValidationError(fmt::format("config: the K = {} lattice at b = {} does not fit in the disk", K, v));
        }
      }
    }
  }
  if (!(horizon > 0.0)) throw ValidationError("config: horizon must be positive");
  potential.validate();
  if (lattice.rule == KRule::fixed && lattice.K < 1) throw ValidationError("config: fixed K must be positive");
  if (!(lattice.spacing > 0.0)) throw ValidationError("config: lattice spacing must be positive");
  if (numerics.n_max < 8) throw ValidationError("config: N_max must be at least 8");
  if (numerics.m_ang && *numerics.m_ang < 1) throw ValidationError("config: M_ang must be positive");
  if (numerics.grid < 256 || (numerics.grid & (numerics.grid - 1)) != 0) {
    throw ValidationError("config: grid must be a power of two >= 256");
  }
  if (!(numerics.dt_fraction > 0.0) || numerics.dt_fraction > 1.0) {
    throw ValidationError("config: dt_fraction must lie in (0, 1]");
  }
  if (numerics.markers < 1) throw ValidationError("config: marker count must be positive");
  if (numerics.checkpoints < 1) throw ValidationError("config: need at least one checkpoint interval");
  if (numerics.w1_max_support < 16) throw ValidationError("config: w1_max_support too small");
  if (!(numerics.w1_tail_mass >= 0.0) || numerics.w1_tail_mass > 1e-3) {
    throw ValidationError("config: w1_tail_mass must lie in [0, 1e-3]");
  }
  if (cutoff && (*cutoff < 1 || *cutoff > numerics.n_max - 1)) {
    throw ValidationError("config: cut-off M must lie in [1, N_max - 1]");
  }
  if (test_functions.empty()) throw ValidationError("config: need at least one test function");
  for (const TestFunction& f : test_functions) f.validate();
  if (output.dir.empty()) throw ValidationError("config: output directory is empty");
  if (!(output.husimi_floor >= 0.0)) throw ValidationError("config: husimi_floor must be nonnegative");
  if (synthetic.enabled && (!(synthetic.prefactor > 0.0) || !(synthetic.noise >= 0.0) || synthetic.noise >= 1.0)) {
    throw ValidationError("config: synthetic prefactor must be positive and noise in [0, 1)");
  }
}

ScenarioConfig config_from_json(const json& j) {
  reject_unknown(j, "config", {"b", "horizon", "potential", "lattice", "numerics", "cutoff", "test_functions",
                               "output", "seed", "synthetic"});
  ScenarioConfig c = default_config();
  c.b = get_or(j, "b", c.b, "config");
  c.horizon = get_or(j, "horizon", c.horizon, "config");
  c.seed = get_or(j, "seed", c.seed, "config");
  if (j.contains("cutoff")) {
    const json& m = j.at("cutoff");
    if (m.is_string()) {
      if (m.get<std::string>() != "schedule") throw ValidationError("config: cutoff must be \"schedule\" or an integer");
      c.cutoff.reset();
    } else {
      c.cutoff = get_or<int>(j, "cutoff", 0, "config");
    }
  }
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    reject_unknown(p, "potential", {"V", "w"});
    if (p.contains("V")) {
      if (!p.at("V").is_array()) throw ValidationError("'potential.V' must be an array");
      c.potential.V.clear();
      for (const json& bump : p.at("V")) c.potential.V.push_back(bump_from_json(bump));
    }
    if (p.contains("w")) {
      const json& w = p.at("w");
      reject_unknown(w, "potential.w", {"amplitude", "width"});
      c.potential.w.amplitude = get_or(w, "amplitude", c.potential.w.amplitude, "potential.w");
      c.potential.w.width = get_or(w, "width", c.potential.w.width, "potential.w");
    }
  }
  if (j.contains("lattice")) {
    const json& l = j.at("lattice");
    reject_unknown(l, "lattice", {"K_rule", "K", "spacing", "center", "disk_radius"});
    const std::string rule = get_or<std::string>(l, "K_rule", "pauli_minimum", "lattice");
    if (rule == "pauli_minimum") {
      c.lattice.rule = KRule::pauli_minimum;
    } else if (rule == "fixed") {
      c.lattice.rule = KRule::fixed;
    } else {
      throw ValidationError("lattice.K_rule must be \"pauli_minimum\" or \"fixed\"");
    }
    c.lattice.K = get_or(l, "K", 0, "lattice");
    c.lattice.spacing = get_or(l, "spacing", c.lattice.spacing, "lattice");
    c.lattice.center = get_vec(l, "center", c.lattice.center, "lattice");
    if (l.contains("disk_radius") && !l.at("disk_radius").is_null()) {
      c.lattice.disk_radius = get_or(l, "disk_radius", 0.0, "lattice");
    }
  }
  if (j.contains("numerics")) {
    const json& n = j.at("numerics");
    reject_unknown(n, "numerics", {"N_max", "M_ang", "grid", "dt_fraction", "markers", "checkpoints", "w1_max_support",
                                      "w1_tail_mass", "w1_enabled"});
    c.numerics.n_max = get_or(n, "N_max", c.numerics.n_max, "numerics");
    if (n.contains("M_ang")) {
      const json& m = n.at("M_ang");
      if (m.is_string()) {
        if (m.get<std::string>() != "sizing") throw ValidationError("numerics.M_ang must be \"sizing\" or an integer");
      } else {
        c.numerics.m_ang = get_or<int>(n, "M_ang", 0, "numerics");
      }
    }
    c.numerics.grid = get_or(n, "grid", c.numerics.grid, "numerics");
    c.numerics.dt_fraction = get_or(n, "dt_fraction", c.numerics.dt_fraction, "numerics");
    c.numerics.markers = get_or(n, "markers", c.numerics.markers, "numerics");
    c.numerics.checkpoints = get_or(n, "checkpoints", c.numerics.checkpoints, "numerics");
    c.numerics.w1_max_support = get_or(n, "w1_max_support", c.numerics.w1_max_support, "numerics");
    c.numerics.w1_tail_mass = get_or(n, "w1_tail_mass", c.numerics.w1_tail_mass, "numerics");
    c.numerics.w1_enabled = get_or(n, "w1_enabled", c.numerics.w1_enabled, "numerics");
  }
  if (j.contains("test_functions")) {
    if (!j.at("test_functions").is_array()) throw ValidationError("'test_functions' must be an array");
    c.test_functions.clear();
    for (const json& f : j.at("test_functions")) c.test_functions.push_back(test_function_from_json(f));
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"dir", "fields", "husimi_floor", "gamma_checkpoints"});
    c.output.dir = get_or(o, "dir", c.output.dir, "output");
    const std::string fields = get_or<std::string>(o, "fields", "endpoints", "output");
    if (fields == "all") {
      c.output.fields = FieldSnapshots::all;
    } else if (fields == "endpoints") {
      c.output.fields = FieldSnapshots::endpoints;
    } else if (fields == "none") {
      c.output.fields = FieldSnapshots::none;
    } else {
      throw ValidationError("output.fields must be \"all\", \"endpoints\" or \"none\"");
    }
    c.output.husimi_floor = get_or(o, "husimi_floor", c.output.husimi_floor, "output");
    c.output.gamma_checkpoints = get_or(o, "gamma_checkpoints", c.output.gamma_checkpoints, "output");
  }
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    reject_unknown(s, "synthetic", {"enabled", "prefactor", "exponent", "noise"});
    c.synthetic.enabled = get_or(s, "enabled", c.synthetic.enabled, "synthetic");
    c.synthetic.prefactor = get_or(s, "prefactor", c.synthetic.prefactor, "synthetic");
    c.synthetic.exponent = get_or(s, "exponent", c.synthetic.exponent, "synthetic");
    c.synthetic.noise = get_or(s, "noise", c.synthetic.noise, "synthetic");
  }
  c.validate();
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json V = json::array();
  for (const GaussianBump& g : c.potential.V) {
    V.push_back({{"amplitude", g.amplitude}, {"center", vec_json(g.center)}, {"width", g.width}});
  }
  json tf = json::array();
  for (const TestFunction& f : c.test_functions) {
    tf.push_back({{"amplitude", f.amplitude}, {"center", vec_json(f.center)}, {"width", f.width}, {"tilt", vec_json(f.tilt)}});
  }
  json lattice = {{"K_rule", c.lattice.rule == KRule::fixed ? "fixed" : "pauli_minimum"},
                  {"K", c.lattice.K},
                  {"spacing", c.lattice.spacing},
                  {"center", vec_json(c.lattice.center)},
                  {"disk_radius", c.lattice.disk_radius ? json(*c.lattice.disk_radius) : json(nullptr)}};
  json numerics = {{"N_max", c.numerics.n_max},
                   {"M_ang", c.numerics.m_ang ? json(*c.numerics.m_ang) : json("sizing")},
                   {"grid", c.numerics.grid},
                   {"dt_fraction", c.numerics.dt_fraction},
                   {"markers", c.numerics.markers},
                   {"checkpoints", c.numerics.checkpoints},
                   {"w1_max_support", c.numerics.w1_max_support},
                   {"w1_tail_mass", c.numerics.w1_tail_mass},
                   {"w1_enabled", c.numerics.w1_enabled}};
  return {{"b", c.b},
          {"horizon", c.horizon},
          {"potential", {{"V", V}, {"w", {{"amplitude", c.potential.w.amplitude}, {"width", c.potential.w.width}}}}},
          {"lattice", lattice},
          {"numerics", numerics},
          {"cutoff", c.cutoff ? json(*c.cutoff) : json("schedule")},
          {"test_functions", tf},
          {"output",
           {{"dir", c.output.dir},
            {"fields", field_name(c.output.fields)},
            {"husimi_floor", c.output.husimi_floor},
            {"gamma_checkpoints", c.output.gamma_checkpoints}}},
          {"seed", c.seed},
          {"synthetic",
           {{"enabled", c.synthetic.enabled},
            {"prefactor", c.synthetic.prefactor},
            {"exponent", c.synthetic.exponent},
            {"noise", c.synthetic.noise}}}};
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("config {} is not valid JSON: {}", path, e.what()));
  }
  return config_from_json(j);
}

}  // namespace gyro
