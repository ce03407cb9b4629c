#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gyro/hartree.hpp"
#include "gyro/metrics.hpp"
#include "gyro/potential.hpp"

namespace gyro {

enum class KRule { pauli_minimum, fixed };
enum class FieldSnapshots { all, endpoints, none };

struct LatticeConfig {
  KRule rule = KRule::pauli_minimum;
  int K = 0;  // used when rule == fixed
  double spacing = 2.6;
  Vec2 center{};
  // Optional check: every lattice point must lie within this distance of the centre.
  std::optional<double> disk_radius;
};

struct NumericsConfig {
  int n_max = 8;
  std::optional<int> m_ang;  // unset: sizing rule
  int grid = 256;
  double dt_fraction = 1.0;  // multiple of the stability caps
  std::size_t markers = 40000;
  int checkpoints = 4;  // output intervals on [0, T]
  std::size_t w1_max_support = 20000;
  double w1_tail_mass = 1e-8;  // mass per side the W1 solver may drop, lightest cells first
  bool w1_enabled = true;
};

struct OutputConfig {
  std::string dir = "out";
  FieldSnapshots fields = FieldSnapshots::endpoints;
  double husimi_floor = 1e-14;
  bool gamma_checkpoints = false;
};

struct SyntheticConfig {
  bool enabled = false;
  double prefactor = 3.0;
  double exponent = 2.0 / 7.0;
  double noise = 0.01;
};

struct ScenarioConfig {
  std::vector<double> b{4.0, 8.0, 16.0};
  double horizon = 1.0;
  PotentialSpec potential;
  LatticeConfig lattice;
  NumericsConfig numerics;
  std::optional<int> cutoff;  // unset: M(b) schedule
  std::vector<TestFunction> test_functions;
  OutputConfig output;
  std::uint64_t seed = 1;
  SyntheticConfig synthetic;

  void validate() const;
  int states_for(double b) const;
  int cutoff_for(double b) const;
};

// The standard bump scenario.
ScenarioConfig default_config();

// Missing keys take their defaults; unknown keys are rejected with ValidationError.
ScenarioConfig config_from_json(const nlohmann::json& j);
// Fully resolved form, every default materialized.
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::string& path);

}  // namespace gyro
