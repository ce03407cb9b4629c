#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gyro/config.hpp"
#include "gyro/grid.hpp"
#include "gyro/hartree.hpp"

namespace gyro {

// Resolved numerical setup of one run.
struct RunPlan {
  double b = 0.0;
  ScalingParams scaling;
  int K = 0;
  int n_max = 0;
  int m_ang = 0;
  int cutoff = 0;
  std::vector<int> inequality_cutoffs;  // M values checked against the semiclassical bound
  double lattice_radius = 0.0;
  double drift_excursion = 0.0;  // farthest point reached by the provisional drift run
  double system_radius = 0.0;
  GridSpec box;
  double hartree_dt = 0.0;
  int hartree_steps = 0;
  double drift_dt = 0.0;
  int drift_steps = 0;
  std::vector<double> checkpoint_times;

  nlohmann::json to_json() const;
};

RunPlan plan_run(const ScenarioConfig& cfg, double b);

struct InequalityRecord {
  int cutoff = 0;
  int test_function = 0;
  double lhs = 0.0;  // |int phi (rho_gamma - rho_sc)|
  double rhs = 0.0;
  double captured = 0.0;  // Tr gamma Pi_{<=M}
  double captured_floor = 0.0;  // 1 - Tr(gamma L_b) / M
};

struct CheckpointRecord {
  double t = 0.0;
  Observables obs;
  double trace_defect = 0.0;
  double pauli_cap = 0.0;
  double energy_drift = 0.0;  // |E(t) - E(0)|
  double mean_field_trace = 0.0;  // Tr gamma H_b
  double kinetic_limit = 0.0;  // |Tr gamma H_b| + |V|_inf + |w|_inf
  double captured = 0.0;
  double drift_mass = 0.0;
  double w1_quantum = 0.0;  // W1(rho_gamma, rho)
  double w1_semiclassical = 0.0;  // W1(rho_b, rho)
  int w1_quantum_levels = 0;
  int w1_semiclassical_levels = 0;
  std::vector<double> residual_quantum;  // drift weak residual of rho_gamma, per test function
  std::vector<double> residual_drift;  // same for the drift solution
  double dobrushin_rhs = 0.0;  // bound with the initial W1 and no consistency term
  std::vector<InequalityRecord> inequality;

  bool kinetic_ok() const { return obs.kinetic_moment_1 <= kinetic_limit; }
  double residual_quantum_max() const;
  double residual_drift_max() const;
};

struct RunReport {
  ScenarioConfig config;
  RunPlan plan;
  std::vector<CheckpointRecord> checkpoints;
  double max_energy_step = 0.0;  // largest per-step energy change
  double max_energy_drift = 0.0;  // largest |E(t) - E(0)| over all steps
  double max_trace_defect = 0.0;
  double max_pauli_excess = 0.0;
  bool complete = false;
  std::string error;
  std::string error_kind;  // "validation" or "numerical"
  double wallclock = 0.0;

  nlohmann::json to_json() const;
};

// Full quantum / semiclassical / drift pipeline at one b. Files are written under out_dir
// unless it is empty. Failures are recorded in the report rather than thrown.
RunReport run_scenario(const ScenarioConfig& cfg, double b, const std::string& out_dir = {});

void write_metrics_csv(const RunReport& r, const std::string& path);

struct SweepEntry {
  double b = 0.0;
  double l_b = 0.0;
  bool complete = false;
  std::string error;
  double residual = 0.0;  // max over test functions of the drift residual of rho_gamma at T
  double w1 = 0.0;  // W1(rho_gamma(T), rho(T))
  double w1_semiclassical = 0.0;  // W1(rho_b(T), rho(T))
};

struct FitRecord {
  bool degenerate = true;
  std::string reason;
  SlopeFit fit;
  bool monotone = false;  // strictly decreasing in b over the survivors
};

struct SweepReport {
  ScenarioConfig config;
  bool synthetic = false;
  std::vector<SweepEntry> entries;
  std::vector<RunReport> runs;
  FitRecord residual_fit;
  FitRecord w1_fit;
  FitRecord w1_semiclassical_fit;
  double wallclock = 0.0;

  nlohmann::json to_json() const;
  bool all_complete() const;
};

// Runs the b values one after another (each run is parallel inside), or fabricates
// prefactor * l_b^exponent data in synthetic mode, then fits and writes the sweep tables.
SweepReport sweep(const ScenarioConfig& cfg, const std::string& out_dir = {});

FitRecord fit_entries(const std::vector<std::pair<double, double>>& l_and_value,
                      const std::vector<double>& b_values);

struct DobrushinTrial {
  double shift = 0.0;
  std::vector<double> times;
  std::vector<double> w1;
  std::vector<double> bound;
  double worst_ratio = 0.0;  // max w1 / bound
};

// Two drift runs from the quantum initial density and its translate by `shift` along x1.
DobrushinTrial dobrushin_trial(const ScenarioConfig& cfg, double b, double shift);

}  // namespace gyro
