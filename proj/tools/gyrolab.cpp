#include <omp.h>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gyro/config.hpp"
#include "gyro/errors.hpp"
#include "gyro/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

struct Common {
  std::string config_path;
  std::string out;
  int threads = 0;
  std::vector<double> b;
};

gyro::ScenarioConfig resolve(const Common& c) {
  gyro::ScenarioConfig cfg = c.config_path.empty() ? gyro::default_config() : gyro::load_config(c.config_path);
  if (!c.b.empty()) cfg.b = c.b;
  if (!c.out.empty()) cfg.output.dir = c.out;
  cfg.validate();
  return cfg;
}

void apply_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int cmd_validate(const Common& c) {
  const gyro::ScenarioConfig cfg = resolve(c);
  fmt::print("{}\n", gyro::config_to_json(cfg).dump(2));
  for (double b : cfg.b) {
    const gyro::RunPlan p = gyro::plan_run(cfg, b);
    fmt::print(stderr, "b = {}: K = {}, M_ang = {}, basis {}, box half-width {:.4g}, steps {} (Hartree) / {} (drift)\n",
               b, p.K, p.m_ang, (p.n_max + 1) * (p.m_ang + 1), p.box.half_width, p.hartree_steps, p.drift_steps);
  }
  return kOk;
}

int cmd_run(const Common& c) {
  const gyro::ScenarioConfig cfg = resolve(c);
  apply_threads(c.threads);
  int code = kOk;
  for (double b : cfg.b) {
    const std::string dir = cfg.b.size() == 1 ? cfg.output.dir : fmt::format("{}/b_{}", cfg.output.dir, b);
    const gyro::RunReport r = gyro::run_scenario(cfg, b, dir);
    if (r.complete) {
      const gyro::CheckpointRecord& last = r.checkpoints.back();
      fmt::print("b = {}: W1 = {:.6g}, W1(rho_b) = {:.6g}, residual = {:.6g}, energy drift = {:.3g}, {:.1f} s -> {}\n", b,
                 last.w1_quantum, last.w1_semiclassical, last.residual_quantum_max(), r.max_energy_drift, r.wallclock,
                 dir);
    } else {
      fmt::print(stderr, "b = {}: incomplete ({})\n", b, r.error);
      code = std::max(code, r.error_kind == "validation" ? kValidation : kNumerical);
    }
  }
  return code;
}

int cmd_sweep(const Common& c) {
  const gyro::ScenarioConfig cfg = resolve(c);
  apply_threads(c.threads);
  const gyro::SweepReport rep = gyro::sweep(cfg, cfg.output.dir);
  for (const gyro::SweepEntry& e : rep.entries) {
    if (e.complete) {
      fmt::print("b = {:<6} l_b = {:.4f}  residual = {:.6g}  W1 = {:.6g}  W1(rho_b) = {:.6g}\n", e.b, e.l_b,
                 e.residual, e.w1, e.w1_semiclassical);
    } else {
      fmt::print("b = {:<6} failed: {}\n", e.b, e.error);
    }
  }
  auto show = [](const char* name, const gyro::FitRecord& f) {
    if (f.degenerate) {
      fmt::print("{} fit: degenerate ({}), monotone = {}\n", name, f.reason, f.monotone);
    } else {
      fmt::print("{} fit: exponent {:.4f}, prefactor {:.4g}, monotone = {}\n", name, f.fit.exponent,
                 std::exp(f.fit.intercept), f.monotone);
    }
  };
  show("residual", rep.residual_fit);
  show("W1", rep.w1_fit);
  show("W1(rho_b)", rep.w1_semiclassical_fit);
  return rep.all_complete() ? kOk : kNumerical;
}

// Small end-to-end checks that finish in seconds.
int cmd_selftest(const Common& c) {
  apply_threads(c.threads);
  bool ok = true;
  auto report = [&ok](const char* name, bool pass, const std::string& detail) {
    fmt::print("[{}] {}: {}\n", pass ? "PASS" : "FAIL", name, detail);
    ok = ok && pass;
  };

  gyro::ScenarioConfig trivial = gyro::default_config();
  trivial.potential.V = {};
  trivial.potential.w = {0.0, 0.3};
  trivial.b = {4.0};
  trivial.horizon = 0.25;
  trivial.numerics.markers = 20000;
  trivial.output.fields = gyro::FieldSnapshots::none;
  const gyro::RunReport r = gyro::run_scenario(trivial, 4.0, c.out);
  if (!r.complete) {
    report("stationary scenario", false, r.error);
  } else {
    const gyro::CheckpointRecord& last = r.checkpoints.back();
    const double cell = r.plan.box.h();
    report("stationary scenario", last.w1_quantum <= 2.0 * cell && r.max_trace_defect <= 1e-10,
           fmt::format("W1(T) = {:.3g} (2 cells = {:.3g}), trace defect {:.2g}", last.w1_quantum, 2.0 * cell,
                       r.max_trace_defect));
  }

  gyro::ScenarioConfig synth = gyro::default_config();
  synth.synthetic.enabled = true;
  const gyro::SweepReport s = gyro::sweep(synth);
  report("synthetic fit", !s.residual_fit.degenerate && std::abs(s.residual_fit.fit.exponent - 2.0 / 7.0) <= 0.05,
         fmt::format("exponent {:.4f}", s.residual_fit.fit.exponent));
  return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gyrolab: magnetic Hartree, semiclassical and drift-limit comparisons"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "scenario config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides output.dir)");
    sub->add_option("--threads", common.threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);
    sub->add_option("--b", common.b, "comma-separated list of b values (overrides the config)")->delimiter(',');
  };
  CLI::App* run = app.add_subcommand("run", "run the scenario at each b");
  CLI::App* sweep = app.add_subcommand("sweep", "run the b sweep and fit convergence rates");
  CLI::App* validate = app.add_subcommand("validate-config", "check a config and print its resolved form");
  CLI::App* selftest = app.add_subcommand("selftest", "quick end-to-end checks");
  for (CLI::App* sub : {run, sweep, validate, selftest}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (run->parsed()) return cmd_run(common);
    if (sweep->parsed()) return cmd_sweep(common);
    if (validate->parsed()) return cmd_validate(common);
    return cmd_selftest(common);
  } catch (const gyro::ValidationError& e) {
    fmt::print(stderr, "validation error: {}\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return kNumerical;
  }
}
