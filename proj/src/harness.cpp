#include "gyro/harness.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gyro/drift.hpp"
#include "gyro/errors.hpp"
#include "gyro/husimi.hpp"
#include "gyro/transport.hpp"

namespace gyro {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int steps_for(double horizon, double cap, int multiple) {
  int steps = static_cast<int>(std::ceil(horizon / cap - 1e-9));
  steps = std::max(steps, 1);
  return ((steps + multiple - 1) / multiple) * multiple;
}

LatticeSpec layout_of(const ScenarioConfig& cfg) {
  LatticeSpec layout;
  layout.spacing = cfg.lattice.spacing;
  layout.center = cfg.lattice.center;
  return layout;
}

double max_radius(const std::vector<Vec2>& pts) {
  double r = 0.0;
  for (Vec2 p : pts) r = std::max(r, norm(p));
  return r;
}

GridField sample_on_grid(const TestFunction& f, const GridSpec& g) {
  GridField out(g);
  for (int i2 = 0; i2 < g.n; ++i2) {
    for (int i1 = 0; i1 < g.n; ++i1) out.at(i1, i2) = f.value(g.node(i1, i2));
  }
  return out;
}

HusimiField truncate_levels(const HusimiField& f, int cutoff) {
  HusimiField out;
  out.grid = f.grid;
  out.cutoff = cutoff;
  out.levels.assign(f.levels.begin(), f.levels.begin() + cutoff + 1);
  out.level_mass.assign(f.level_mass.begin(), f.level_mass.begin() + cutoff + 1);
  return out;
}

std::string time_tag(double t) { return fmt::format("{:.4f}", t); }

void write_fields_csv(const GriddedDensity& q, const GriddedDensity& sc, const GriddedDensity& nb,
                      const GriddedDensity& d, const std::string& path) {
  auto out = fmt::output_file(path);
  out.print("x1,x2,rho_gamma,rho_sc,rho_b,rho_drift\n");
  const GridSpec& g = q.grid;
  for (int i2 = 0; i2 < g.n; ++i2) {
    for (int i1 = 0; i1 < g.n; ++i1) {
      out.print("{:.10g},{:.10g},{:.17g},{:.17g},{:.17g},{:.17g}\n", g.coord(i1), g.coord(i2), q.at(i1, i2),
                sc.at(i1, i2), nb.at(i1, i2), d.at(i1, i2));
    }
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

json RunPlan::to_json() const {
  return {{"b", b},
          {"l_b", scaling.l_b},
          {"hbar", scaling.hbar},
          {"K", K},
          {"N_max", n_max},
          {"M_ang", m_ang},
          {"basis_size", (n_max + 1) * (m_ang + 1)},
          {"cutoff", cutoff},
          {"inequality_cutoffs", inequality_cutoffs},
          {"lattice_radius", lattice_radius},
          {"drift_excursion", drift_excursion},
          {"system_radius", system_radius},
          {"grid", box.n},
          {"half_width", box.half_width},
          {"hartree_dt", hartree_dt},
          {"hartree_steps", hartree_steps},
          {"drift_dt", drift_dt},
          {"drift_steps", drift_steps},
          {"checkpoint_times", checkpoint_times}};
}

RunPlan plan_run(const ScenarioConfig& cfg, double b) {
  cfg.validate();
  RunPlan p;
  p.b = b;
  p.scaling = make_scaling(b);
  const double l = p.scaling.l_b;
  const double T = cfg.horizon;
  const PotentialSpec& P = cfg.potential;
  p.K = cfg.states_for(b);
  p.n_max = cfg.numerics.n_max;
  p.cutoff = cfg.cutoff_for(b);
  for (int M : {2, 4, 8}) {
    if (M <= p.n_max - 1) p.inequality_cutoffs.push_back(M);
  }
  if (std::find(p.inequality_cutoffs.begin(), p.inequality_cutoffs.end(), p.cutoff) == p.inequality_cutoffs.end()) {
    p.inequality_cutoffs.push_back(p.cutoff);
    std::sort(p.inequality_cutoffs.begin(), p.inequality_cutoffs.end());
  }

  // Provisional drift run of the lattice points sizes the region the dynamics can reach.
  const std::vector<Vec2> pts = lattice_points(p.K, layout_of(cfg), p.scaling);
  p.lattice_radius = max_radius(pts);
  const double crude = T * (P.V_norm(1) + P.w_norm(1));
  GridSpec pbox;
  pbox.n = cfg.numerics.grid;
  pbox.half_width = p.lattice_radius + crude + 4.0 * l + 0.5;
  ParticleEnsemble e;
  e.positions = pts;
  e.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  const DriftSystem provisional(P, pbox);
  const int psteps = steps_for(T, drift_dt_cap(P), 1);
  p.drift_excursion = p.lattice_radius;
  for (int k = 0; k < psteps; ++k) {
    e = provisional.advance(e, T / psteps);
    p.drift_excursion = std::max(p.drift_excursion, max_radius(e.positions));
  }
  p.system_radius = p.drift_excursion + 3.0 * l;

  if (cfg.numerics.m_ang) {
    p.m_ang = *cfg.numerics.m_ang;
  } else {
    // The angular index of a coherent state centred at the excursion radius is Poisson with
    // this mean; keep every index below the 1e-10 tail.
    const double lambda = 0.5 * (p.drift_excursion / l) * (p.drift_excursion / l);
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    int m = 0;
    while (1.0 - cdf > 1e-10) {
      ++m;
      pmf *= lambda / m;
      cdf += pmf;
    }
    p.m_ang = m;
  }
  const Truncation t(p.n_max, p.m_ang);
  const HartreeOptions defaults;
  const double width = l / defaults.polar_panels_per_length;
  const double rq = std::ceil(basis_support_radius(t, p.scaling) / width) * width;
  p.box.n = cfg.numerics.grid;
  p.box.half_width = std::max(rq, p.system_radius) / (1.0 - 8.0 / p.box.n);

  const int C = cfg.numerics.checkpoints;
  p.hartree_steps = steps_for(T, cfg.numerics.dt_fraction * hartree_dt_cap(P), C);
  p.hartree_dt = T / p.hartree_steps;
  p.drift_steps = steps_for(T, cfg.numerics.dt_fraction * drift_dt_cap(P), C);
  p.drift_dt = T / p.drift_steps;
  for (int j = 0; j <= C; ++j) p.checkpoint_times.push_back(T * j / C);
  return p;
}

double CheckpointRecord::residual_quantum_max() const {
  double v = 0.0;
  for (double r : residual_quantum) v = std::max(v, std::abs(r));
  return v;
}

double CheckpointRecord::residual_drift_max() const {
  double v = 0.0;
  for (double r : residual_drift) v = std::max(v, std::abs(r));
  return v;
}

json RunReport::to_json() const {
  json cps = json::array();
  for (const CheckpointRecord& c : checkpoints) {
    json ineq = json::array();
    for (const InequalityRecord& q : c.inequality) {
      ineq.push_back({{"M", q.cutoff},
                      {"test_function", q.test_function},
                      {"lhs", q.lhs},
                      {"rhs", q.rhs},
                      {"holds", q.lhs <= q.rhs},
                      {"captured", q.captured},
                      {"captured_floor", q.captured_floor}});
    }
    cps.push_back({{"t", c.t},
                   {"observables", observables_to_json(c.obs)},
                   {"trace_defect", c.trace_defect},
                   {"pauli_cap", c.pauli_cap},
                   {"energy_drift", c.energy_drift},
                   {"mean_field_trace", c.mean_field_trace},
                   {"kinetic_limit", c.kinetic_limit},
                   {"kinetic_ok", c.kinetic_ok()},
                   {"captured", c.captured},
                   {"drift_mass", c.drift_mass},
                   {"w1_quantum", c.w1_quantum},
                   {"w1_semiclassical", c.w1_semiclassical},
                   {"w1_quantum_levels", c.w1_quantum_levels},
                   {"w1_semiclassical_levels", c.w1_semiclassical_levels},
                   {"residual_quantum", c.residual_quantum},
                   {"residual_drift", c.residual_drift},
                   {"dobrushin_rhs", c.dobrushin_rhs},
                   {"semiclassical_inequality", ineq}});
  }
  return {{"config", config_to_json(config)},
          {"plan", plan.to_json()},
          {"checkpoints", cps},
          {"max_energy_step", max_energy_step},
          {"max_energy_drift", max_energy_drift},
          {"max_trace_defect", max_trace_defect},
          {"max_pauli_excess", max_pauli_excess},
          {"complete", complete},
          {"error", error},
          {"error_kind", error_kind},
          {"wallclock_seconds", wallclock}};
}

void write_metrics_csv(const RunReport& r, const std::string& path) {
  auto out = fmt::output_file(path);
  out.print(
      "t,trace,trace_defect,max_eigenvalue,pauli_cap,energy,energy_drift,kinetic_1,kinetic_limit,kinetic_ok,"
      "captured,drift_mass,w1_quantum,w1_semiclassical,dobrushin_rhs");
  const std::size_t nf = r.config.test_functions.size();
  for (std::size_t f = 0; f < nf; ++f) out.print(",residual_quantum_{}", f);
  for (std::size_t f = 0; f < nf; ++f) out.print(",residual_drift_{}", f);
  out.print("\n");
  for (const CheckpointRecord& c : r.checkpoints) {
    out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}",
              c.t, c.obs.trace, c.trace_defect, c.obs.max_eigenvalue, c.pauli_cap, c.obs.energy, c.energy_drift,
              c.obs.kinetic_moment_1, c.kinetic_limit, c.kinetic_ok() ? 1 : 0, c.captured, c.drift_mass,
              c.w1_quantum, c.w1_semiclassical, c.dobrushin_rhs);
    for (double v : c.residual_quantum) out.print(",{:.17g}", v);
    for (double v : c.residual_drift) out.print(",{:.17g}", v);
    out.print("\n");
  }
}

RunReport run_scenario(const ScenarioConfig& cfg, double b, const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.config = cfg;
  try {
    r.plan = plan_run(cfg, b);
    const RunPlan& p = r.plan;
    const PotentialSpec& P = cfg.potential;
    const GridSpec& box = p.box;
    const auto& tfs = cfg.test_functions;
    const std::size_t nf = tfs.size();
    if (!out_dir.empty()) fs::create_directories(out_dir);

    const Truncation trunc(p.n_max, p.m_ang);
    const HartreeSystem hs(p.scaling, trunc, box, P);
    HartreeSystem::State st = hs.make_state(initial_state(p.K, layout_of(cfg), p.scaling, trunc));
    const double e0 = st.energy;
    const ConvolutionSolver& conv = hs.convolution();
    const DriftSystem ds(P, box);

    std::vector<double> qtimes, dtimes;
    std::vector<std::vector<WeakPairing>> qpair(nf), dpair(nf);
    auto log_pairs = [&](std::vector<double>& times, std::vector<std::vector<WeakPairing>>& store, double t,
                         const GriddedDensity& rho) {
      const std::vector<WeakPairing> pr = weak_pairings(rho, P, conv, tfs);
      times.push_back(t);
      for (std::size_t f = 0; f < nf; ++f) store[f].push_back(pr[f]);
    };

    GriddedDensity rho_q = density_of(st.gamma, box);
    ParticleEnsemble markers = sample_markers(rho_q, cfg.numerics.markers, cfg.seed);
    GriddedDensity rho_d = ds.deposit(markers);
    log_pairs(qtimes, qpair, 0.0, rho_q);
    log_pairs(dtimes, dpair, 0.0, rho_d);

    std::vector<GridField> phi_grid;
    for (const TestFunction& f : tfs) phi_grid.push_back(sample_on_grid(f, box));
    const double v_sup = P.V_norm(0);
    const double w_sup = P.w_norm(0);
    const W1Options w1opt{1e-12, cfg.numerics.w1_max_support, cfg.numerics.w1_tail_mass};
    const int C = cfg.numerics.checkpoints;
    const int top = *std::max_element(p.inequality_cutoffs.begin(), p.inequality_cutoffs.end());
    double w1_initial = 0.0;

    auto checkpoint = [&](int j) {
      const double t = p.checkpoint_times[j];
      CheckpointRecord c;
      c.t = t;
      c.obs = hs.observables(st);
      c.trace_defect = std::abs(c.obs.trace - 1.0);
      c.pauli_cap = p.scaling.pauli_cap();
      c.energy_drift = std::abs(st.energy - e0);
      c.mean_field_trace = c.obs.energy + c.obs.interaction_energy;
      c.kinetic_limit = std::abs(c.mean_field_trace) + v_sup + w_sup;

      const HusimiField field = husimi_field(st.gamma, std::max(top, p.cutoff), box);
      GriddedDensity partial(box);
      for (int n = 0; n <= top; ++n) {
        for (std::size_t k = 0; k < partial.values.size(); ++k) partial.values[k] += field.levels[n].values[k];
        if (std::find(p.inequality_cutoffs.begin(), p.inequality_cutoffs.end(), n) == p.inequality_cutoffs.end()) continue;
        const double captured = captured_trace(st.gamma, n);
        for (std::size_t f = 0; f < nf; ++f) {
          InequalityRecord q;
          q.cutoff = n;
          q.test_function = static_cast<int>(f);
          double diff = 0.0;
          for (std::size_t k = 0; k < partial.values.size(); ++k) {
            diff += phi_grid[f].values[k] * (rho_q.values[k] - partial.values[k]);
          }
          q.lhs = std::abs(diff * box.cell_area());
          q.rhs = semiclassical_bound(tfs[f].sup_norm(), tfs[f].gradient_l2(), st.gamma, n, 10.0);
          q.captured = captured;
          q.captured_floor = 1.0 - c.obs.kinetic_moment_1 / n;
          c.inequality.push_back(q);
        }
      }
      const HusimiField upto = truncate_levels(field, p.cutoff);
      const GriddedDensity rho_sc = semiclassical_density(upto, st.gamma, false);
      const GriddedDensity rho_b = semiclassical_density(upto, st.gamma, true);
      c.captured = captured_trace(st.gamma, p.cutoff);
      c.drift_mass = rho_d.mass();
      if (cfg.numerics.w1_enabled) {
        c.w1_quantum = wasserstein1_adaptive(rho_q, rho_d, &c.w1_quantum_levels, w1opt);
        c.w1_semiclassical = wasserstein1_adaptive(rho_b, rho_d, &c.w1_semiclassical_levels, w1opt);
      } else {
        c.w1_quantum = c.w1_semiclassical = std::nan("");
      }
      if (j == 0) w1_initial = c.w1_quantum;
      for (std::size_t f = 0; f < nf; ++f) {
        c.residual_quantum.push_back(j == 0 ? 0.0 : residual_from_pairings(qtimes, qpair[f], t));
        c.residual_drift.push_back(j == 0 ? 0.0 : residual_from_pairings(dtimes, dpair[f], t));
      }
      c.dobrushin_rhs = cfg.numerics.w1_enabled ? dobrushin_bound(w1_initial, 0.0, t, P) : std::nan("");
      r.checkpoints.push_back(std::move(c));

      if (!out_dir.empty()) {
        const bool endpoint = j == 0 || j == C;
        const std::string tag = time_tag(t);
        const FieldSnapshots mode = cfg.output.fields;
        if (mode == FieldSnapshots::all || (mode == FieldSnapshots::endpoints && endpoint)) {
          write_fields_csv(rho_q, rho_sc, rho_b, rho_d, fmt::format("{}/density_t{}.csv", out_dir, tag));
        }
        if (mode != FieldSnapshots::none && endpoint) {
          write_husimi_csv(upto, fmt::format("{}/husimi_t{}.csv", out_dir, tag), cfg.output.husimi_floor);
        }
        if (cfg.output.gamma_checkpoints) {
          write_json(checkpoint_to_json(st.gamma, t, r.checkpoints.back().obs),
                     fmt::format("{}/gamma_t{}.json", out_dir, tag));
        }
      }
    };

    auto track = [&](const HartreeSystem::State& prev) {
      r.max_energy_step = std::max(r.max_energy_step, std::abs(st.energy - prev.energy));
      r.max_energy_drift = std::max(r.max_energy_drift, std::abs(st.energy - e0));
      r.max_trace_defect = std::max(r.max_trace_defect, std::abs(st.gamma.trace() - 1.0));
      r.max_pauli_excess = std::max(r.max_pauli_excess, st.gamma.max_eigenvalue() - p.scaling.pauli_cap());
    };

    r.max_trace_defect = std::abs(st.gamma.trace() - 1.0);
    r.max_pauli_excess = st.gamma.max_eigenvalue() - p.scaling.pauli_cap();
    checkpoint(0);
    const int hper = p.hartree_steps / C;
    const int dper = p.drift_steps / C;
    for (int j = 1; j <= C; ++j) {
      for (int k = 0; k < hper; ++k) {
        HartreeSystem::State next = hs.step(st, p.hartree_dt);
        std::swap(st, next);
        track(next);
        const int index = (j - 1) * hper + k + 1;
        rho_q = density_of(st.gamma, box);
        log_pairs(qtimes, qpair, index == p.hartree_steps ? cfg.horizon : index * p.hartree_dt, rho_q);
      }
      for (int k = 0; k < dper; ++k) {
        markers = ds.advance(markers, p.drift_dt);
        const int index = (j - 1) * dper + k + 1;
        rho_d = ds.deposit(markers);
        log_pairs(dtimes, dpair, index == p.drift_steps ? cfg.horizon : index * p.drift_dt, rho_d);
      }
      // Checkpoint times must coincide with the logged sample times.
      qtimes.back() = p.checkpoint_times[j];
      dtimes.back() = p.checkpoint_times[j];
      checkpoint(j);
    }
    r.complete = true;
  } catch (const ValidationError& e) {
    r.error = fmt::format("b = {}: {}", b, e.what());
    r.error_kind = "validation";
  } catch (const std::exception& e) {
    r.error = fmt::format("b = {}: {}", b, e.what());
    r.error_kind = "numerical";
  }
  r.wallclock = seconds_since(start);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_json(r.to_json(), out_dir + "/report.json");
    write_metrics_csv(r, out_dir + "/metrics.csv");
  }
  return r;
}

FitRecord fit_entries(const std::vector<std::pair<double, double>>& l_and_value, const std::vector<double>& b_values) {
  FitRecord rec;
  std::vector<std::pair<double, double>> by_b;
  for (std::size_t k = 0; k < l_and_value.size(); ++k) by_b.emplace_back(b_values[k], l_and_value[k].second);
  std::sort(by_b.begin(), by_b.end());
  rec.monotone = by_b.size() >= 2;
  for (std::size_t k = 1; k < by_b.size(); ++k) rec.monotone = rec.monotone && by_b[k].second < by_b[k - 1].second;
  if (l_and_value.size() < 3) {
    rec.reason = "fewer than 3 surviving b values";
    return rec;
  }
  double largest = 0.0;
  for (const auto& [l, v] : l_and_value) {
    if (!std::isfinite(v)) {
      rec.reason = "non-finite value";
      return rec;
    }
    largest = std::max(largest, std::abs(v));
  }
  // Values at rounding level carry no rate information.
  if (largest <= 1e-10) {
    rec.reason = "values at the noise floor";
    return rec;
  }
  for (const auto& [l, v] : l_and_value) {
    if (!(v > 0.0)) {
      rec.reason = "nonpositive value";
      return rec;
    }
  }
  rec.fit = slope_fit(l_and_value);
  rec.degenerate = false;
  return rec;
}

bool SweepReport::all_complete() const {
  for (const SweepEntry& e : entries) {
    if (!e.complete) return false;
  }
  return true;
}

json SweepReport::to_json() const {
  auto fit_json = [](const FitRecord& f) {
    return json{{"degenerate", f.degenerate},
                {"reason", f.reason},
                {"exponent", f.fit.exponent},
                {"prefactor", std::exp(f.fit.intercept)},
                {"log_residual", f.fit.residual},
                {"monotone_decreasing", f.monotone}};
  };
  json rows = json::array();
  for (const SweepEntry& e : entries) {
    rows.push_back({{"b", e.b},
                    {"l_b", e.l_b},
                    {"complete", e.complete},
                    {"error", e.error},
                    {"residual", e.residual},
                    {"w1", e.w1},
                    {"w1_semiclassical", e.w1_semiclassical}});
  }
  json runs_json = json::array();
  for (const RunReport& r : runs) {
    runs_json.push_back({{"b", r.plan.b}, {"complete", r.complete}, {"wallclock_seconds", r.wallclock}});
  }
  return {{"config", config_to_json(config)},
          {"synthetic", synthetic},
          {"reference_exponent", 2.0 / 7.0},
          {"entries", rows},
          {"runs", runs_json},
          {"fits", {{"residual", fit_json(residual_fit)}, {"w1", fit_json(w1_fit)}, {"w1_semiclassical", fit_json(w1_semiclassical_fit)}}},
          {"wallclock_seconds", wallclock}};
}

SweepReport sweep(const ScenarioConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (cfg.b.size() < 3) throw ValidationError("sweep: need at least 3 values of b");
  const auto start = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.config = cfg;
  rep.synthetic = cfg.synthetic.enabled;
  if (!out_dir.empty()) fs::create_directories(out_dir);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (double b : cfg.b) {
    SweepEntry e;
    e.b = b;
    e.l_b = make_scaling(b).l_b;
    if (rep.synthetic) {
      const SyntheticConfig& s = cfg.synthetic;
      auto draw = [&] { return s.prefactor * std::pow(e.l_b, s.exponent) * (1.0 + s.noise * unit(rng)); };
      e.residual = draw();
      e.w1 = draw();
      e.w1_semiclassical = draw();
      e.complete = true;
    } else {
      const std::string dir = out_dir.empty() ? std::string() : fmt::format("{}/b_{}", out_dir, b);
      RunReport run = run_scenario(cfg, b, dir);
      e.complete = run.complete;
      e.error = run.error;
      if (run.complete) {
        const CheckpointRecord& last = run.checkpoints.back();
        e.residual = last.residual_quantum_max();
        e.w1 = last.w1_quantum;
        e.w1_semiclassical = last.w1_semiclassical;
      }
      rep.runs.push_back(std::move(run));
    }
    rep.entries.push_back(e);
  }
  std::vector<double> bs;
  std::vector<std::pair<double, double>> res, w1, w1sc;
  for (const SweepEntry& e : rep.entries) {
    if (!e.complete) continue;
    bs.push_back(e.b);
    res.emplace_back(e.l_b, e.residual);
    w1.emplace_back(e.l_b, e.w1);
    w1sc.emplace_back(e.l_b, e.w1_semiclassical);
  }
  rep.residual_fit = fit_entries(res, bs);
  rep.w1_fit = fit_entries(w1, bs);
  rep.w1_semiclassical_fit = fit_entries(w1sc, bs);
  rep.wallclock = seconds_since(start);

  if (!out_dir.empty()) {
    write_json(rep.to_json(), out_dir + "/sweep.json");
    auto csv = fmt::output_file(out_dir + "/sweep.csv");
    csv.print("b,l_b,complete,residual,w1,w1_semiclassical\n");
    auto dat = fmt::output_file(out_dir + "/sweep.dat");
    dat.print("# l_b residual w1 w1_semiclassical (completed runs only)\n");
    for (const SweepEntry& e : rep.entries) {
      csv.print("{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", e.b, e.l_b, e.complete ? 1 : 0, e.residual, e.w1,
                e.w1_semiclassical);
      if (e.complete) dat.print("{:.17g} {:.17g} {:.17g} {:.17g}\n", e.l_b, e.residual, e.w1, e.w1_semiclassical);
    }
  }
  return rep;
}

DobrushinTrial dobrushin_trial(const ScenarioConfig& cfg, double b, double shift) {
  if (!(shift > 0.0)) throw ValidationError("dobrushin_trial: shift must be positive");
  const RunPlan p = plan_run(cfg, b);
  const PotentialSpec& P = cfg.potential;
  const Truncation trunc(p.n_max, p.m_ang);
  const GriddedDensity rho0 = density_of(initial_state(p.K, layout_of(cfg), p.scaling, trunc), p.box);
  ParticleEnsemble a = sample_markers(rho0, cfg.numerics.markers, cfg.seed);
  ParticleEnsemble c = a;
  for (Vec2& x : c.positions) x.x1 += shift;
  const DriftSystem ds(P, p.box);
  const W1Options opt{1e-12, cfg.numerics.w1_max_support, cfg.numerics.w1_tail_mass};
  DobrushinTrial out;
  out.shift = shift;
  const int C = cfg.numerics.checkpoints;
  const int per = p.drift_steps / C;
  for (int j = 0; j <= C; ++j) {
    if (j > 0) {
      for (int k = 0; k < per; ++k) {
        a = ds.advance(a, p.drift_dt);
        c = ds.advance(c, p.drift_dt);
      }
    }
    const double t = p.checkpoint_times[j];
    const double w = wasserstein1_adaptive(ds.deposit(a), ds.deposit(c), nullptr, opt);
    const double bound = dobrushin_bound(shift, 0.0, t, P);
    out.times.push_back(t);
    out.w1.push_back(w);
    out.bound.push_back(bound);
    out.worst_ratio = std::max(out.worst_ratio, w / bound);
  }
  return out;
}

}  // namespace gyro
