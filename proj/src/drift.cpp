#include "gyro/drift.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "gyro/errors.hpp"
#include "gyro/kernels.hpp"

namespace gyro {

double ParticleEnsemble::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

void ParticleEnsemble::validate() const {
  if (positions.size() != weights.size()) throw ValidationError("ensemble: size mismatch");
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("ensemble: negative weight");
  }
  if (std::abs(total_weight() - 1.0) > 1e-12) throw ValidationError("ensemble: weights must sum to 1");
}

PhasePoint classical_orbit(Vec2 F, double b, double v0, double t) {
  if (!(b > 0.0)) throw ValidationError("classical_orbit: b must be positive");
  const double r = std::abs(v0) / b;
  const double c = std::cos(b * t);
  const double s = std::sin(b * t);
  const Vec2 drift = perp(F) / b;
  return {Vec2{r * c, r * s} + drift * t, Vec2{-std::abs(v0) * s, std::abs(v0) * c} + drift};
}

Trajectory newton_integrate(const ForceField& F, double b, Vec2 z0, Vec2 v0, double dt, double T) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw ValidationError("newton_integrate: need dt > 0 and T >= 0");
  Trajectory traj;
  traj.step_too_coarse = dt > 2.0 * std::numbers::pi / (20.0 * b);
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  const double h = steps > 0 ? T / steps : 0.0;
  auto accel = [&](double t, Vec2 z, Vec2 v) { return F(t, z) + b * perp(v); };
  Vec2 z = z0;
  Vec2 v = v0;
  double t = 0.0;
  traj.times.push_back(t);
  traj.positions.push_back(z);
  traj.velocities.push_back(v);
  for (long k = 0; k < steps; ++k) {
    const Vec2 k1z = v;
    const Vec2 k1v = accel(t, z, v);
    const Vec2 k2z = v + 0.5 * h * k1v;
    const Vec2 k2v = accel(t + 0.5 * h, z + 0.5 * h * k1z, k2z);
    const Vec2 k3z = v + 0.5 * h * k2v;
    const Vec2 k3v = accel(t + 0.5 * h, z + 0.5 * h * k2z, k3z);
    const Vec2 k4z = v + h * k3v;
    const Vec2 k4v = accel(t + h, z + h * k3z, k4z);
    z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t = (k + 1) * h;
    traj.times.push_back(t);
    traj.positions.push_back(z);
    traj.velocities.push_back(v);
  }
  return traj;
}

Vec2 orbit_averaged_velocity(const Trajectory& traj, double b) {
  const double period = 2.0 * std::numbers::pi / b;
  if (traj.times.size() < 2) throw ValidationError("orbit average: trajectory too short");
  const double h = traj.times[1] - traj.times[0];
  const auto per = static_cast<std::size_t>(std::lround(period / h));
  if (per < 4 || std::abs(per * h - period) > 1e-9 * period) {
    throw ValidationError("orbit average: step must divide the cyclotron period");
  }
  std::vector<double> tc;
  std::vector<Vec2> zc;
  for (std::size_t start = 0; start + per < traj.times.size(); start += per) {
    // Trapezoid over one full period.
    Vec2 acc{};
    for (std::size_t k = 0; k <= per; ++k) {
      const double w = (k == 0 || k == per) ? 0.5 : 1.0;
      acc += w * traj.positions[start + k];
    }
    zc.push_back(acc / static_cast<double>(per));
    tc.push_back(0.5 * (traj.times[start] + traj.times[start + per]));
  }
  if (zc.size() < 2) throw ValidationError("orbit average: need at least two periods");
  double tm = 0.0;
  Vec2 zm{};
  for (std::size_t k = 0; k < zc.size(); ++k) {
    tm += tc[k];
    zm += zc[k];
  }
  tm /= static_cast<double>(zc.size());
  zm = zm / static_cast<double>(zc.size());
  double stt = 0.0;
  Vec2 stz{};
  for (std::size_t k = 0; k < zc.size(); ++k) {
    stt += (tc[k] - tm) * (tc[k] - tm);
    stz += (tc[k] - tm) * (zc[k] - zm);
  }
  return stz / stt;
}

Vec2 velocity_field(const GriddedDensity& rho, const PotentialSpec& P, Vec2 x) {
  const ConvolutionSolver solver(rho.grid, P.w);
  return VelocityField(P, solver, rho)(x);
}

double drift_dt_cap(const PotentialSpec& P) {
  const double norms = P.V_norm(2) + P.w_norm(2);
  return norms > 0.0 ? 0.1 / norms : std::numeric_limits<double>::infinity();
}

DriftSystem::DriftSystem(const PotentialSpec& P, const GridSpec& box)
    : P_(P), box_(box), conv_(box, P.w) {
  P_.validate();
  box_.validate();
}

GriddedDensity DriftSystem::deposit(const ParticleEnsemble& e) const {
  return deposit_cic(e.positions, e.weights, box_);
}

VelocityField DriftSystem::velocity(const GriddedDensity& rho) const {
  return VelocityField(P_, conv_, rho);
}

ParticleEnsemble DriftSystem::advance(const ParticleEnsemble& e, double dt) const {
  if (!(dt > 0.0)) throw ValidationError("drift step: dt must be positive");
  if (dt > drift_dt_cap(P_) * (1.0 + 1e-12)) {
    throw ValidationError("drift step: dt exceeds 0.1 / (|V|_W2 + |w|_W2)");
  }
  const VelocityField v = velocity(deposit(e));
  ParticleEnsemble next = e;
  const long bad = advance_markers_rk4(next.positions, v, dt);
  if (bad >= 0) {
    throw MarkerLeftBox(fmt::format("drift marker {} left the box", bad), static_cast<std::size_t>(bad));
  }
  next.time = e.time + dt;
  return next;
}

ParticleEnsemble drift_advance(const ParticleEnsemble& e, const PotentialSpec& P, const GridSpec& box,
                               double dt) {
  return DriftSystem(P, box).advance(e, dt);
}

GriddedDensity deposit(const ParticleEnsemble& e, const GridSpec& box) {
  return deposit_cic(e.positions, e.weights, box);
}

ParticleEnsemble sample_markers(const GriddedDensity& rho, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ValidationError("sample_markers: need at least one marker");
  const GridSpec& g = rho.grid;
  std::vector<double> cdf(rho.values.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < rho.values.size(); ++c) {
    acc += std::max(0.0, rho.values[c]);
    cdf[c] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("sample_markers: density has no mass");
  std::mt19937_64 rng(seed);
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  ParticleEnsemble e;
  e.positions.reserve(count);
  e.weights.assign(count, 1.0 / static_cast<double>(count));
  std::size_t cell = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double u = (static_cast<double>(k) + offset) / static_cast<double>(count) * acc;
    while (cell + 1 < cdf.size() && cdf[cell] <= u) ++cell;
    const int i1 = static_cast<int>(cell % g.n);
    const int i2 = static_cast<int>(cell / g.n);
    e.positions.push_back(g.node(i1, i2));
  }
  return e;
}

void write_ensemble_csv(const ParticleEnsemble& e, const std::string& path) {
  auto out = fmt::output_file(path);
  out.print("x1,x2,weight\n");
  for (std::size_t k = 0; k < e.size(); ++k) {
    out.print("{:.17g},{:.17g},{:.17g}\n", e.positions[k].x1, e.positions[k].x2, e.weights[k]);
  }
}

ParticleEnsemble read_ensemble_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open ensemble file " + path);
  std::string line;
  std::getline(in, line);
  if (line != "x1,x2,weight") throw ValidationError("ensemble file has an unexpected header");
  ParticleEnsemble e;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double x1, x2, w;
    char c1, c2;
    if (!(row >> x1 >> c1 >> x2 >> c2 >> w) || c1 != ',' || c2 != ',') {
      throw ValidationError("malformed ensemble row: " + line);
    }
    e.positions.push_back({x1, x2});
    e.weights.push_back(w);
  }
  return e;
}

}  // namespace gyro
