#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gyro/convolution.hpp"
#include "gyro/grid.hpp"
#include "gyro/potential.hpp"
#include "gyro/velocity.hpp"

namespace gyro {

struct ParticleEnsemble {
  std::vector<Vec2> positions;
  std::vector<double> weights;
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
  double total_weight() const;
  // Weights nonnegative and summing to 1 within 1e-12.
  void validate() const;
};

struct PhasePoint {
  Vec2 position;
  Vec2 velocity;
};

// Closed-form solution of Z'' = F + b Z'^perp for constant F, split into a cyclotron part
// Z_c(t) = (|v0|/b)(cos bt, sin bt) and a drift Z_d(t) = F^perp t / b.
PhasePoint classical_orbit(Vec2 F, double b, double v0, double t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  bool step_too_coarse = false;
};

using ForceField = std::function<Vec2(double, Vec2)>;

// RK4 for (Z, Z') with Z'' = F(t, Z) + b Z'^perp. Flags dt > 2 pi / (20 b).
Trajectory newton_integrate(const ForceField& F, double b, Vec2 z0, Vec2 v0, double dt, double T);

// Mean guiding-centre velocity: positions averaged over consecutive cyclotron periods,
// then a least-squares line through the averages.
Vec2 orbit_averaged_velocity(const Trajectory& traj, double b);

// grad^perp (V + w * rho)(x) with a one-off convolution.
Vec2 velocity_field(const GriddedDensity& rho, const PotentialSpec& P, Vec2 x);

// dt <= 0.1 / (|V|_{W2,inf} + |w|_{W2,inf}).
double drift_dt_cap(const PotentialSpec& P);

// Drift dynamics on a fixed grid; owns the convolution plans.
class DriftSystem {
 public:
  DriftSystem(const PotentialSpec& P, const GridSpec& box);

  GriddedDensity deposit(const ParticleEnsemble& e) const;
  VelocityField velocity(const GriddedDensity& rho) const;
  // One RK4 step of every marker through the field frozen at the step start.
  ParticleEnsemble advance(const ParticleEnsemble& e, double dt) const;

  const PotentialSpec& potential() const { return P_; }
  const GridSpec& grid() const { return box_; }

 private:
  PotentialSpec P_;
  GridSpec box_;
  ConvolutionSolver conv_;
};

ParticleEnsemble drift_advance(const ParticleEnsemble& e, const PotentialSpec& P, const GridSpec& box,
                               double dt);
GriddedDensity deposit(const ParticleEnsemble& e, const GridSpec& box);

// Stratified inverse-CDF sampling of rho over the grid cells: count markers of weight 1/count
// placed at cell nodes, with a single seeded offset for the whole stratification.
ParticleEnsemble sample_markers(const GriddedDensity& rho, std::size_t count, std::uint64_t seed);

void write_ensemble_csv(const ParticleEnsemble& e, const std::string& path);
ParticleEnsemble read_ensemble_csv(const std::string& path);

}  // namespace gyro
