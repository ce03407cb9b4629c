#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gyro/convolution.hpp"
#include "gyro/grid.hpp"
#include "gyro/potential.hpp"

namespace gyro {

// phi(x) = A (1 + k.(x - c)) exp(-|x - c|^2 / (2 s^2)).
struct TestFunction {
  double amplitude = 1.0;
  Vec2 center{};
  double width = 1.0;
  Vec2 tilt{};

  void validate() const;
  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  double sup_norm() const;
  // sup |grad phi|, located numerically.
  double gradient_sup() const;
  double w1_inf_norm() const;
  // |grad phi|_{L2} = |A| sqrt(pi (1 + |k|^2 s^2)).
  double gradient_l2() const;
  // Radius beyond which |phi| < 1e-14.
  double support_radius() const;
};

// chi = 1 on [0, 0.8 T], then 1 - S(u) with the C^4 smoothstep S and u = (t - 0.8 T) / (0.2 T).
struct TimeWindow {
  double horizon = 1.0;

  double value(double t) const;
  double derivative(double t) const;
};

// Spatial pairings of one density snapshot with a test function:
// mass = int phi rho, transport = int rho grad^perp(V + w * rho) . grad phi.
struct WeakPairing {
  double mass = 0.0;
  double transport = 0.0;
};

std::vector<WeakPairing> weak_pairings(const GriddedDensity& rho, const PotentialSpec& P,
                                       const ConvolutionSolver& conv, std::span<const TestFunction> phis);

// int_0^T [chi' A(t) + chi B(t)] dt + A(0) for piecewise-linear A, B through the samples,
// integrated exactly by Gauss-Legendre on each interval (split at 0.8 T).
double residual_from_pairings(std::span<const double> times, std::span<const WeakPairing> pairings,
                              double horizon);

// Weak-form defect of the drift equation along a stored density trajectory.
double drift_residual(std::span<const double> times, std::span<const GriddedDensity> traj, const PotentialSpec& P,
                      const TestFunction& phi, double horizon);

double dobrushin_bound(double w1_initial, double error_term, double t, const PotentialSpec& P);

struct SlopeFit {
  double exponent = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double residual = 0.0;   // RMS of the log residuals
};

// Least-squares fit of log(value) against log(l_b).
SlopeFit slope_fit(std::span<const std::pair<double, double>> pairs);

}  // namespace gyro
