#pragma once

#include <cstddef>
#include <vector>

#include "gyro/grid.hpp"

namespace gyro {

// Discrete measure: points with nonnegative masses.
struct PointMeasure {
  std::vector<Vec2> points;
  std::vector<double> masses;
};

struct TransportSolution {
  double cost = 0.0;
  // Kantorovich potential f on the source and sink supports: f(y) - f(x) <= |x - y| and
  // sum f d(nu - mu) = cost up to the solver tolerance.
  std::vector<double> source_potential;
  std::vector<double> sink_potential;
  long pivots = 0;
};

// Exact balanced transport with Euclidean cost between two point measures of equal mass,
// solved by a primal network simplex on the complete bipartite graph (arcs priced on the fly).
TransportSolution solve_transport(const PointMeasure& source, const PointMeasure& sink);

struct W1Options {
  double sparsify = 1e-12;         // relative mass below which cells are dropped
  std::size_t max_support = 20000;  // per side, after sparsification and netting
  // Total mass per side that may be discarded, lightest netted cells first. Changes W1 by at
  // most about twice this budget times the grid diameter.
  double tail_mass = 0.0;
};

// Wasserstein-1 distance between two gridded densities on the same grid.
double wasserstein1(const GriddedDensity& mu, const GriddedDensity& nu, const W1Options& opt = {});

// Repeats wasserstein1 after 2x2 aggregation until the supports fit. Reports the number of
// aggregation levels used.
double wasserstein1_adaptive(const GriddedDensity& mu, const GriddedDensity& nu, int* levels = nullptr,
                             const W1Options& opt = {});

}  // namespace gyro
