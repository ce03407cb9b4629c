#pragma once

#include "gyro/convolution.hpp"
#include "gyro/grid.hpp"
#include "gyro/potential.hpp"

namespace gyro {

// Frozen drift field grad^perp (V + w * rho): V analytic, mean field interpolated from the grid.
class VelocityField {
 public:
  VelocityField(const PotentialSpec& P, const ConvolutionSolver& solver, const GridField& rho);

  // Throws OutOfBox when x lies outside the grid box.
  Vec2 operator()(Vec2 x) const;
  bool inside(Vec2 x) const { return grid_.contains(x); }
  const GridSpec& grid() const { return grid_; }

 private:
  const PotentialSpec* P_;
  GridSpec grid_;
  GridField d1_;
  GridField d2_;
};

}  // namespace gyro
