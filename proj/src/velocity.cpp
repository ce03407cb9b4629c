#include "gyro/velocity.hpp"

#include "gyro/errors.hpp"

namespace gyro {

VelocityField::VelocityField(const PotentialSpec& P, const ConvolutionSolver& solver,
                             const GridField& rho)
    : P_(&P), grid_(solver.grid()) {
  auto grads = solver.convolve_gradient(rho);
  d1_ = std::move(grads[0]);
  d2_ = std::move(grads[1]);
}

Vec2 VelocityField::operator()(Vec2 x) const {
  if (!grid_.contains(x)) throw OutOfBox("velocity field queried outside the box");
  const Vec2 grad = P_->V_gradient(x) + Vec2{d1_.interpolate(x), d2_.interpolate(x)};
  return perp(grad);
}

}  // namespace gyro
