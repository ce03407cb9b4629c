#pragma once

#include <array>
#include <memory>

#include "gyro/grid.hpp"
#include "gyro/potential.hpp"

namespace gyro {

// Discrete convolution w * rho on a fixed grid via zero-padded FFTs of size 2n.
// Plans are built once with FFTW_ESTIMATE so results are reproducible run to run.
class ConvolutionSolver {
 public:
  ConvolutionSolver(GridSpec grid, RadialGaussian w);
  ~ConvolutionSolver();
  ConvolutionSolver(const ConvolutionSolver&) = delete;
  ConvolutionSolver& operator=(const ConvolutionSolver&) = delete;

  const GridSpec& grid() const { return grid_; }
  const RadialGaussian& kernel() const { return w_; }

  // (w * rho)(x_i) = sum_j w(x_i - x_j) rho_j h^2.
  GridField convolve(const GridField& rho) const;
  // Gradient of w * rho, obtained by convolving with the analytic gradient of w.
  std::array<GridField, 2> convolve_gradient(const GridField& rho) const;

 private:
  struct Impl;
  GridSpec grid_;
  RadialGaussian w_;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper building a one-off solver.
GridField mean_field(const RadialGaussian& w, const GridField& rho);

}  // namespace gyro
