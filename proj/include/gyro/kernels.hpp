#pragma once

// Data-parallel kernels. Each OpenMP kernel has a plain serial reference used by the tests
// and by the benchmark target.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gyro/grid.hpp"
#include "gyro/landau_basis.hpp"
#include "gyro/velocity.hpp"

namespace gyro {

using RealFunction = std::function<double(Vec2)>;

// Tensor rule in polar coordinates around the origin: Gauss-Legendre panels in r,
// uniform trapezoid in theta (exact for the angular Fourier modes the basis can couple).
class PolarQuadrature {
 public:
  PolarQuadrature(const Truncation& t, const ScalingParams& s, int panels_per_length = 2,
                  int order = 8);

  const Truncation& truncation() const { return t_; }
  const ScalingParams& scaling() const { return s_; }
  int radial_nodes() const { return static_cast<int>(r_.size()); }
  int angular_nodes() const { return n_theta_; }
  double radius() const { return radius_; }
  const std::vector<double>& radii() const { return r_; }
  // Largest |1 - <phi_i, phi_i>| realized by the radial rule.
  double norm_defect() const { return norm_defect_; }

  Vec2 node(int a, int j) const;
  // Area weight of node (a, j); independent of j.
  double weight(int a) const;
  // W sampled at every node: row a (radius), column j (angle).
  Eigen::MatrixXd sample(const RealFunction& W) const;
  // Angular Fourier coefficients W_k(r_a) = int W(r_a, theta) e^{i k theta} dtheta for
  // |k| <= max coupling; row a, column k + kmax.
  Eigen::MatrixXcd angular_modes(const Eigen::MatrixXd& samples) const;
  Eigen::MatrixXcd angular_modes(const RealFunction& W) const { return angular_modes(sample(W)); }
  // sum_k occ_k |sum_i F_ik phi_i|^2 at every node.
  Eigen::MatrixXd density(const Eigen::MatrixXcd& orbitals, const Eigen::VectorXd& occ) const;
  // Hermitian matrix <phi_i, W phi_j> assembled from angular modes.
  Eigen::MatrixXcd assemble(const Eigen::MatrixXcd& modes) const;
  int max_coupling() const { return kmax_; }

 private:
  Truncation t_;
  ScalingParams s_;
  double radius_ = 0.0;
  int n_theta_ = 0;
  int kmax_ = 0;
  std::vector<double> r_;
  std::vector<double> wr_;  // radial weight times r
  Eigen::MatrixXd g_;       // basis x radial nodes
  std::vector<int> lo_, hi_;
  std::vector<cplx> phase_;
  std::vector<int> ang_;
  double norm_defect_ = 0.0;
  std::vector<double> cos_, sin_;
  Eigen::MatrixXcd twiddle_;  // e^{i k theta_j}, j x k for k = 0..kmax
};

Eigen::MatrixXcd potential_matrix(const RealFunction& W, const PolarQuadrature& q);
// Serial reference: Cartesian tensor quadrature on the grid nodes.
Eigen::MatrixXcd potential_matrix_reference(const RealFunction& W, const Truncation& t,
                                            const ScalingParams& s, const GridSpec& grid);

// rho(x) = sum_k occ_k |sum_i F_ik phi_i(x)|^2 on the grid nodes within `radius` of the origin.
GriddedDensity density_on_grid(const Eigen::MatrixXcd& orbitals, const Eigen::VectorXd& occ,
                               const Truncation& t, const ScalingParams& s, const GridSpec& grid,
                               double radius);
GriddedDensity density_on_grid_reference(const Eigen::MatrixXcd& orbitals,
                                         const Eigen::VectorXd& occ, const Truncation& t,
                                         const ScalingParams& s, const GridSpec& grid);

// m(z_node, n) for n <= levels: (1/2 pi l^2) sum_k occ_k |<psi_{z,n}, u_k>|^2, exact within the
// truncation. Returns one field per level.
std::vector<GridField> husimi_levels(const Eigen::MatrixXcd& orbitals, const Eigen::VectorXd& occ,
                                     const Truncation& t, const ScalingParams& s,
                                     const GridSpec& grid, int levels, double radius);
std::vector<GridField> husimi_levels_reference(const Eigen::MatrixXcd& orbitals,
                                               const Eigen::VectorXd& occ, const Truncation& t,
                                               const ScalingParams& s, const GridSpec& grid,
                                               int levels);

// Cloud-in-cell deposition. The parallel version accumulates a fixed number of chunk buffers and
// merges them in order, so the result does not depend on the thread count.
GriddedDensity deposit_cic(const std::vector<Vec2>& positions, const std::vector<double>& weights,
                           const GridSpec& grid);
GriddedDensity deposit_cic_reference(const std::vector<Vec2>& positions,
                                     const std::vector<double>& weights, const GridSpec& grid);

// One RK4 step for every marker through a frozen field. Returns the index of the first marker
// that left the box, or -1.
long advance_markers_rk4(std::vector<Vec2>& positions, const VelocityField& v, double dt);
long advance_markers_rk4_reference(std::vector<Vec2>& positions, const VelocityField& v, double dt);

}  // namespace gyro
