#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <memory>
#include <vector>

#include "gyro/convolution.hpp"
#include "gyro/grid.hpp"
#include "gyro/kernels.hpp"
#include "gyro/landau_basis.hpp"
#include "gyro/potential.hpp"

namespace gyro {

enum class TraceCheck { unit, any };

// gamma = sum_k occ_k |u_k><u_k| with orbital coefficient columns u_k. Every constructor checks
// the spectrum against the Pauli bound [0, 2 pi l_b^2] and, unless relaxed, unit trace.
class DensityMatrix {
 public:
  static DensityMatrix from_orbitals(Eigen::MatrixXcd orbitals, Eigen::VectorXd occ,
                                     const ScalingParams& s, const Truncation& t,
                                     TraceCheck check = TraceCheck::unit);
  static DensityMatrix from_coeffs(const CoeffMatrix& g, const ScalingParams& s,
                                   TraceCheck check = TraceCheck::unit);

  const ScalingParams& scaling() const { return s_; }
  const Truncation& truncation() const { return t_; }
  const Eigen::MatrixXcd& orbitals() const { return orbitals_; }
  const Eigen::VectorXd& occupations() const { return occ_; }

  CoeffMatrix coeffs() const;
  double trace() const;
  // Nonzero part of the spectrum of gamma.
  Eigen::VectorXd spectrum() const;
  double max_eigenvalue() const;
  double min_eigenvalue() const;
  // Tr gamma Pi_n for n = 0..N_max.
  std::vector<double> landau_occupations() const;
  // Tr gamma L_b^k.
  double kinetic_moment(int k) const;
  // Tr gamma A for a matrix on the truncated space.
  cplx expectation(const Eigen::MatrixXcd& a) const;

  // U gamma U^dagger.
  DensityMatrix conjugated(const Eigen::MatrixXcd& u) const;

 private:
  DensityMatrix(Eigen::MatrixXcd orbitals, Eigen::VectorXd occ, ScalingParams s, Truncation t,
                TraceCheck check);
  void validate();

  Eigen::MatrixXcd orbitals_;
  Eigen::VectorXd occ_;
  ScalingParams s_;
  Truncation t_;
  TraceCheck check_;
  Eigen::VectorXd spectrum_;
};

struct Observables {
  double trace = 0.0;
  double energy = 0.0;
  double interaction_energy = 0.0;
  double kinetic_moment_1 = 0.0;  // Tr gamma L_b
  double kinetic_moment_2 = 0.0;  // Tr gamma L_b^2
  double position_moment_2 = 0.0;
  double position_moment_4 = 0.0;
  double position_moment_8 = 0.0;
  double max_eigenvalue = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<double> landau_occupations;
};

nlohmann::json observables_to_json(const Observables& o);

struct HartreeOptions {
  int polar_panels_per_length = 2;
  int polar_order = 8;
  double energy_drift_cap = 1e-2;
};

// Hartree dynamics on one truncation/grid. The density driving the mean field is evaluated at
// the polar quadrature nodes; w * rho is formed on the Cartesian FFT grid through the symmetric
// spread/interpolate pair, so the discrete energy is a first integral of the semi-discrete flow.
class HartreeSystem {
 public:
  HartreeSystem(const ScalingParams& s, const Truncation& t, const GridSpec& grid,
                const PotentialSpec& P, HartreeOptions options = {});

  struct State {
    DensityMatrix gamma;
    Eigen::MatrixXd polar_density;
    Eigen::MatrixXd polar_field;
    double energy;
  };

  State make_state(DensityMatrix gamma) const;
  State step(const State& state, double dt) const;

  Eigen::MatrixXd polar_density(const DensityMatrix& gamma) const;
  Eigen::MatrixXd polar_mean_field(const Eigen::MatrixXd& polar_density) const;
  Eigen::MatrixXcd hamiltonian(const Eigen::MatrixXd& polar_field) const;
  double energy(const DensityMatrix& gamma, const Eigen::MatrixXd& polar_density,
                const Eigen::MatrixXd& polar_field) const;
  Observables observables(const State& state) const;
  GriddedDensity grid_density(const DensityMatrix& gamma) const;

  // exp(-i dt H / l^2) gamma exp(i dt H / l^2) with H held fixed.
  DensityMatrix propagate_frozen(const DensityMatrix& gamma, const Eigen::MatrixXcd& h,
                                 double dt) const;

  const ScalingParams& scaling() const { return s_; }
  const Truncation& truncation() const { return t_; }
  const GridSpec& grid() const { return grid_; }
  const PotentialSpec& potential() const { return P_; }
  const PolarQuadrature& quadrature() const { return quad_; }
  const ConvolutionSolver& convolution() const { return conv_; }
  const Eigen::MatrixXcd& static_hamiltonian() const { return h_static_; }
  const HartreeOptions& options() const { return options_; }

 private:
  ScalingParams s_;
  Truncation t_;
  GridSpec grid_;
  PotentialSpec P_;
  HartreeOptions options_;
  PolarQuadrature quad_;
  ConvolutionSolver conv_;
  Eigen::MatrixXcd h_static_;
};

// Step cap used by the integrator: 0.05 / (1 + |V|_{W1,inf} + |w|_{W1,inf}).
double hartree_dt_cap(const PotentialSpec& P);

GriddedDensity density_of(const DensityMatrix& gamma, const GridSpec& box);
DensityMatrix hartree_step(const DensityMatrix& gamma, double dt, const PotentialSpec& P,
                           const GridSpec& box);
Observables observables(const DensityMatrix& gamma, const PotentialSpec& P, const GridSpec& box);

struct LatticeSpec {
  double spacing = 2.6;  // in units of l_b
  Vec2 center{};
  // Shift of the lattice origin from `center`, in units of the spacing; the default puts
  // `center` at the centroid of an elementary triangle.
  Vec2 offset{0.5, 0.28867513459481287};
};

// Positions of the K triangular-lattice points nearest to the lattice center.
std::vector<Vec2> lattice_points(int K, const LatticeSpec& layout, const ScalingParams& s);
int pauli_minimum_states(const ScalingParams& s);
DensityMatrix initial_state(int K, const LatticeSpec& layout, const ScalingParams& s,
                            const Truncation& t);

nlohmann::json checkpoint_to_json(const DensityMatrix& gamma, double t, const Observables& obs);
DensityMatrix checkpoint_from_json(const nlohmann::json& j);

}  // namespace gyro
