#pragma once

#include <string>
#include <vector>

#include "gyro/grid.hpp"
#include "gyro/hartree.hpp"

namespace gyro {

// m_gamma(z, n) on the density grid for n <= M.
struct HusimiField {
  GridSpec grid;
  int cutoff = 0;
  std::vector<GridField> levels;
  // (1/2 pi l^2)-normalized z-integral of each level; approximates Tr gamma Pi_n.
  std::vector<double> level_mass;
};

// (1/2 pi l^2) <psi_{z,n}, gamma psi_{z,n}>, clipped at zero.
double husimi_value(const DensityMatrix& gamma, cplx z, int n, double tail_tolerance = 1e-10);

HusimiField husimi_field(const DensityMatrix& gamma, int cutoff, const GridSpec& box);

// rho^{sc,<=M}(z) = sum_{n<=M} m_gamma(z, n); if normalized, divided by Tr gamma Pi_{<=M}.
GriddedDensity semiclassical_density(const DensityMatrix& gamma, int cutoff, const GridSpec& box,
                                     bool normalized);
GriddedDensity semiclassical_density(const HusimiField& field, const DensityMatrix& gamma,
                                     bool normalized);

// Tr gamma Pi_{<=M}.
double captured_trace(const DensityMatrix& gamma, int cutoff);
// Tr gamma Pi_{>M} L_b^k.
double high_level_kinetic(const DensityMatrix& gamma, int cutoff, int k);

// M(b) = round(l_b^{-6/7}) clamped to [2, N_max - 1].
int cutoff_schedule(const ScalingParams& s, int n_max);

// Right-hand side of the weak closeness estimate for k = 1:
// |phi|_inf M^{-1/2} sqrt(Tr gamma Pi_{>M} L_b) + C |grad phi|_{L2} sqrt(Tr gamma L_b) M^{1/2} l_b.
double semiclassical_bound(double phi_sup, double grad_l2, const DensityMatrix& gamma, int cutoff,
                           double constant = 10.0);

// Rows z1,z2,n,value; values below `floor` are omitted.
void write_husimi_csv(const HusimiField& field, const std::string& path, double floor = 1e-14);

}  // namespace gyro
