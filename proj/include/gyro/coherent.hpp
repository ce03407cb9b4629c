#pragma once

#include <Eigen/Dense>
#include <array>

#include "gyro/landau_basis.hpp"

namespace gyro {

struct CoherentLabel {
  cplx z{};
  int n = 0;
};

cplx eval_coherent(const CoherentLabel& lab, Vec2 x, const ScalingParams& s);

struct CoherentCoeffs {
  Eigen::VectorXcd c;  // c_m for m = 0..M_ang
  double tail = 0.0;   // 1 - sum |c_m|^2, summed directly over m > M_ang
};

// Expansion of psi_{z,n} over phi_{n,m}; throws TruncationInsufficient when tail > tolerance.
CoherentCoeffs coherent_coeffs(const CoherentLabel& lab, const Truncation& t,
                               const ScalingParams& s, double tail_tolerance = 1e-10);
CoherentCoeffs coherent_coeffs_unchecked(cplx z, int m_ang, const ScalingParams& s);

// psi_{z,n} embedded in the full flattened basis.
Eigen::VectorXcd coherent_vector(const CoherentLabel& lab, const Truncation& t,
                                 const ScalingParams& s, double tail_tolerance = 1e-10);

// Kernel of |psi_{z,n}><psi_{z,n}|.
cplx projector_kernel(const CoherentLabel& lab, Vec2 x, Vec2 y, const ScalingParams& s);
// Sum of projector kernels over n <= M.
cplx truncated_projector_kernel(cplx z, int M, Vec2 x, Vec2 y, const ScalingParams& s);
// Kernel of sum over all n of |psi_{z,n}><psi_{z,n}|.
cplx pi_z_kernel(cplx z, Vec2 x, Vec2 y, const ScalingParams& s);

// Right-hand side of the identity for grad^perp_z of the truncated projector kernel:
// (i (x - y) / l^2) Pi_{z,<=M}(x,y) minus the boundary dyad between levels M and M+1.
std::array<cplx, 2> truncated_projector_perp_gradient(cplx z, int M, Vec2 x, Vec2 y,
                                                      const ScalingParams& s);

// I_{2n+1}(a) = int_a^inf t^{2n+1} e^{-t^2/2} dt in closed form.
double odd_gaussian_moment(int n, double a);

// Exact L^1 norm of psi_{z,n}: 2^{(n+3)/2} sqrt(pi) l Gamma(n/2 + 1) / sqrt(n!).
double coherent_l1_norm(int n, const ScalingParams& s);

}  // namespace gyro
