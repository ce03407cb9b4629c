#pragma once

#include <vector>

namespace gyro {

// Generalized Laguerre polynomial L_n^{(alpha)}(t) by the three-term recurrence in n.
double laguerre(int n, double alpha, double t);

double log_factorial(int n);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` nodes on [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

// sup_u |He_j(u) exp(-u^2/2)| for the probabilists' Hermite polynomial He_j.
double hermite_gaussian_sup(int j);

// Quintic-order smoothstep S(s) = s^5 (126 - 420 s + 540 s^2 - 315 s^3 + 70 s^4), C^4 at both ends.
double smoothstep_c4(double s);
double smoothstep_c4_derivative(double s);

}  // namespace gyro
